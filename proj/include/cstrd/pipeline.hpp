#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cstrd/chain_connect.hpp"
#include "cstrd/devernay.hpp"
#include "cstrd/preprocess.hpp"
#include "cstrd/raster.hpp"
#include "cstrd/sampling.hpp"

namespace cstrd {

struct DetectParams {
  double sigma = 3.0;
  double th_low = 5.0;
  double th_high = 15.0;
  double alpha = 30.0;
  int nr = 360;
  int min_chain_length = 2;
  std::optional<int> height;
  std::optional<int> width;
};

struct DetectionResult {
  PreprocessedImage preprocessed;
  std::vector<EdgeCurve> curves;
  std::vector<EdgeCurve> filtered;
  std::vector<Chain> sampled;
  std::vector<Chain> connected;
  std::vector<Chain> chains;  // after postprocessing
  std::vector<Chain> rings;   // closed, innermost first, working coordinates
  std::vector<std::pair<std::string, double>> timings;  // seconds per stage
};

// Throws InputError on bad parameters or a pith outside the image.
DetectionResult detect_rings(const RgbImage& image, double cy, double cx, const DetectParams& params = {},
                             const ConnectObserver* observer = nullptr);

}  // namespace cstrd
