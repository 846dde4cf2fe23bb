#pragma once

#include <vector>

#include "cstrd/geometry.hpp"
#include "cstrd/raster.hpp"

namespace cstrd {

struct EdgeDetectionParams {
  double sigma = 3.0;
  double th_low = 5.0;
  double th_high = 15.0;
};

// Gradient of the smoothed image, Gx = I[x+1] - I[x-1] (no 1/2 factor).
struct GradientField {
  FloatImage gx;
  FloatImage gy;
};

struct EdgeDetection {
  std::vector<EdgeCurve> curves;
  GradientField gradient;
};

// Closed curves repeat their first point at the end. Curves are oriented so
// that, walking along them, (Gy*dx - Gx*dy) > 0.
EdgeDetection detect_edges(const FloatImage& image, const EdgeDetectionParams& params = {});
EdgeDetection detect_edges(const GrayImage& image, const EdgeDetectionParams& params = {});

FloatImage gaussian_blur(const FloatImage& image, double sigma);

}  // namespace cstrd
