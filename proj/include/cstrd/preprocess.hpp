#pragma once

#include <optional>

#include "cstrd/raster.hpp"

namespace cstrd {

struct PreprocessedImage {
  GrayImage gray;  // background pixels are 255
  int height = 0;
  int width = 0;
  double cy = 0;
  double cx = 0;
  double sy = 1;  // working / original
  double sx = 1;
};

struct ClaheParams {
  double clip_limit = 10.0;
  int tiles_x = 8;
  int tiles_y = 8;
};

// Resize (both dims given) -> luma -> equalize. Pith is rescaled with the image.
PreprocessedImage preprocess(const RgbImage& image, std::optional<int> height_out,
                             std::optional<int> width_out, double cy, double cx);

// Separable Lanczos-3, support widened by the scale factor when shrinking.
RgbImage resize_lanczos(const RgbImage& image, int height_out, int width_out);
FloatImage resize_lanczos(const FloatImage& image, int height_out, int width_out);

// ITU-R 601 luma. Pixels that are not pure white never map to 255.
GrayImage to_gray(const RgbImage& image);

GrayImage clahe(const GrayImage& image, const ClaheParams& params = {});

// Background (255) swapped for the foreground mean, CLAHE, background restored.
GrayImage equalize(const GrayImage& gray, const ClaheParams& params = {});

}  // namespace cstrd
