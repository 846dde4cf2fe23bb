#pragma once

#include <cstdint>
#include <vector>

#include "cstrd/geometry.hpp"
#include "cstrd/raster.hpp"

namespace cstrd {

struct DiskSpec {
  std::vector<double> radii;  // mean radius of each ring boundary, strictly increasing
  double deformation = 0.0;   // peak displacement as a fraction of the mean ring spacing
  bool crack = false;
  bool stain = false;
  bool gap = false;
  double gap_deg = 30.0;
  std::uint64_t seed = 0;
  int size = 1500;
};

struct SyntheticDisk {
  RgbImage image;
  double cy = 0;
  double cx = 0;
  std::vector<std::vector<Point>> rings;  // 720 vertices each, innermost first
};

inline constexpr int kGtVertices = 720;

// Throws InputError on non-increasing radii or a disk that does not fit.
SyntheticDisk generate_disk(const DiskSpec& spec);

// Random ring layout: `count` rings, widths jittered around a common spacing,
// outermost boundary at about `outer` pixels.
std::vector<double> random_radii(int count, double outer, std::uint64_t seed);

}  // namespace cstrd
