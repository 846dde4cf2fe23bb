#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "cstrd/geometry.hpp"
#include "cstrd/raster.hpp"

namespace testutil {

using namespace cstrd;

// Arc of `count` nodes starting at `first`, radius given per offset.
template <class F>
Chain arc(int id, int nr, int first, int count, F radius_at, double cy = 500, double cx = 500,
          ChainKind kind = ChainKind::normal) {
  std::vector<Node> nodes;
  for (int t = 0; t < count; ++t) {
    const int ray = wrap_ray(first + t, nr);
    const double r = radius_at(t);
    const Point p = polar_point(cy, cx, ray, nr, r);
    nodes.push_back({p.x, p.y, ray, r, id});
  }
  return Chain(id, nr, kind, nodes);
}

inline Chain arc(int id, int nr, int first, int count, double radius, double cy = 500, double cx = 500,
                 ChainKind kind = ChainKind::normal) {
  return arc(id, nr, first, count, [radius](int) { return radius; }, cy, cx, kind);
}

inline std::vector<Point> circle_points(double cy, double cx, double r, int n) {
  std::vector<Point> pts;
  for (int i = 0; i <= n; ++i) {
    const double a = 2 * std::numbers::pi * (i % n) / n;
    pts.push_back({cx + r * std::cos(a), cy + r * std::sin(a)});
  }
  return pts;
}

// Concentric bands with area-weighted anti-aliasing: value inside[i] between
// radii[i-1] and radii[i], `outside` beyond the last radius.
inline FloatImage banded_disk(int size, double cy, double cx, const std::vector<double>& radii,
                              const std::vector<double>& values) {
  FloatImage img(size, size);
  constexpr int ss = 8;
  auto value_at = [&](double d) {
    std::size_t i = 0;
    while (i < radii.size() && d >= radii[i]) ++i;
    return values[i];
  };
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      double s = 0;
      for (int a = 0; a < ss; ++a) {
        for (int b = 0; b < ss; ++b) {
          s += value_at(std::hypot(x - 0.5 + (a + 0.5) / ss - cx, y - 0.5 + (b + 0.5) / ss - cy));
        }
      }
      img(y, x) = s / (ss * ss);
    }
  }
  return img;
}

}  // namespace testutil
