#pragma once

#include <vector>

#include "cstrd/geometry.hpp"

namespace cstrd {

// Radius per ray; NaN where the ring has no node.
struct RingPolyline {
  std::vector<double> radii;
};

inline constexpr double kDefaultThPre = 60.0;  // percent

// Resamples a closed polygon at the nr ray angles (outermost crossing per ray).
// Throws InputError when the polygon does not enclose the pith.
RingPolyline rasterize_polygon(const std::vector<Point>& polygon, double cy, double cx, int nr);
RingPolyline ring_from_chain(const Chain& chain);

// Per-ray distance from the pith to the image rectangle [0,w-1]x[0,h-1].
std::vector<double> ray_lengths(int nr, int height, int width, double cy, double cx);

// Influence area of GT ring i on ray k is [lower[i][k], upper[i][k]).
struct InfluencePartition {
  std::vector<std::vector<double>> lower;
  std::vector<std::vector<double>> upper;
};

// `gt` must be sorted innermost first. The outermost frontier is `cap` per ray
// (unbounded when empty). Throws InputError when GT rings cross.
InfluencePartition build_influence_partition(const std::vector<RingPolyline>& gt,
                                             const std::vector<double>& cap = {});

// Root mean square radial difference over rays present in both rings;
// infinity when no ray is shared.
double ring_distance(const RingPolyline& dt, const RingPolyline& gt);

// Percentage of dt's nodes that fall inside GT ring i's influence area.
double inside_percentage(const RingPolyline& dt, const InfluencePartition& part, std::size_t i);

// gt index -> dt index (-1 when unmatched). Eligible pairs are taken in order
// of increasing distance; each ring is used at most once.
std::vector<int> assign_detections(const std::vector<RingPolyline>& dt, const std::vector<RingPolyline>& gt,
                                   const InfluencePartition& part, double th_pre = kDefaultThPre);

struct MetricsReport {
  int tp = 0, fp = 0, tn = 0, fn = 0;
  double precision = 0, recall = 0, f_score = 0;
  double rmse = 0;
  std::vector<int> assignment;                  // gt -> dt
  std::vector<std::vector<double>> abs_error;   // per matched gt ring, per ray (NaN when missing)
};

// P/R/F from raw counts, 0 when degenerate.
void fill_scores(MetricsReport& report);

MetricsReport score(const std::vector<int>& assignment, const std::vector<RingPolyline>& dt,
                    const std::vector<RingPolyline>& gt);

// Sorts both sides by mean radius, partitions, assigns and scores.
MetricsReport evaluate_rings(std::vector<RingPolyline> dt, std::vector<RingPolyline> gt,
                             double th_pre = kDefaultThPre, const std::vector<double>& cap = {});

double mean_radius(const RingPolyline& ring);

}  // namespace cstrd
