#include "cstrd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cstrd/errors.hpp"

namespace cstrd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

// Nonzero winding number test.
bool encloses(const std::vector<Point>& poly, Point p) {
  int wn = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point a = poly[i], b = poly[(i + 1) % poly.size()];
    const double side = (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y);
    if (a.y <= p.y) {
      if (b.y > p.y && side > 0) ++wn;
    } else if (b.y <= p.y && side < 0) {
      --wn;
    }
  }
  return wn != 0;
}

}  // namespace

double mean_radius(const RingPolyline& ring) {
  double s = 0;
  int n = 0;
  for (double r : ring.radii) {
    if (std::isnan(r)) continue;
    s += r;
    ++n;
  }
  return n ? s / n : 0.0;
}

RingPolyline rasterize_polygon(const std::vector<Point>& polygon, double cy, double cx, int nr) {
  if (polygon.size() < 3 || !encloses(polygon, {cx, cy})) throw InputError("polygon does not enclose the pith");
  double reach = 0;
  for (const auto& p : polygon) reach = std::max(reach, euclidean_distance(p, {cx, cy}));
  reach = 2 * reach + 1;
  EdgeCurve curve;
  curve.points = polygon;
  curve.points.push_back(polygon.front());
  RingPolyline out;
  out.radii.assign(static_cast<std::size_t>(nr), kNaN);
  for (int i = 0; i < nr; ++i) {
    Ray ray;
    ray.index = i;
    ray.angle_deg = ray_angle(i, nr);
    ray.origin = {cx, cy};
    ray.tip = polar_point(cy, cx, i, nr, reach);
    const auto hits = ray_curve_intersections(ray, curve);
    if (hits.empty()) throw InputError("polygon does not enclose the pith");
    out.radii[static_cast<std::size_t>(i)] = euclidean_distance(hits.back(), ray.origin);
  }
  return out;
}

RingPolyline ring_from_chain(const Chain& chain) {
  RingPolyline out;
  out.radii.assign(static_cast<std::size_t>(chain.nr()), kNaN);
  for (const auto& n : chain.nodes()) out.radii[static_cast<std::size_t>(n.ray)] = n.radius;
  return out;
}

std::vector<double> ray_lengths(int nr, int height, int width, double cy, double cx) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(nr));
  for (int i = 0; i < nr; ++i) out.push_back(euclidean_distance(ray_tip(ray_angle(i, nr), height, width, cy, cx), {cx, cy}));
  return out;
}

InfluencePartition build_influence_partition(const std::vector<RingPolyline>& gt, const std::vector<double>& cap) {
  InfluencePartition part;
  if (gt.empty()) return part;
  const std::size_t nr = gt.front().radii.size();
  for (const auto& g : gt) {
    if (g.radii.size() != nr) throw InputError("GT rings sampled at different ray counts");
  }
  if (!cap.empty() && cap.size() != nr) throw InputError("cap size differs from ray count");
  for (std::size_t i = 0; i + 1 < gt.size(); ++i) {
    for (std::size_t k = 0; k < nr; ++k) {
      if (!(gt[i].radii[k] < gt[i + 1].radii[k])) throw InputError("GT rings cross");
    }
  }
  part.lower.assign(gt.size(), std::vector<double>(nr, 0.0));
  part.upper.assign(gt.size(), std::vector<double>(nr, kInf));
  for (std::size_t i = 0; i < gt.size(); ++i) {
    for (std::size_t k = 0; k < nr; ++k) {
      if (i > 0) part.lower[i][k] = (gt[i - 1].radii[k] + gt[i].radii[k]) / 2;
      if (i + 1 < gt.size()) {
        part.upper[i][k] = (gt[i].radii[k] + gt[i + 1].radii[k]) / 2;
      } else if (!cap.empty()) {
        part.upper[i][k] = cap[k];
      }
    }
  }
  return part;
}

double ring_distance(const RingPolyline& dt, const RingPolyline& gt) {
  const std::size_t n = std::min(dt.radii.size(), gt.radii.size());
  double s = 0;
  int used = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (std::isnan(dt.radii[k]) || std::isnan(gt.radii[k])) continue;
    const double d = dt.radii[k] - gt.radii[k];
    s += d * d;
    ++used;
  }
  return used ? std::sqrt(s / used) : kInf;
}

double inside_percentage(const RingPolyline& dt, const InfluencePartition& part, std::size_t i) {
  const auto& lo = part.lower[i];
  const auto& hi = part.upper[i];
  int present = 0, inside = 0;
  for (std::size_t k = 0; k < dt.radii.size() && k < lo.size(); ++k) {
    const double r = dt.radii[k];
    if (std::isnan(r)) continue;
    ++present;
    if (r >= lo[k] && (r < hi[k] || (std::isinf(hi[k]) && r <= hi[k]))) ++inside;
  }
  return present ? 100.0 * inside / present : 0.0;
}

std::vector<int> assign_detections(const std::vector<RingPolyline>& dt, const std::vector<RingPolyline>& gt,
                                   const InfluencePartition& part, double th_pre) {
  struct Pair {
    double dist;
    int g, d;
  };
  std::vector<Pair> pairs;
  for (std::size_t g = 0; g < gt.size(); ++g) {
    for (std::size_t d = 0; d < dt.size(); ++d) {
      if (inside_percentage(dt[d], part, g) + 1e-9 < th_pre) continue;
      const double dist = ring_distance(dt[d], gt[g]);
      if (std::isinf(dist)) continue;
      pairs.push_back({dist, static_cast<int>(g), static_cast<int>(d)});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.g != b.g ? a.g < b.g : a.d < b.d;
  });
  std::vector<int> gt_to_dt(gt.size(), -1);
  std::vector<char> used(dt.size(), 0);
  for (const auto& p : pairs) {
    if (gt_to_dt[static_cast<std::size_t>(p.g)] >= 0 || used[static_cast<std::size_t>(p.d)]) continue;
    gt_to_dt[static_cast<std::size_t>(p.g)] = p.d;
    used[static_cast<std::size_t>(p.d)] = 1;
  }
  return gt_to_dt;
}

void fill_scores(MetricsReport& r) {
  r.precision = r.tp + r.fp > 0 ? static_cast<double>(r.tp) / (r.tp + r.fp) : 0.0;
  r.recall = r.tp + r.fn > 0 ? static_cast<double>(r.tp) / (r.tp + r.fn) : 0.0;
  r.f_score = r.precision + r.recall > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
}

MetricsReport score(const std::vector<int>& assignment, const std::vector<RingPolyline>& dt,
                    const std::vector<RingPolyline>& gt) {
  MetricsReport r;
  r.assignment = assignment;
  r.abs_error.assign(gt.size(), {});
  double dist_sum = 0;
  for (std::size_t g = 0; g < gt.size(); ++g) {
    const int d = assignment[g];
    if (d < 0) continue;
    ++r.tp;
    const auto& dr = dt[static_cast<std::size_t>(d)].radii;
    dist_sum += ring_distance(dt[static_cast<std::size_t>(d)], gt[g]);
    auto& err = r.abs_error[g];
    err.assign(gt[g].radii.size(), kNaN);
    for (std::size_t k = 0; k < err.size() && k < dr.size(); ++k) {
      if (!std::isnan(dr[k])) err[k] = std::abs(dr[k] - gt[g].radii[k]);
    }
  }
  r.fn = static_cast<int>(gt.size()) - r.tp;
  r.fp = static_cast<int>(dt.size()) - r.tp;
  r.rmse = r.tp ? dist_sum / r.tp : 0.0;
  fill_scores(r);
  return r;
}

MetricsReport evaluate_rings(std::vector<RingPolyline> dt, std::vector<RingPolyline> gt, double th_pre,
                             const std::vector<double>& cap) {
  auto by_mean = [](const RingPolyline& a, const RingPolyline& b) { return mean_radius(a) < mean_radius(b); };
  std::stable_sort(dt.begin(), dt.end(), by_mean);
  std::stable_sort(gt.begin(), gt.end(), by_mean);
  const auto part = build_influence_partition(gt, cap);
  return score(assign_detections(dt, gt, part, th_pre), dt, gt);
}

}  // namespace cstrd
