#include "cstrd/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cstrd/errors.hpp"

namespace cstrd {

namespace {

struct Dir {
  double ux, uy, length;
};

Dir ray_dir(const Ray& ray) {
  const double rad = ray.angle_deg * std::numbers::pi / 180.0;
  const double len = std::hypot(ray.tip.x - ray.origin.x, ray.tip.y - ray.origin.y);
  return {std::cos(rad), std::sin(rad), len};
}

// Crossing of ray (origin c, direction u, length L) with segment p->q.
// Returns t in [0,1) or a negative value.
double cross_segment(Point c, const Dir& d, Point p, Point q, Point& out) {
  const double ax = p.x - c.x, ay = p.y - c.y;
  const double bx = q.x - c.x, by = q.y - c.y;
  const double sa = d.ux * ay - d.uy * ax;
  const double sb = d.ux * by - d.uy * bx;
  double t;
  if (sa == 0.0) {
    if (sb == 0.0) return -1;
    t = 0.0;
  } else if ((sa < 0 && sb > 0) || (sa > 0 && sb < 0)) {
    // a sign change means a real crossing even if t rounds up to 1
    t = std::min(sa / (sa - sb), std::nextafter(1.0, 0.0));
  } else {
    return -1;
  }
  const double px = ax + t * (bx - ax), py = ay + t * (by - ay);
  const double along = d.ux * px + d.uy * py;
  if (along <= 0.0 || along > d.length + 1e-9) return -1;
  out = {c.x + px, c.y + py};
  return t;
}

double polar_deg(double x, double y) {
  double a = std::atan2(y, x) * 180.0 / std::numbers::pi;
  if (a < 0) a += 360.0;
  return a;
}

}  // namespace

Chain::Chain(int id, int nr, ChainKind kind, std::vector<Node> nodes)
    : id_(id), nr_(nr), kind_(kind), nodes_(std::move(nodes)) {
  if (nr <= 0) throw InputError("chain needs nr > 0");
  normalize();
}

void Chain::set_id(int id) {
  id_ = id;
  for (auto& n : nodes_) n.chain = id;
}

void Chain::normalize() {
  if (static_cast<int>(nodes_.size()) > nr_) throw InputError("chain larger than nr");
  for (auto& n : nodes_) {
    if (n.ray < 0 || n.ray >= nr_) throw InputError("node ray out of range");
    n.chain = id_;
  }
  std::sort(nodes_.begin(), nodes_.end(), [](const Node& p, const Node& q) { return p.ray < q.ray; });
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (nodes_[i].ray == nodes_[i - 1].ray) throw InputError("two nodes on one ray");
  }
  if (nodes_.empty() || closed()) return;
  // exactly one run of missing rays; B sits right after it
  std::size_t start = 0;
  int gaps = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const int prev = nodes_[(i + nodes_.size() - 1) % nodes_.size()].ray;
    if (wrap_ray(nodes_[i].ray - prev, nr_) != 1) {
      ++gaps;
      start = i;
    }
  }
  if (gaps != 1) throw InputError("chain nodes are not angularly contiguous");
  std::rotate(nodes_.begin(), nodes_.begin() + static_cast<long>(start), nodes_.end());
}

int Chain::offset_of(int ray) const {
  if (nodes_.empty()) return -1;
  const int off = wrap_ray(ray - nodes_.front().ray, nr_);
  return off < static_cast<int>(nodes_.size()) ? off : -1;
}

const Node* Chain::at_ray(int ray) const {
  const int off = offset_of(ray);
  return off < 0 ? nullptr : &nodes_[static_cast<std::size_t>(off)];
}

double Chain::mean_radius() const {
  if (nodes_.empty()) return 0;
  double s = 0;
  for (const auto& n : nodes_) s += n.radius;
  return s / static_cast<double>(nodes_.size());
}

void Chain::add_nodes(const std::vector<Node>& extra) {
  for (const auto& n : extra) {
    if (!covers(n.ray)) nodes_.push_back(n);
  }
  normalize();
}

double euclidean_distance(Point p, Point q) { return std::hypot(p.x - q.x, p.y - q.y); }

double euclidean_distance(const Node& p, const Node& q) { return std::hypot(p.x - q.x, p.y - q.y); }

double radial_difference(const Node& nj, const Node& nk) { return std::abs(nj.radius - nk.radius); }

double angular_distance(double theta_j, double theta_k) {
  return std::fmod(theta_j - theta_k + 360.0, 360.0);
}

Point ray_tip(double angle_deg, int height, int width, double cy, double cx) {
  const double rad = angle_deg * std::numbers::pi / 180.0;
  const double dx = std::cos(rad), dy = std::sin(rad);
  const double inf = std::numeric_limits<double>::infinity();
  const double tx = dx > 0 ? (width - 1 - cx) / dx : dx < 0 ? -cx / dx : inf;
  const double ty = dy > 0 ? (height - 1 - cy) / dy : dy < 0 ? -cy / dy : inf;
  const double t = std::max(0.0, std::min(tx, ty));
  return {cx + t * dx, cy + t * dy};
}

std::vector<Ray> build_rays(int nr, int height, int width, double cy, double cx) {
  if (nr < 3) throw InputError("nr must be >= 3");
  if (!(cy >= 0 && cx >= 0 && cy < height && cx < width)) throw InputError("pith outside image");
  std::vector<Ray> rays;
  rays.reserve(static_cast<std::size_t>(nr));
  for (int i = 0; i < nr; ++i) {
    Ray r;
    r.index = i;
    r.angle_deg = ray_angle(i, nr);
    r.origin = {cx, cy};
    r.tip = ray_tip(r.angle_deg, height, width, cy, cx);
    if (euclidean_distance(r.origin, r.tip) <= 0.0) throw InputError("pith on image border: zero-length ray");
    rays.push_back(r);
  }
  return rays;
}

Point polar_point(double cy, double cx, int ray, int nr, double radius) {
  const double rad = ray_angle(ray, nr) * std::numbers::pi / 180.0;
  return {cx + radius * std::cos(rad), cy + radius * std::sin(rad)};
}

std::vector<Point> ray_curve_intersections(const Ray& ray, const EdgeCurve& curve) {
  const Dir d = ray_dir(ray);
  std::vector<std::pair<double, Point>> hits;
  for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
    Point p;
    if (cross_segment(ray.origin, d, curve.points[i], curve.points[i + 1], p) >= 0) {
      hits.emplace_back(euclidean_distance(ray.origin, p), p);
    }
  }
  std::sort(hits.begin(), hits.end(), [](const auto& u, const auto& v) { return u.first < v.first; });
  std::vector<Point> out;
  out.reserve(hits.size());
  for (const auto& h : hits) out.push_back(h.second);
  return out;
}

std::vector<Crossing> curve_crossings(const std::vector<Point>& points, const std::vector<Ray>& rays) {
  std::vector<Crossing> out;
  if (rays.empty() || points.size() < 2) return out;
  const int nr = static_cast<int>(rays.size());
  const double step = 360.0 / nr;
  const Point c = rays.front().origin;
  std::vector<Dir> dirs;
  dirs.reserve(rays.size());
  for (const auto& r : rays) dirs.push_back(ray_dir(r));

  std::vector<Crossing> seg;
  std::vector<int> seen;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const Point p = points[i], q = points[i + 1];
    const double ax = p.x - c.x, ay = p.y - c.y, bx = q.x - c.x, by = q.y - c.y;
    const double theta_a = polar_deg(ax, ay);
    const double sweep = std::atan2(ax * by - ay * bx, ax * bx + ay * by) * 180.0 / std::numbers::pi;
    const double lo = std::min(theta_a, theta_a + sweep), hi = std::max(theta_a, theta_a + sweep);
    const int k0 = static_cast<int>(std::floor(lo / step)) - 1;
    const int k1 = static_cast<int>(std::ceil(hi / step)) + 1;
    seg.clear();
    seen.clear();
    for (int k = k0; k <= k1; ++k) {
      const int ray = wrap_ray(k, nr);
      if (std::find(seen.begin(), seen.end(), ray) != seen.end()) continue;
      seen.push_back(ray);
      Point hit;
      const double t = cross_segment(c, dirs[static_cast<std::size_t>(ray)], p, q, hit);
      if (t >= 0) seg.push_back({ray, hit, i, t});
    }
    std::sort(seg.begin(), seg.end(), [](const Crossing& u, const Crossing& v) {
      return u.t < v.t || (u.t == v.t && u.ray < v.ray);
    });
    out.insert(out.end(), seg.begin(), seg.end());
  }
  return out;
}

}  // namespace cstrd
