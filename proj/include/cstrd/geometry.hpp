#pragma once

#include <cstddef>
#include <vector>

namespace cstrd {

struct Point {
  double x = 0;  // column
  double y = 0;  // row
};

// Segment from the pith to the image border. Angle grows clockwise on screen
// (y points down), starting at +x.
struct Ray {
  int index = 0;
  double angle_deg = 0;
  Point origin;
  Point tip;
};

enum class CurveKind { devernay, border };

struct EdgeCurve {
  int id = 0;
  std::vector<Point> points;
  CurveKind kind = CurveKind::devernay;
};

struct Node {
  double x = 0;
  double y = 0;
  int ray = 0;
  double radius = 0;
  int chain = -1;
};

enum class ChainKind { normal, center, border };
enum class Endpoint { A, B };

// Angularly contiguous node run, one node per ray. Nodes are kept from B to A,
// i.e. increasing ray index modulo nr. Closed chains start at ray 0.
class Chain {
 public:
  Chain() = default;
  Chain(int id, int nr, ChainKind kind, std::vector<Node> nodes);

  int id() const { return id_; }
  void set_id(int id);
  ChainKind kind() const { return kind_; }
  int nr() const { return nr_; }
  std::size_t size() const { return nodes_.size(); }
  bool closed() const { return static_cast<int>(nodes_.size()) == nr_; }

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& a() const { return nodes_.back(); }
  const Node& b() const { return nodes_.front(); }
  const Node& endpoint(Endpoint e) const { return e == Endpoint::A ? a() : b(); }

  // Offset of `ray` from B, or -1 when the chain has no node there.
  int offset_of(int ray) const;
  bool covers(int ray) const { return offset_of(ray) >= 0; }
  const Node* at_ray(int ray) const;

  double mean_radius() const;

  // Adds nodes on rays not yet covered; the union must stay contiguous.
  void add_nodes(const std::vector<Node>& extra);

  // Stable identity that survives id compaction.
  long key = -1;

 private:
  void normalize();

  int id_ = -1;
  int nr_ = 0;
  ChainKind kind_ = ChainKind::normal;
  std::vector<Node> nodes_;
};

double euclidean_distance(Point p, Point q);
double euclidean_distance(const Node& p, const Node& q);
double radial_difference(const Node& nj, const Node& nk);
// (theta_j - theta_k + 360) mod 360, directional.
double angular_distance(double theta_j, double theta_k);

inline int wrap_ray(int ray, int nr) { return ((ray % nr) + nr) % nr; }
inline double ray_angle(int ray, int nr) { return 360.0 * ray / nr; }

std::vector<Ray> build_rays(int nr, int height, int width, double cy, double cx);

// Exit point of the ray at angle_deg on the rectangle [0,width-1]x[0,height-1].
Point ray_tip(double angle_deg, int height, int width, double cy, double cx);

// Point at radius r along ray `ray` from the pith.
Point polar_point(double cy, double cx, int ray, int nr, double radius);

// Crossings of the ray segment with the polyline, radially ascending.
std::vector<Point> ray_curve_intersections(const Ray& ray, const EdgeCurve& curve);

struct Crossing {
  int ray = 0;
  Point point;
  std::size_t segment = 0;
  double t = 0;  // position on the segment, in [0,1)
};

// All crossings of a polyline with the ray fan, in curve order.
// Segment parameters are half-open so shared vertices count once.
std::vector<Crossing> curve_crossings(const std::vector<Point>& points,
                                      const std::vector<Ray>& rays);

}  // namespace cstrd
