#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "cstrd/geometry.hpp"
#include "cstrd/sampling.hpp"

namespace cstrd {

struct ConnectParams {
  double th_radial_tolerance = 0.1;
  double th_distribution_size = 2.0;
  double th_regular_derivative = 1.5;
  double neighbourhood_size = 10.0;  // degrees
  bool derivative_from_center = false;
};

// The nine relaxation steps, applied in order.
const std::array<ConnectParams, 9>& connect_schedule();

inline constexpr int kWindowNodes = 20;
inline constexpr double kFillThreshold = 0.9;

class IntersectionMatrix {
 public:
  IntersectionMatrix() = default;
  explicit IntersectionMatrix(std::size_t n) : n_(n), m_(n * n, 0) {
    for (std::size_t i = 0; i < n; ++i) m_[i * n + i] = 1;
  }
  std::size_t size() const { return n_; }
  bool operator()(std::size_t j, std::size_t k) const { return m_[j * n_ + k] != 0; }
  void set(std::size_t j, std::size_t k, bool v) {
    m_[j * n_ + k] = v;
    m_[k * n_ + j] = v;
  }
  void remove(std::size_t k);
  bool operator==(const IntersectionMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> m_;
};

// True when both chains own a node on some common ray.
bool chains_intersect(const Chain& a, const Chain& b);
IntersectionMatrix compute_intersection_matrix(const std::vector<Chain>& chains);

// Radius of `support` on `ray`, or of its angularly nearest node.
double support_radius(const Chain& support, int ray);

// Intervals mean +- th*std (population std) overlap.
bool similar_radial_distances(const std::vector<double>& set_j, const std::vector<double>& set_k, double th);
bool radial_tolerance(double dr_j, double dr_k, double th);

// Central differences |r[s+1]-r[s-1]|/2, one-sided at the ends.
std::vector<double> radial_derivative(const std::vector<double>& radii);

// window_j ends at the Ch_j endpoint, window_k starts at the candidate endpoint,
// bridge holds the interpolated radii between them.
bool regular_derivative(const std::vector<double>& window_j, const std::vector<double>& bridge,
                        const std::vector<double>& window_k, double th);

// Rays strictly between `from` and `to` walking clockwise.
int gap_size(int from_ray, int to_ray, int nr);

// Nodes on the rays strictly between `left` and `right` (clockwise). With a
// support, the offset to it is interpolated; otherwise the pith radius is.
std::vector<Node> interpolate_nodes(const Node& left, const Node& right, const Chain* support, int nr,
                                    double cy, double cx);

struct Goodness {
  bool ok = false;
  double distribution_distance = 0;
};

// Size, similarity and derivative conditions for joining `ck` to `cj` at
// `ep`; `bridge` holds the nodes that would fill the gap.
Goodness pair_goodness(const Chain& cj, const Chain& ck, Endpoint ep, const Chain& support,
                       const std::vector<Node>& bridge, const ConnectParams& params);

// Chains own their ids (id == index). `key` on each chain is stable.
class SystemState {
 public:
  SystemState(std::vector<Chain> chains, int nr, double cy, double cx);

  std::vector<Chain> chains;
  IntersectionMatrix m;
  ConnectParams params;
  int nr;
  double cy, cx;

  int index_of(long key) const;
  const RayOccupancy& occupancy();
  std::uint64_t version() const { return version_; }

  // Left/right nodes of the junction when Ch_j's `ep` meets Ch_k.
  std::pair<Node, Node> junction(int j, int k, Endpoint ep) const;
  std::vector<Node> bridge(int j, int k, Endpoint ep, int support) const;

  Goodness connectivity_goodness(int j, int k, int support, Endpoint ep) const;
  bool check_endpoints(int support, int j, int k, Endpoint ep) const;
  bool exist_chain_overlapping(const std::vector<Node>& bridge, int j, int k, int support);

  // Merges chain k (plus bridge) into j. Returns the new index of j.
  int merge(int j, int k, const std::vector<Node>& bridge);
  void add_to_chain(int j, const std::vector<Node>& extra);

  std::function<void(const SystemState&)> on_merge;

 private:
  void refresh_row(int j);

  long next_key_ = 0;
  std::uint64_t version_ = 0;
  std::uint64_t occ_version_ = ~0ULL;
  std::optional<RayOccupancy> occ_;
};

// Closest chain (by endpoint angular distance, then radial distance) to Ch_j's
// endpoint that passes goodness and is mutually closest. Returns an index or -1.
int get_closest_chain_logic(SystemState& s, const std::vector<int>& candidates, int j,
                            const std::vector<int>& no_intersection_j, int support, Endpoint ep);

// Fills the gap of a chain covering >= 90% of the rays when the band is empty.
bool fill_chain_if_no_overlap(SystemState& s, int j);

struct ConnectObserver {
  std::function<void(const SystemState&)> on_merge;
  std::function<void(int step, std::size_t chain_count)> on_step;
};

void connect_chains_main_logic(SystemState& s);

std::vector<Chain> connect_chains(std::vector<Chain> chains, int nr, double cy, double cx,
                                  const ConnectObserver* observer = nullptr);

}  // namespace cstrd
