#pragma once

#include <utility>
#include <vector>

#include "cstrd/geometry.hpp"

namespace cstrd {

struct SamplingParams {
  int nr = 360;
  int min_chain_length = 2;
  // nodes this close to (or beyond) the disk border are dropped
  double border_margin = 3.0;
};

// Normal chains first, then the border chain, then the center chain.
// Chain ids equal their index.
std::vector<Chain> sampling_edges(const std::vector<EdgeCurve>& curves, double cy, double cx,
                                  int height, int width, const SamplingParams& params = {});

std::vector<Node> collect_nodes(const std::vector<Chain>& chains);

Chain make_center_chain(int id, int nr, double cy, double cx);

enum class Direction { inward, outward };

// Per ray, the (radius, chain index) pairs sorted by radius.
class RayOccupancy {
 public:
  RayOccupancy(const std::vector<Chain>& chains, int nr);
  const std::vector<std::pair<double, int>>& at(int ray) const { return rays_[static_cast<std::size_t>(ray)]; }
  // Nearest chain strictly inside / outside `radius` on `ray`, skipping `self`; -1 if none.
  int neighbour(int ray, double radius, int self, Direction dir) const;

 private:
  std::vector<std::vector<std::pair<double, int>>> rays_;
};

// Normal chains (other than the support) with an endpoint whose ray meets the
// support first when walking toward it. Result holds chain indices, ascending.
std::vector<int> visible_chains(const std::vector<Chain>& chains, const Chain& support, Direction dir);
std::vector<int> visible_chains(const std::vector<Chain>& chains, const RayOccupancy& occ,
                                int support, Direction dir);

}  // namespace cstrd
