#include "cstrd/sampling.hpp"

#include <algorithm>
#include <limits>

namespace cstrd {

Chain make_center_chain(int id, int nr, double cy, double cx) {
  std::vector<Node> nodes(static_cast<std::size_t>(nr));
  for (int r = 0; r < nr; ++r) nodes[static_cast<std::size_t>(r)] = {cx, cy, r, 0.0, id};
  return Chain(id, nr, ChainKind::center, std::move(nodes));
}

std::vector<Chain> sampling_edges(const std::vector<EdgeCurve>& curves, double cy, double cx,
                                  int height, int width, const SamplingParams& params) {
  const int nr = params.nr;
  const auto rays = build_rays(nr, height, width, cy, cx);
  auto make_node = [&](const Crossing& c) {
    return Node{c.point.x, c.point.y, c.ray, euclidean_distance(c.point, {cx, cy}), -1};
  };

  // border: innermost crossing per ray, ray tip where the outline is missing
  std::vector<Node> border_nodes(static_cast<std::size_t>(nr));
  std::vector<bool> have(static_cast<std::size_t>(nr), false);
  for (const auto& curve : curves) {
    if (curve.kind != CurveKind::border) continue;
    for (const auto& c : curve_crossings(curve.points, rays)) {
      const Node n = make_node(c);
      auto& slot = border_nodes[static_cast<std::size_t>(c.ray)];
      if (!have[static_cast<std::size_t>(c.ray)] || n.radius < slot.radius) slot = n;
      have[static_cast<std::size_t>(c.ray)] = true;
    }
  }
  for (int r = 0; r < nr; ++r) {
    if (have[static_cast<std::size_t>(r)]) continue;
    const Point t = rays[static_cast<std::size_t>(r)].tip;
    border_nodes[static_cast<std::size_t>(r)] = {t.x, t.y, r, euclidean_distance(t, {cx, cy}), -1};
  }

  std::vector<Chain> chains;
  std::vector<Node> run;
  auto flush = [&]() {
    if (static_cast<int>(run.size()) >= params.min_chain_length) {
      chains.emplace_back(static_cast<int>(chains.size()), nr, ChainKind::normal, run);
    }
    run.clear();
  };
  for (const auto& curve : curves) {
    if (curve.kind == CurveKind::border) continue;
    for (const auto& c : curve_crossings(curve.points, rays)) {
      const Node n = make_node(c);
      if (n.radius > border_nodes[static_cast<std::size_t>(c.ray)].radius - params.border_margin) {
        flush();
        continue;
      }
      if (!run.empty()) {
        const int step = wrap_ray(c.ray - run.back().ray, nr);
        const bool adjacent = step == 1 || step == nr - 1;
        const bool repeated = std::any_of(run.begin(), run.end(), [&](const Node& m) { return m.ray == c.ray; });
        if (!adjacent || repeated) flush();
      }
      run.push_back(n);
    }
    flush();
  }
  chains.emplace_back(static_cast<int>(chains.size()), nr, ChainKind::border, border_nodes);
  chains.push_back(make_center_chain(static_cast<int>(chains.size()), nr, cy, cx));
  return chains;
}

std::vector<Node> collect_nodes(const std::vector<Chain>& chains) {
  std::vector<Node> nodes;
  for (const auto& c : chains) nodes.insert(nodes.end(), c.nodes().begin(), c.nodes().end());
  return nodes;
}

RayOccupancy::RayOccupancy(const std::vector<Chain>& chains, int nr) : rays_(static_cast<std::size_t>(nr)) {
  for (int i = 0; i < static_cast<int>(chains.size()); ++i) {
    for (const auto& n : chains[static_cast<std::size_t>(i)].nodes()) {
      rays_[static_cast<std::size_t>(n.ray)].emplace_back(n.radius, i);
    }
  }
  for (auto& r : rays_) std::sort(r.begin(), r.end());
}

int RayOccupancy::neighbour(int ray, double radius, int self, Direction dir) const {
  const auto& r = rays_[static_cast<std::size_t>(ray)];
  int best = -1;
  if (dir == Direction::inward) {
    for (const auto& [rad, id] : r) {
      if (rad >= radius) break;
      if (id != self) best = id;
    }
  } else {
    for (auto it = r.rbegin(); it != r.rend(); ++it) {
      if (it->first <= radius) break;
      if (it->second != self) best = it->second;
    }
  }
  return best;
}

std::vector<int> visible_chains(const std::vector<Chain>& chains, const RayOccupancy& occ, int support,
                                Direction dir) {
  std::vector<int> out;
  // a chain inward of the support sees it outward, and vice versa
  const Direction look = dir == Direction::inward ? Direction::outward : Direction::inward;
  for (int i = 0; i < static_cast<int>(chains.size()); ++i) {
    const Chain& c = chains[static_cast<std::size_t>(i)];
    if (i == support || c.kind() != ChainKind::normal || c.size() == 0) continue;
    for (Endpoint e : {Endpoint::A, Endpoint::B}) {
      const Node& n = c.endpoint(e);
      if (occ.neighbour(n.ray, n.radius, i, look) == support) {
        out.push_back(i);
        break;
      }
    }
  }
  return out;
}

std::vector<int> visible_chains(const std::vector<Chain>& chains, const Chain& support, Direction dir) {
  const int nr = support.nr();
  RayOccupancy occ(chains, nr);
  int idx = -1;
  for (int i = 0; i < static_cast<int>(chains.size()); ++i) {
    if (&chains[static_cast<std::size_t>(i)] == &support || chains[static_cast<std::size_t>(i)].id() == support.id()) {
      idx = i;
      break;
    }
  }
  if (idx < 0) return {};
  return visible_chains(chains, occ, idx, dir);
}

}  // namespace cstrd
