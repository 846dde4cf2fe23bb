#include "cstrd/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace cstrd {

namespace {

double ring_radius(const Chain& ring, int ray) { return support_radius(ring, ray); }

std::vector<double> offsets_to(const Chain& c, const Chain& ring) {
  std::vector<double> d;
  d.reserve(c.size());
  for (const auto& n : c.nodes()) d.push_back(std::abs(n.radius - ring_radius(ring, n.ray)));
  return d;
}

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

int shared_rays(const Chain& a, const Chain& b) {
  int n = 0;
  for (const auto& node : a.nodes()) n += b.covers(node.ray) ? 1 : 0;
  return n;
}

}  // namespace

ConnectParams region_params() { return {0.2, 3.0, 2.0, 45.0, false}; }

double ring_fraction(const Chain& inward, const Chain& outward, int ray, double r) {
  const double rin = ring_radius(inward, ray), rout = ring_radius(outward, ray);
  if (rout - rin <= 0) return 0.5;
  return (r - rin) / (rout - rin);
}

bool chain_within(const Chain& c, const Chain& inward, const Chain& outward) {
  for (const auto& n : c.nodes()) {
    if (!(n.radius > ring_radius(inward, n.ray) && n.radius < ring_radius(outward, n.ray))) return false;
  }
  return c.size() > 0;
}

std::vector<Node> interpolate_between_rings(const Node& left, const Node& right, const Chain& inward,
                                            const Chain& outward, int nr, double cy, double cx) {
  const int g = gap_size(left.ray, right.ray, nr);
  const double fl = ring_fraction(inward, outward, left.ray, left.radius);
  const double fr = ring_fraction(inward, outward, right.ray, right.radius);
  std::vector<Node> out;
  for (int t = 1; t <= g; ++t) {
    const int ray = wrap_ray(left.ray + t, nr);
    const double f = fl + (fr - fl) * t / (g + 1);
    const double rin = ring_radius(inward, ray), rout = ring_radius(outward, ray);
    const double rho = std::max(0.0, rin + f * (rout - rin));
    const Point p = polar_point(cy, cx, ray, nr, rho);
    out.push_back({p.x, p.y, ray, rho, -1});
  }
  return out;
}

void complete_chain_using_2_support_ring(const Chain& inward, const Chain& outward, Chain& c, double cy,
                                         double cx) {
  if (c.closed() || c.size() == 0) return;
  c.add_nodes(interpolate_between_rings(c.a(), c.b(), inward, outward, c.nr(), cy, cx));
}

std::vector<Piece> runs_outside(const Chain& c, const Chain& cj) {
  std::vector<Piece> out;
  Piece cur;
  for (const auto& n : c.nodes()) {
    if (cj.covers(n.ray)) {
      if (cur.count > 0) out.push_back(cur);
      cur = Piece{};
      continue;
    }
    if (cur.count == 0) {
      cur.source = c.key;
      cur.first_ray = n.ray;
    }
    ++cur.count;
  }
  if (cur.count > 0) out.push_back(cur);
  return out;
}

std::vector<Piece> split_intersecting_chains(int direction_ray, const std::vector<Chain>& chains,
                                             const Chain& cj, Endpoint ep) {
  const int nr = cj.nr();
  const int room = nr - static_cast<int>(cj.size());
  std::vector<Piece> out;
  for (const auto& c : chains) {
    if (c.key == cj.key && c.id() == cj.id()) continue;
    const int off = c.offset_of(direction_ray);
    if (off < 0) continue;
    Piece p;
    p.source = c.key;
    if (ep == Endpoint::A) {
      p.first_ray = wrap_ray(direction_ray + 1, nr);
      p.count = std::min(static_cast<int>(c.size()) - 1 - off, room);
    } else {
      p.count = off;
      p.first_ray = c.b().ray;
      if (p.count > room) {
        p.first_ray = wrap_ray(direction_ray - room, nr);
        p.count = room;
      }
    }
    if (p.count > 0) out.push_back(p);
  }
  return out;
}

Postprocessor::Postprocessor(std::vector<Chain> chains, int nr, double cy, double cx)
    : chains_(std::move(chains)), nr_(nr), cy_(cy), cx_(cx) {
  for (auto& c : chains_) c.key = next_key_++;
  renumber();
}

void Postprocessor::renumber() {
  for (std::size_t i = 0; i < chains_.size(); ++i) chains_[i].set_id(static_cast<int>(i));
}

int Postprocessor::index_of(long key) const {
  for (std::size_t i = 0; i < chains_.size(); ++i) {
    if (chains_[i].key == key) return static_cast<int>(i);
  }
  return -1;
}

Chain Postprocessor::piece_chain(const Piece& p) const {
  const Chain& src = by_key(p.source);
  std::vector<Node> nodes;
  for (int t = 0; t < p.count; ++t) nodes.push_back(*src.at_ray(wrap_ray(p.first_ray + t, nr_)));
  Chain c(-1, nr_, ChainKind::normal, std::move(nodes));
  c.key = p.source;
  return c;
}

std::vector<long> Postprocessor::closed_rings() const {
  std::vector<std::pair<double, long>> rings;
  for (const auto& c : chains_) {
    if (c.closed()) rings.emplace_back(c.mean_radius(), c.key);
  }
  std::sort(rings.begin(), rings.end());
  std::vector<long> keys;
  for (const auto& r : rings) keys.push_back(r.second);
  return keys;
}

std::vector<long> Postprocessor::within_chains(long inward, long outward) const {
  const Chain& in = by_key(inward);
  const Chain& out = by_key(outward);
  std::vector<const Chain*> found;
  for (const auto& c : chains_) {
    if (c.kind() == ChainKind::normal && !c.closed() && chain_within(c, in, out)) found.push_back(&c);
  }
  std::sort(found.begin(), found.end(), [](const Chain* a, const Chain* b) {
    return a->size() != b->size() ? a->size() > b->size() : a->id() < b->id();
  });
  std::vector<long> keys;
  for (const auto* c : found) keys.push_back(c->key);
  return keys;
}

Postprocessor::Candidate Postprocessor::best_neighbour(long inward, long outward, long j, Endpoint ep,
                                                       const std::vector<long>& within) const {
  const Chain& in = by_key(inward);
  const Chain& out = by_key(outward);
  const Chain& cj = by_key(j);
  const Node& e = cj.endpoint(ep);
  const ConnectParams params = region_params();
  const double step = 360.0 / nr_;

  // support: the bounding ring nearest to the endpoint
  const Node* ni = in.at_ray(e.ray);
  const Node* no = out.at_ray(e.ray);
  const Chain& support = euclidean_distance(e, *ni) <= euclidean_distance(e, *no) ? in : out;

  Candidate best;
  for (long key : within) {
    if (key == j) continue;
    const Chain& c = by_key(key);
    if (shared_rays(c, cj) * step > params.neighbourhood_size) continue;
    for (const Piece& p : runs_outside(c, cj)) {
      const Chain pc = piece_chain(p);
      const Node& facing = pc.endpoint(ep == Endpoint::A ? Endpoint::B : Endpoint::A);
      const int rays = ep == Endpoint::A ? wrap_ray(facing.ray - e.ray, nr_) : wrap_ray(e.ray - facing.ray, nr_);
      if (rays * step > params.neighbourhood_size) continue;
      const Node& left = ep == Endpoint::A ? e : facing;
      const Node& right = ep == Endpoint::A ? facing : e;
      const auto bridge = interpolate_between_rings(left, right, in, out, nr_, cy_, cx_);
      if (!pair_goodness(cj, pc, ep, support, bridge, params).ok) continue;
      const double d = euclidean_distance(e, facing);
      const bool better = !best.valid || d < best.euclidean ||
                          (d == best.euclidean && (p.source < best.piece.source ||
                                                   (p.source == best.piece.source && p.first_ray < best.piece.first_ray)));
      if (better) {
        best = {p, d, std::abs(e.radius - facing.radius), true};
      }
    }
  }
  return best;
}

void Postprocessor::connect_piece(long inward, long outward, long j, Endpoint ep, const Piece& piece) {
  const Chain pc = piece_chain(piece);
  {
    const Chain& cj = by_key(j);
    const Node e = cj.endpoint(ep);
    const Node facing = pc.endpoint(ep == Endpoint::A ? Endpoint::B : Endpoint::A);
    auto extra = ep == Endpoint::A
                     ? interpolate_between_rings(e, facing, by_key(inward), by_key(outward), nr_, cy_, cx_)
                     : interpolate_between_rings(facing, e, by_key(inward), by_key(outward), nr_, cy_, cx_);
    extra.insert(extra.end(), pc.nodes().begin(), pc.nodes().end());
    chains_[static_cast<std::size_t>(index_of(j))].add_nodes(extra);
  }

  // the source keeps what is left; a middle cut leaves two runs
  const int si = index_of(piece.source);
  const Chain src = chains_[static_cast<std::size_t>(si)];
  std::vector<std::vector<Node>> runs(1);
  for (const auto& n : src.nodes()) {
    if (pc.covers(n.ray)) {
      if (!runs.back().empty()) runs.emplace_back();
      continue;
    }
    runs.back().push_back(n);
  }
  std::vector<std::vector<Node>> kept;
  for (auto& r : runs) {
    if (r.size() >= 2) kept.push_back(std::move(r));
  }
  chains_.erase(chains_.begin() + si);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    Chain c(-1, nr_, src.kind(), std::move(kept[i]));
    c.key = i == 0 ? src.key : next_key_++;
    chains_.push_back(std::move(c));
  }
  renumber();
}

bool Postprocessor::split_and_connect_chains(long inward, long outward) {
  std::set<long> processed;
  long j = -1;
  bool connected = false;
  const std::size_t limit = (chains_.size() + 1) * static_cast<std::size_t>(nr_);
  for (std::size_t guard = 0; guard < limit; ++guard) {
    if (!connected) {
      if (j >= 0 && index_of(j) >= 0 &&
          static_cast<double>(by_key(j).size()) >= kSplitCloseThreshold * nr_) {
        complete_chain_using_2_support_ring(by_key(inward), by_key(outward),
                                            chains_[static_cast<std::size_t>(index_of(j))], cy_, cx_);
        return true;
      }
      j = -1;
      for (long key : within_chains(inward, outward)) {
        if (!processed.count(key)) {
          j = key;
          break;
        }
      }
      if (j < 0) return false;
      processed.insert(j);
    }
    const auto within = within_chains(inward, outward);
    const Candidate ca = best_neighbour(inward, outward, j, Endpoint::A, within);
    const Candidate cb = best_neighbour(inward, outward, j, Endpoint::B, within);
    connected = ca.valid || cb.valid;
    if (!connected) continue;
    if (ca.valid && (!cb.valid || ca.radial_diff <= cb.radial_diff)) {
      connect_piece(inward, outward, j, Endpoint::A, ca.piece);
    } else {
      connect_piece(inward, outward, j, Endpoint::B, cb.piece);
    }
  }
  return false;
}

bool Postprocessor::connect_chains_if_there_is_enough_data(long inward, long outward) {
  const auto within = within_chains(inward, outward);
  if (within.empty()) return false;
  const Chain& in = by_key(inward);
  const Chain& out = by_key(outward);
  const ConnectParams& p = connect_schedule().back();
  const long src = within.front();
  const auto src_off = offsets_to(by_key(src), in);
  std::vector<long> chosen{src};
  for (std::size_t i = 1; i < within.size(); ++i) {
    const Chain& c = by_key(within[i]);
    bool clash = false;
    for (long k : chosen) clash = clash || chains_intersect(c, by_key(k));
    if (clash) continue;
    const auto off = offsets_to(c, in);
    if (!similar_radial_distances(src_off, off, p.th_distribution_size) &&
        !radial_tolerance(mean_of(src_off), mean_of(off), p.th_radial_tolerance)) {
      continue;
    }
    chosen.push_back(within[i]);
  }
  std::size_t covered = 0;
  for (long k : chosen) covered += by_key(k).size();
  if (static_cast<double>(covered) * 360.0 / nr_ <= kInformationThreshold) return false;

  std::sort(chosen.begin(), chosen.end(), [&](long a, long b) { return by_key(a).b().ray < by_key(b).b().ray; });
  std::vector<Node> nodes;
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    const Chain& c = by_key(chosen[i]);
    const Chain& next = by_key(chosen[(i + 1) % chosen.size()]);
    nodes.insert(nodes.end(), c.nodes().begin(), c.nodes().end());
    const auto bridge = interpolate_between_rings(c.a(), next.b(), in, out, nr_, cy_, cx_);
    nodes.insert(nodes.end(), bridge.begin(), bridge.end());
  }
  Chain ring(-1, nr_, ChainKind::normal, std::move(nodes));
  ring.key = src;
  std::vector<Chain> kept;
  for (auto& c : chains_) {
    if (std::find(chosen.begin(), chosen.end(), c.key) == chosen.end()) kept.push_back(std::move(c));
  }
  kept.push_back(std::move(ring));
  chains_ = std::move(kept);
  renumber();
  return true;
}

void Postprocessor::complete_chains_if_required() {
  const auto rings = closed_rings();
  for (auto& c : chains_) {
    if (c.kind() != ChainKind::normal || c.closed() || static_cast<double>(c.size()) < kFillThreshold * nr_) {
      continue;
    }
    for (std::size_t r = 1; r < rings.size(); ++r) {
      const Chain& in = by_key(rings[r - 1]);
      const Chain& out = by_key(rings[r]);
      if (chain_within(c, in, out)) {
        complete_chain_using_2_support_ring(in, out, c, cy_, cx_);
        break;
      }
    }
  }
}

void Postprocessor::run() {
  const std::size_t bound = std::max<std::size_t>(chains_.size() * chains_.size(), 1);
  std::size_t iterations = 0;
  std::size_t start = 1;
  bool changed = true;
  while (changed && iterations++ < bound) {
    changed = false;
    const auto rings = closed_rings();
    for (std::size_t r = std::max<std::size_t>(start, 1); r < rings.size(); ++r) {
      if (split_and_connect_chains(rings[r - 1], rings[r])) {
        changed = true;
        start = r;
        break;
      }
    }
  }
  start = 1;
  changed = true;
  while (changed && iterations++ < 2 * bound) {
    changed = false;
    const auto rings = closed_rings();
    for (std::size_t r = std::max<std::size_t>(start, 1); r < rings.size(); ++r) {
      if (connect_chains_if_there_is_enough_data(rings[r - 1], rings[r])) {
        changed = true;
        start = r;
        break;
      }
    }
  }
  complete_chains_if_required();
}

std::vector<Chain> postprocess(std::vector<Chain> chains, int nr, double cy, double cx) {
  Postprocessor p(std::move(chains), nr, cy, cx);
  p.run();
  return p.take();
}

std::vector<Chain> final_rings(const std::vector<Chain>& chains) {
  std::vector<Chain> rings;
  for (const auto& c : chains) {
    if (c.kind() == ChainKind::normal && c.closed()) rings.push_back(c);
  }
  std::stable_sort(rings.begin(), rings.end(),
                   [](const Chain& a, const Chain& b) { return a.mean_radius() < b.mean_radius(); });
  return rings;
}

}  // namespace cstrd
