#include "cstrd/chain_connect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cstrd/errors.hpp"

namespace cstrd {

namespace {

using Idx = std::size_t;

Endpoint opposite(Endpoint e) { return e == Endpoint::A ? Endpoint::B : Endpoint::A; }

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double pop_std(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double m = mean(v);
  double acc = 0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

// Up to `count` nodes next to an endpoint, ordered clockwise.
std::vector<Node> window(const Chain& c, Endpoint e, int count) {
  const auto& n = c.nodes();
  const auto take = std::min<std::size_t>(static_cast<std::size_t>(count), n.size());
  if (e == Endpoint::A) return {n.end() - static_cast<long>(take), n.end()};
  return {n.begin(), n.begin() + static_cast<long>(take)};
}

std::vector<double> radii_of(const std::vector<Node>& nodes) {
  std::vector<double> r;
  r.reserve(nodes.size());
  for (const auto& n : nodes) r.push_back(n.radius);
  return r;
}

double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

double endpoint_angle(const Chain& j, const Chain& k, Endpoint ep, int nr) {
  return ep == Endpoint::A ? angular_distance(ray_angle(k.b().ray, nr), ray_angle(j.a().ray, nr))
                           : angular_distance(ray_angle(j.b().ray, nr), ray_angle(k.a().ray, nr));
}

bool closer(const SystemState& s, int a, int b) {
  const auto sa = s.chains[static_cast<Idx>(a)].size(), sb = s.chains[static_cast<Idx>(b)].size();
  return sa != sb ? sa > sb : a < b;
}

}  // namespace

const std::array<ConnectParams, 9>& connect_schedule() {
  static const std::array<ConnectParams, 9> schedule{{
      {0.1, 2, 1.5, 10, false},
      {0.2, 2, 1.5, 10, false},
      {0.1, 3, 1.5, 22, false},
      {0.2, 3, 1.5, 22, false},
      {0.1, 3, 1.5, 45, false},
      {0.2, 3, 1.5, 45, false},
      {0.1, 2, 2.0, 22, true},
      {0.2, 3, 2.0, 45, true},
      {0.2, 3, 2.0, 45, true},
  }};
  return schedule;
}

void IntersectionMatrix::remove(std::size_t k) {
  std::vector<std::uint8_t> next;
  next.reserve((n_ - 1) * (n_ - 1));
  for (std::size_t i = 0; i < n_; ++i) {
    if (i == k) continue;
    for (std::size_t j = 0; j < n_; ++j) {
      if (j != k) next.push_back(m_[i * n_ + j]);
    }
  }
  --n_;
  m_ = std::move(next);
}

bool chains_intersect(const Chain& a, const Chain& b) {
  if (a.size() == 0 || b.size() == 0) return false;
  if (a.closed() || b.closed()) return true;
  const int nr = a.nr();
  const int sa = a.b().ray, sb = b.b().ray;
  return wrap_ray(sb - sa, nr) < static_cast<int>(a.size()) || wrap_ray(sa - sb, nr) < static_cast<int>(b.size());
}

IntersectionMatrix compute_intersection_matrix(const std::vector<Chain>& chains) {
  IntersectionMatrix m(chains.size());
  for (std::size_t j = 0; j < chains.size(); ++j) {
    for (std::size_t k = j + 1; k < chains.size(); ++k) m.set(j, k, chains_intersect(chains[j], chains[k]));
  }
  return m;
}

double support_radius(const Chain& support, int ray) {
  if (const Node* n = support.at_ray(ray)) return n->radius;
  const int nr = support.nr();
  const int to_b = std::min(wrap_ray(support.b().ray - ray, nr), wrap_ray(ray - support.b().ray, nr));
  const int to_a = std::min(wrap_ray(support.a().ray - ray, nr), wrap_ray(ray - support.a().ray, nr));
  return to_a < to_b ? support.a().radius : support.b().radius;
}

bool similar_radial_distances(const std::vector<double>& set_j, const std::vector<double>& set_k, double th) {
  const double mj = mean(set_j), sj = pop_std(set_j);
  const double mk = mean(set_k), sk = pop_std(set_k);
  const double lo = std::max(mj - th * sj, mk - th * sk);
  const double hi = std::min(mj + th * sj, mk + th * sk);
  return lo <= hi;
}

bool radial_tolerance(double dr_j, double dr_k, double th) {
  return dr_j * (1.0 - th) <= dr_k && dr_k <= dr_j * (1.0 + th);
}

std::vector<double> radial_derivative(const std::vector<double>& r) {
  const std::size_t n = r.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  d[0] = std::abs(r[1] - r[0]);
  d[n - 1] = std::abs(r[n - 1] - r[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = std::abs(r[i + 1] - r[i - 1]) / 2.0;
  return d;
}

bool regular_derivative(const std::vector<double>& window_j, const std::vector<double>& bridge,
                        const std::vector<double>& window_k, double th) {
  std::vector<double> joint;
  if (!window_j.empty()) joint.push_back(window_j.back());
  joint.insert(joint.end(), bridge.begin(), bridge.end());
  if (!window_k.empty()) joint.push_back(window_k.front());
  const double existing = std::max(max_of(radial_derivative(window_j)), max_of(radial_derivative(window_k)));
  return max_of(radial_derivative(joint)) <= th * existing;
}

int gap_size(int from_ray, int to_ray, int nr) {
  const int d = wrap_ray(to_ray - from_ray, nr);
  return (d == 0 ? nr : d) - 1;
}

std::vector<Node> interpolate_nodes(const Node& left, const Node& right, const Chain* support, int nr,
                                    double cy, double cx) {
  const int g = gap_size(left.ray, right.ray, nr);
  const double dl = support ? left.radius - support_radius(*support, left.ray) : left.radius;
  const double dr = support ? right.radius - support_radius(*support, right.ray) : right.radius;
  std::vector<Node> out;
  out.reserve(static_cast<std::size_t>(std::max(g, 0)));
  for (int t = 1; t <= g; ++t) {
    const int ray = wrap_ray(left.ray + t, nr);
    const double f = static_cast<double>(t) / (g + 1);
    const double base = support ? support_radius(*support, ray) : 0.0;
    const double rho = std::max(0.0, base + dl + (dr - dl) * f);
    const Point p = polar_point(cy, cx, ray, nr, rho);
    out.push_back({p.x, p.y, ray, rho, -1});
  }
  return out;
}

SystemState::SystemState(std::vector<Chain> input, int nr_, double cy_, double cx_)
    : chains(std::move(input)), nr(nr_), cy(cy_), cx(cx_) {
  for (std::size_t i = 0; i < chains.size(); ++i) {
    chains[i].set_id(static_cast<int>(i));
    chains[i].key = next_key_++;
  }
  m = compute_intersection_matrix(chains);
}

int SystemState::index_of(long key) const {
  for (std::size_t i = 0; i < chains.size(); ++i) {
    if (chains[i].key == key) return static_cast<int>(i);
  }
  return -1;
}

const RayOccupancy& SystemState::occupancy() {
  if (!occ_ || occ_version_ != version_) {
    occ_.emplace(chains, nr);
    occ_version_ = version_;
  }
  return *occ_;
}

std::pair<Node, Node> SystemState::junction(int j, int k, Endpoint ep) const {
  const Chain& cj = chains[static_cast<Idx>(j)];
  const Chain& ck = chains[static_cast<Idx>(k)];
  return ep == Endpoint::A ? std::pair{cj.a(), ck.b()} : std::pair{ck.a(), cj.b()};
}

std::vector<Node> SystemState::bridge(int j, int k, Endpoint ep, int support) const {
  const auto [left, right] = junction(j, k, ep);
  const Chain& sup = chains[static_cast<Idx>(support)];
  const bool polar = params.derivative_from_center || sup.kind() == ChainKind::center;
  return interpolate_nodes(left, right, polar ? nullptr : &sup, nr, cy, cx);
}

bool SystemState::check_endpoints(int support, int j, int k, Endpoint ep) const {
  const Chain& sup = chains[static_cast<Idx>(support)];
  if (sup.closed()) return true;
  const auto [left, right] = junction(j, k, ep);
  const int span = wrap_ray(right.ray - left.ray, nr);
  for (int t = 0; t <= span; ++t) {
    if (!sup.covers(wrap_ray(left.ray + t, nr))) return false;
  }
  return true;
}

Goodness pair_goodness(const Chain& cj, const Chain& ck, Endpoint ep, const Chain& sup,
                       const std::vector<Node>& bridge_nodes, const ConnectParams& params) {
  Goodness g;
  const auto wj = window(cj, ep, kWindowNodes);
  const auto wk = window(ck, opposite(ep), kWindowNodes);
  auto offsets = [&](const std::vector<Node>& w) {
    std::vector<double> d;
    d.reserve(w.size());
    for (const auto& n : w) d.push_back(std::abs(n.radius - support_radius(sup, n.ray)));
    return d;
  };
  const auto dj = offsets(wj), dk = offsets(wk);
  g.distribution_distance = std::abs(mean(dj) - mean(dk));
  if (static_cast<int>(cj.size() + ck.size()) > cj.nr()) return g;

  const Node& ej = cj.endpoint(ep);
  const Node& ek = ck.endpoint(opposite(ep));
  const double drj = std::abs(ej.radius - support_radius(sup, ej.ray));
  const double drk = std::abs(ek.radius - support_radius(sup, ek.ray));
  const bool close = similar_radial_distances(dj, dk, params.th_distribution_size) ||
                     radial_tolerance(drj, drk, params.th_radial_tolerance);
  if (!close) return g;

  // derivative check runs along the junction, left to right
  const auto br = radii_of(bridge_nodes);
  const auto rj = radii_of(wj), rk = radii_of(wk);
  g.ok = ep == Endpoint::A ? regular_derivative(rj, br, rk, params.th_regular_derivative)
                           : regular_derivative(rk, br, rj, params.th_regular_derivative);
  return g;
}

Goodness SystemState::connectivity_goodness(int j, int k, int support, Endpoint ep) const {
  const Chain& cj = chains[static_cast<Idx>(j)];
  const Chain& ck = chains[static_cast<Idx>(k)];
  if (static_cast<int>(cj.size() + ck.size()) > nr || !check_endpoints(support, j, k, ep)) {
    Goodness g = pair_goodness(cj, ck, ep, chains[static_cast<Idx>(support)], {}, params);
    g.ok = false;
    return g;
  }
  return pair_goodness(cj, ck, ep, chains[static_cast<Idx>(support)], bridge(j, k, ep, support), params);
}

bool SystemState::exist_chain_overlapping(const std::vector<Node>& nodes, int j, int k, int support) {
  const RayOccupancy& occ = occupancy();
  const Chain& sup = chains[static_cast<Idx>(support)];
  for (const auto& n : nodes) {
    const double half = params.th_radial_tolerance * std::abs(n.radius - support_radius(sup, n.ray));
    for (const auto& [radius, owner] : occ.at(n.ray)) {
      if (owner == j || owner == k || owner == support) continue;
      if (std::abs(radius - n.radius) <= half) return true;
    }
  }
  return false;
}

void SystemState::refresh_row(int j) {
  for (std::size_t i = 0; i < chains.size(); ++i) {
    m.set(static_cast<Idx>(j), i, i == static_cast<Idx>(j) || chains_intersect(chains[static_cast<Idx>(j)], chains[i]));
  }
}

int SystemState::merge(int j, int k, const std::vector<Node>& bridge_nodes) {
  std::vector<Node> extra = bridge_nodes;
  const auto& kn = chains[static_cast<Idx>(k)].nodes();
  extra.insert(extra.end(), kn.begin(), kn.end());
  chains[static_cast<Idx>(j)].add_nodes(extra);
  chains.erase(chains.begin() + k);
  m.remove(static_cast<Idx>(k));
  if (j > k) --j;
  for (std::size_t i = static_cast<Idx>(k); i < chains.size(); ++i) chains[i].set_id(static_cast<int>(i));
  refresh_row(j);
  ++version_;
  if (on_merge) on_merge(*this);
  return j;
}

void SystemState::add_to_chain(int j, const std::vector<Node>& extra) {
  chains[static_cast<Idx>(j)].add_nodes(extra);
  refresh_row(j);
  ++version_;
}

namespace {

int closest_by_radial_distance(const SystemState& s, int j, Endpoint ep, int candidate, double distance,
                               const std::vector<std::pair<double, int>>& neighbourhood, int support) {
  int best = candidate;
  double best_d = distance;
  for (const auto& [angle, c] : neighbourhood) {
    if (c == candidate || !s.m(static_cast<Idx>(candidate), static_cast<Idx>(c))) continue;
    const Goodness g = s.connectivity_goodness(j, c, support, ep);
    if (g.ok && (g.distribution_distance < best_d || (g.distribution_distance == best_d && c < best))) {
      best = c;
      best_d = g.distribution_distance;
    }
  }
  return best;
}

int get_closest_chain(const SystemState& s, int j, const std::vector<int>& no_intersection, int support,
                      Endpoint ep) {
  const Chain& cj = s.chains[static_cast<Idx>(j)];
  std::vector<std::pair<double, int>> neighbourhood;
  for (int c : no_intersection) {
    const Chain& ck = s.chains[static_cast<Idx>(c)];
    if (c == j || ck.kind() != ChainKind::normal) continue;
    const double d = endpoint_angle(cj, ck, ep, s.nr);
    if (d <= s.params.neighbourhood_size) neighbourhood.emplace_back(d, c);
  }
  std::sort(neighbourhood.begin(), neighbourhood.end());
  for (const auto& [angle, c] : neighbourhood) {
    const Goodness g = s.connectivity_goodness(j, c, support, ep);
    if (g.ok) return closest_by_radial_distance(s, j, ep, c, g.distribution_distance, neighbourhood, support);
  }
  return -1;
}

std::vector<int> non_intersecting(const SystemState& s, const std::vector<int>& candidates, int j) {
  std::vector<int> out;
  for (int c : candidates) {
    if (!s.m(static_cast<Idx>(j), static_cast<Idx>(c))) out.push_back(c);
  }
  return out;
}

}  // namespace

int get_closest_chain_logic(SystemState& s, const std::vector<int>& candidates, int j,
                            const std::vector<int>& no_intersection_j, int support, Endpoint ep) {
  const int k = get_closest_chain(s, j, no_intersection_j, support, ep);
  if (k < 0) return -1;
  if (static_cast<int>(s.chains[static_cast<Idx>(j)].size() + s.chains[static_cast<Idx>(k)].size()) > s.nr) return -1;
  const int back = get_closest_chain(s, k, non_intersecting(s, candidates, k), support, opposite(ep));
  return back == j ? k : -1;
}

bool fill_chain_if_no_overlap(SystemState& s, int j) {
  const Chain& c = s.chains[static_cast<Idx>(j)];
  if (c.kind() != ChainKind::normal || c.closed() ||
      static_cast<double>(c.size()) < kFillThreshold * s.nr) {
    return false;
  }
  const RayOccupancy& occ = s.occupancy();
  const Node a = c.a(), b = c.b();
  const int ai = occ.neighbour(a.ray, a.radius, j, Direction::inward);
  const int bi = occ.neighbour(b.ray, b.radius, j, Direction::inward);
  const int ao = occ.neighbour(a.ray, a.radius, j, Direction::outward);
  const int bo = occ.neighbour(b.ray, b.radius, j, Direction::outward);
  int support = -1;
  if (ai >= 0 && ai == bi) {
    support = ai;
  } else if (ao >= 0 && ao == bo) {
    support = ao;
  } else {
    for (std::size_t i = 0; i < s.chains.size(); ++i) {
      if (s.chains[i].kind() == ChainKind::center) support = static_cast<int>(i);
    }
  }
  const Chain* sup = support >= 0 ? &s.chains[static_cast<Idx>(support)] : nullptr;
  const bool polar = !sup || s.params.derivative_from_center || sup->kind() == ChainKind::center;
  const auto nodes = interpolate_nodes(a, b, polar ? nullptr : sup, s.nr, s.cy, s.cx);
  if (support >= 0 && s.exist_chain_overlapping(nodes, j, j, support)) return false;
  s.add_to_chain(j, nodes);
  return true;
}

void connect_chains_main_logic(SystemState& s) {
  auto by_size = [&](long ka, long kb) { return closer(s, s.index_of(ka), s.index_of(kb)); };
  std::vector<long> order;
  for (const auto& c : s.chains) order.push_back(c.key);
  std::sort(order.begin(), order.end(), by_size);
  auto position = [&](long key) {
    return static_cast<std::size_t>(std::find(order.begin(), order.end(), key) - order.begin());
  };

  std::size_t next_index = 0;
  std::size_t since_change = 0;
  while (since_change < s.chains.size() && !order.empty()) {
    next_index %= order.size();
    const long support_key = order[next_index];
    const std::size_t size_init = s.chains.size();
    fill_chain_if_no_overlap(s, s.index_of(support_key));

    std::array<std::vector<long>, 2> lists;
    for (int side = 0; side < 2; ++side) {
      const Direction dir = side == 0 ? Direction::inward : Direction::outward;
      for (int idx : visible_chains(s.chains, s.occupancy(), s.index_of(support_key), dir)) {
        lists[static_cast<Idx>(side)].push_back(s.chains[static_cast<Idx>(idx)].key);
      }
      std::sort(lists[static_cast<Idx>(side)].begin(), lists[static_cast<Idx>(side)].end(), by_size);
    }

    for (auto& list : lists) {
      std::size_t p = 0;
      while (p < list.size()) {
        const long j_key = list[p];
        const int j = s.index_of(j_key);
        const int support = s.index_of(support_key);
        std::vector<int> candidates;
        for (long key : list) candidates.push_back(s.index_of(key));
        const auto no_inter = non_intersecting(s, candidates, j);
        const int kb = get_closest_chain_logic(s, candidates, j, no_inter, support, Endpoint::B);
        const int ka = get_closest_chain_logic(s, candidates, j, no_inter, support, Endpoint::A);
        int k = -1;
        Endpoint ep = Endpoint::A;
        if (ka >= 0 && kb >= 0) {
          const double da = endpoint_angle(s.chains[static_cast<Idx>(j)], s.chains[static_cast<Idx>(ka)], Endpoint::A, s.nr);
          const double db = endpoint_angle(s.chains[static_cast<Idx>(j)], s.chains[static_cast<Idx>(kb)], Endpoint::B, s.nr);
          k = da <= db ? ka : kb;
          ep = da <= db ? Endpoint::A : Endpoint::B;
        } else if (ka >= 0) {
          k = ka;
        } else if (kb >= 0) {
          k = kb;
          ep = Endpoint::B;
        }

        bool merged = false;
        if (k >= 0 && k != support &&
            static_cast<int>(s.chains[static_cast<Idx>(j)].size() + s.chains[static_cast<Idx>(k)].size()) <= s.nr) {
          const auto br = s.bridge(j, k, ep, support);
          if (!s.exist_chain_overlapping(br, j, k, support)) {
            const long k_key = s.chains[static_cast<Idx>(k)].key;
            s.merge(j, k, br);
            for (auto& l : lists) l.erase(std::remove(l.begin(), l.end(), k_key), l.end());
            order.erase(std::remove(order.begin(), order.end(), k_key), order.end());
            merged = true;
          }
        }
        if (merged) {
          p = static_cast<std::size_t>(std::find(list.begin(), list.end(), j_key) - list.begin());
        } else {
          ++p;
        }
      }
    }

    if (s.chains.size() != size_init) {
      std::sort(order.begin(), order.end(), by_size);
      std::vector<long> current{support_key};
      for (const auto& l : lists) current.insert(current.end(), l.begin(), l.end());
      std::stable_sort(current.begin(), current.end(), by_size);
      const long longest = current.front();
      next_index = longest == support_key ? position(support_key) + 1 : position(longest);
      since_change = 0;
    } else {
      next_index = position(support_key) + 1;
      ++since_change;
    }
  }

  for (std::size_t i = 0; i < s.chains.size(); ++i) fill_chain_if_no_overlap(s, static_cast<int>(i));
}

std::vector<Chain> connect_chains(std::vector<Chain> chains, int nr, double cy, double cx,
                                  const ConnectObserver* observer) {
  SystemState s(std::move(chains), nr, cy, cx);
  if (observer && observer->on_merge) s.on_merge = observer->on_merge;
  int step = 0;
  for (const auto& p : connect_schedule()) {
    s.params = p;
    connect_chains_main_logic(s);
    if (observer && observer->on_step) observer->on_step(step, s.chains.size());
    ++step;
  }
  return std::move(s.chains);
}

}  // namespace cstrd
