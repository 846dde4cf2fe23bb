// Acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cstrd/chain_connect.hpp"
#include "cstrd/devernay.hpp"
#include "cstrd/edge_filter.hpp"
#include "cstrd/geometry.hpp"
#include "cstrd/metrics.hpp"
#include "cstrd/pipeline.hpp"
#include "cstrd/sampling.hpp"
#include "cstrd/synthetic.hpp"

using namespace cstrd;

namespace {

int failures = 0;

void report(const char* name, bool pass, const std::string& detail) {
  std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  failures += !pass;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Invariant tallies over every pipeline run.
struct Invariants {
  int runs = 0;
  int crossing = 0;
  int open_rings = 0;
  int bad_delta = 0;
  long checked_points = 0;
  int count_grew = 0;
};

struct DiskResult {
  MetricsReport m;
  double seconds = 0;
};

DiskResult run_disk(std::uint64_t seed, bool deformed, bool perturbed, Invariants& inv) {
  std::mt19937_64 g(seed * 7919);
  const int n = 8 + static_cast<int>(g() % 18);
  DiskSpec s;
  s.radii = random_radii(n, 700, seed);
  s.size = 1500;
  s.seed = seed;
  if (deformed) s.deformation = 0.1;
  s.crack = s.stain = s.gap = perturbed;
  const auto disk = generate_disk(s);

  std::size_t last = ~std::size_t{0};
  ConnectObserver obs;
  auto track = [&](std::size_t count) {
    if (count > last) ++inv.count_grew;
    last = count;
  };
  obs.on_merge = [&](const SystemState& st) { track(st.chains.size()); };
  obs.on_step = [&](int, std::size_t count) { track(count); };

  const DetectParams params;
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = detect_rings(disk.image, disk.cy, disk.cx, params, &obs);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  ++inv.runs;
  const int nr = params.nr;
  for (const auto& ring : r.rings) inv.open_rings += static_cast<int>(ring.size()) != nr;
  // same radial order on every ray
  bool crossed = false;
  for (int ray = 0; ray < nr && !crossed; ++ray) {
    for (std::size_t i = 0; i + 1 < r.rings.size(); ++i) {
      const Node* a = r.rings[i].at_ray(ray);
      const Node* b = r.rings[i + 1].at_ray(ray);
      if (!a || !b || !(a->radius < b->radius)) {
        crossed = true;
        break;
      }
    }
  }
  inv.crossing += crossed;

  const auto grad = detect_edges(r.preprocessed.gray, {params.sigma, params.th_low, params.th_high}).gradient;
  for (const auto& c : r.filtered) {
    if (c.kind != CurveKind::devernay) continue;
    for (const auto& p : c.points) {
      const double d = ray_gradient_angle(p, r.preprocessed.cy, r.preprocessed.cx, grad);
      inv.bad_delta += !(d >= 0 && d < params.alpha);
      ++inv.checked_points;
    }
  }

  std::vector<RingPolyline> dt, gt;
  for (const auto& c : r.rings) dt.push_back(ring_from_chain(c));
  for (const auto& p : disk.rings) gt.push_back(rasterize_polygon(p, disk.cy, disk.cx, nr));
  const auto m = evaluate_rings(dt, gt, kDefaultThPre, ray_lengths(nr, 1500, 1500, disk.cy, disk.cx));
  return {m, secs};
}

void criterion_clean(Invariants& inv) {
  bool ok = true;
  double worst_rmse = 0, worst_time = 0, min_f = 1;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto r = run_disk(seed, false, false, inv);
    ok = ok && r.m.f_score == 1.0 && r.m.rmse <= 1.5 && r.seconds <= 60;
    worst_rmse = std::max(worst_rmse, r.m.rmse);
    worst_time = std::max(worst_time, r.seconds);
    min_f = std::min(min_f, r.m.f_score);
  }
  report("1 clean disks", ok,
         fmt("20 disks, min F %.3f, max RMSE %.3f px, max time %.2f s", min_f, worst_rmse, worst_time));
}

void criterion_mean_f(const char* name, bool deformed, bool perturbed, double threshold, Invariants& inv) {
  double sum = 0, min_f = 1;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto r = run_disk(seed, deformed, perturbed, inv);
    sum += r.m.f_score;
    min_f = std::min(min_f, r.m.f_score);
  }
  report(name, sum / 20 >= threshold, fmt("mean F %.3f over 20 seeds (min %.3f, need >= %.2f)", sum / 20, min_f, threshold));
}

void criterion_devernay() {
  double sum = 0, worst = 0;
  long count = 0;
  const int n = 800;
  const double c = 400.3;
  for (double R : {30.4, 50.3, 150.7, 300.2, 371.9}) {
    // anti-aliased step disk, dark inside
    FloatImage img(n, n);
    constexpr int ss = 8;
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        const double d = std::hypot(x - c, y - c);
        if (d < R - 2 || d > R + 2) {
          img(y, x) = d < R ? 40.0 : 200.0;
          continue;
        }
        int in = 0;
        for (int a = 0; a < ss; ++a) {
          for (int b = 0; b < ss; ++b) in += std::hypot(x - 0.5 + (a + 0.5) / ss - c, y - 0.5 + (b + 0.5) / ss - c) < R;
        }
        img(y, x) = 40.0 + 160.0 * (1.0 - in / static_cast<double>(ss * ss));
      }
    }
    for (const auto& curve : detect_edges(img).curves) {
      for (const auto& p : curve.points) {
        const double e = std::abs(std::hypot(p.x - c, p.y - c) - R);
        sum += e;
        worst = std::max(worst, e);
        ++count;
      }
    }
  }
  const double mean = count ? sum / static_cast<double>(count) : INFINITY;
  report("4 devernay accuracy", count > 0 && mean < 0.2 && worst < 0.5,
         fmt("%ld points, mean %.4f px, max %.4f px", count, mean, worst));
}

std::vector<Chain> broken_rings(std::mt19937_64& rng, int rings, int max_chains) {
  constexpr double c = 500;
  std::uniform_int_distribution<int> pieces(1, 4), gap(1, 6);
  std::uniform_real_distribution<double> wobble(-1.0, 1.0);
  std::vector<Chain> chains;
  for (int r = 0; r < rings && static_cast<int>(chains.size()) < max_chains; ++r) {
    const double radius = 60.0 + 40.0 * r + wobble(rng);
    const int n = pieces(rng);
    int start = static_cast<int>(rng() % 360);
    for (int p = 0; p < n && static_cast<int>(chains.size()) < max_chains; ++p) {
      const int len = 360 / n - gap(rng);
      std::vector<Node> nodes;
      const int id = static_cast<int>(chains.size());
      for (int t = 0; t < len; ++t) {
        const int ray = wrap_ray(start + t, 360);
        const double rr = radius + 0.5 * std::sin(ray * 0.1);
        const Point q = polar_point(c, c, ray, 360, rr);
        nodes.push_back({q.x, q.y, ray, rr, id});
      }
      chains.emplace_back(id, 360, ChainKind::normal, nodes);
      start += 360 / n;
    }
  }
  chains.push_back(make_center_chain(static_cast<int>(chains.size()), 360, c, c));
  return chains;
}

// Shares a ray, written without the chain helpers.
bool share_ray(const Chain& a, const Chain& b) {
  std::vector<char> seen(static_cast<std::size_t>(a.nr()), 0);
  for (const auto& n : a.nodes()) seen[static_cast<std::size_t>(n.ray)] = 1;
  for (const auto& n : b.nodes()) {
    if (seen[static_cast<std::size_t>(n.ray)]) return true;
  }
  return false;
}

bool matrix_oracle() {
  std::mt19937_64 rng(2024);
  long merges = 0, mismatches = 0;
  for (int trial = 0; trial < 60; ++trial) {
    auto chains = broken_rings(rng, 3 + trial % 7, 29);
    ConnectObserver obs;
    obs.on_merge = [&](const SystemState& s) {
      ++merges;
      for (std::size_t j = 0; j < s.chains.size(); ++j) {
        for (std::size_t k = 0; k < s.chains.size(); ++k) {
          const bool want = j == k || share_ray(s.chains[j], s.chains[k]);
          mismatches += s.m(j, k) != want;
        }
      }
    };
    connect_chains(chains, 360, 500, 500, &obs);
  }
  std::printf("  5a: %ld merges checked, %ld mismatches\n", merges, mismatches);
  return merges > 0 && mismatches == 0;
}

RingPolyline constant_ring(double r, int nr) { return {std::vector<double>(static_cast<std::size_t>(nr), r)}; }

// Enumerate every matching; keep those without a blocking pair.
std::vector<std::vector<int>> stable_matchings(const std::vector<RingPolyline>& dt, const std::vector<RingPolyline>& gt,
                                               const InfluencePartition& part, double th) {
  const std::size_t G = gt.size(), D = dt.size();
  std::vector<std::vector<double>> dist(G, std::vector<double>(D, INFINITY));
  for (std::size_t g = 0; g < G; ++g) {
    for (std::size_t d = 0; d < D; ++d) {
      if (inside_percentage(dt[d], part, g) >= th) dist[g][d] = ring_distance(dt[d], gt[g]);
    }
  }
  std::vector<std::vector<int>> stable;
  std::vector<int> cur(G, -1);
  std::vector<char> used(D, 0);
  std::function<void(std::size_t)> rec = [&](std::size_t g) {
    if (g == G) {
      for (std::size_t a = 0; a < G; ++a) {
        for (std::size_t d = 0; d < D; ++d) {
          if (std::isinf(dist[a][d])) continue;
          const double mine = cur[a] < 0 ? INFINITY : dist[a][static_cast<std::size_t>(cur[a])];
          double theirs = INFINITY;
          for (std::size_t b = 0; b < G; ++b) {
            if (cur[b] == static_cast<int>(d)) theirs = dist[b][d];
          }
          if (dist[a][d] < mine && dist[a][d] < theirs) return;
        }
      }
      stable.push_back(cur);
      return;
    }
    rec(g + 1);
    for (std::size_t d = 0; d < D; ++d) {
      if (used[d] || std::isinf(dist[g][d])) continue;
      used[d] = 1;
      cur[g] = static_cast<int>(d);
      rec(g + 1);
      cur[g] = -1;
      used[d] = 0;
    }
  };
  rec(0);
  return stable;
}

bool matcher_oracle() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> jitter(-12, 12), wiggle(-3, 3);
  int trials = 0, bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int G = 1 + trial % 5, D = 1 + (trial / 5) % 7;
    std::vector<RingPolyline> gt, dt;
    for (int g = 0; g < G; ++g) gt.push_back(constant_ring(40.0 * (g + 1), 36));
    for (int d = 0; d < D; ++d) {
      RingPolyline r;
      const double base = 40.0 * (1 + static_cast<int>(rng() % G)) + jitter(rng);
      for (int k = 0; k < 36; ++k) r.radii.push_back(base + wiggle(rng));
      dt.push_back(r);
    }
    const auto part = build_influence_partition(gt);
    const auto want = stable_matchings(dt, gt, part, kDefaultThPre);
    ++trials;
    bad += want.size() != 1 || assign_detections(dt, gt, part, kDefaultThPre) != want[0];
  }
  std::printf("  5b: %d instances, %d disagreements\n", trials, bad);
  return bad == 0;
}

std::vector<Point> brute_force(const Ray& ray, const std::vector<Point>& pts) {
  const double ux = ray.tip.x - ray.origin.x, uy = ray.tip.y - ray.origin.y;
  std::vector<std::pair<double, Point>> hits;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double dx = pts[i + 1].x - pts[i].x, dy = pts[i + 1].y - pts[i].y;
    const double den = ux * (-dy) - uy * (-dx);
    if (den == 0) continue;
    const double rx = pts[i].x - ray.origin.x, ry = pts[i].y - ray.origin.y;
    const double l = (rx * (-dy) - ry * (-dx)) / den;
    const double s = (ux * ry - uy * rx) / den;
    if (s < 0 || s >= 1 || l <= 0 || l > 1 + 1e-12) continue;
    hits.push_back({l, {ray.origin.x + l * ux, ray.origin.y + l * uy}});
  }
  std::sort(hits.begin(), hits.end(), [](auto& a, auto& b) { return a.first < b.first; });
  std::vector<Point> out;
  for (auto& h : hits) out.push_back(h.second);
  return out;
}

bool crossing_oracle() {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> coord(0, 300);
  std::uniform_int_distribution<int> len(2, 12);
  const auto rays = build_rays(360, 301, 301, 150.5, 150.25);
  long total = 0, bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    EdgeCurve c;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) c.points.push_back({coord(rng), coord(rng)});
    for (const auto& r : rays) {
      const auto got = ray_curve_intersections(r, c);
      const auto want = brute_force(r, c.points);
      total += static_cast<long>(want.size());
      if (got.size() != want.size()) {
        ++bad;
        continue;
      }
      for (std::size_t i = 0; i < got.size(); ++i) {
        bad += std::abs(got[i].x - want[i].x) > 1e-9 || std::abs(got[i].y - want[i].y) > 1e-9;
      }
    }
  }
  std::printf("  5c: 1000 polylines, %ld crossings, %ld mismatches\n", total, bad);
  return total > 0 && bad == 0;
}

double round_to(double v, int digits) {
  const double s = std::pow(10.0, digits);
  return std::round(v * s) / s;
}

bool near(double a, double b) { return std::abs(a - b) < 1e-9; }

void criterion_metric_rows() {
  struct Row {
    const char* name;
    int tp, fp, fn;
    double p3, r3, f3;  // three-decimal reference
    double p2, r2, f2;  // two-decimal values
  };
  const Row rows[] = {{"F02c", 21, 0, 1, 1.00, 0.955, 0.977, 1.00, 0.96, 0.98},
                      {"AbiesAlba5", 30, 1, 0, 0.968, 1.00, 0.984, 0.97, 1.00, 0.98}};
  bool ok = true;
  std::string detail;
  for (const auto& row : rows) {
    MetricsReport m;
    m.tp = row.tp;
    m.fp = row.fp;
    m.fn = row.fn;
    fill_scores(m);
    const double p3 = round_to(m.precision, 3), r3 = round_to(m.recall, 3), f3 = round_to(m.f_score, 3);
    const bool three = near(p3, row.p3) && near(r3, row.r3) && near(f3, row.f3);
    const bool two = near(round_to(p3, 2), row.p2) && near(round_to(r3, 2), row.r2) && near(round_to(f3, 2), row.f2);
    ok = ok && three && two;
    detail += fmt("%s P=%.4f R=%.4f F=%.4f; ", row.name, m.precision, m.recall, m.f_score);
  }
  report("7 metric rows from raw counts", ok, detail);
}

}  // namespace

int main() {
  Invariants inv;
  criterion_clean(inv);
  criterion_mean_f("2 deformed disks", true, false, 0.95, inv);
  criterion_mean_f("3 crack, stain and gap", false, true, 0.80, inv);
  criterion_devernay();

  const bool a = matrix_oracle(), b = matcher_oracle(), c = crossing_oracle();
  report("5 oracle equivalences", a && b && c, fmt("matrix %s, matcher %s, ray crossings %s", a ? "exact" : "differs",
                                                    b ? "exact" : "differs", c ? "exact" : "differs"));

  const bool inv_ok = inv.crossing == 0 && inv.open_rings == 0 && inv.bad_delta == 0 && inv.count_grew == 0;
  report("6 pipeline invariants", inv_ok,
         fmt("%d runs: %d with crossing rings, %d open rings, %d of %ld filtered points with delta >= alpha, "
             "%d chain-count increases",
             inv.runs, inv.crossing, inv.open_rings, inv.bad_delta, inv.checked_points, inv.count_grew));

  criterion_metric_rows();
  std::printf("SKIPPED 8 dataset reproduction: public datasets not available in this environment\n");
  return failures == 0 ? 0 : 1;
}
