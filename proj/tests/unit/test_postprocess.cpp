#include <doctest.h>

#include "cstrd/postprocess.hpp"
#include "cstrd/sampling.hpp"
#include "helpers.hpp"

using namespace cstrd;
using testutil::arc;

namespace {

constexpr double kC = 500;

// center, rings at 100 and 200, border at 300 plus the given open chains
std::vector<Chain> region_with(std::vector<Chain> open) {
  std::vector<Chain> all = std::move(open);
  all.push_back(arc(0, 360, 0, 360, 100.0));
  all.push_back(arc(0, 360, 0, 360, 200.0));
  all.push_back(arc(0, 360, 0, 360, 300.0, kC, kC, ChainKind::border));
  all.push_back(make_center_chain(0, 360, kC, kC));
  for (std::size_t i = 0; i < all.size(); ++i) all[i].set_id(static_cast<int>(i));
  return all;
}

int closed_between(const std::vector<Chain>& chains, double lo, double hi) {
  int n = 0;
  for (const auto& c : chains) {
    n += c.kind() == ChainKind::normal && c.closed() && c.mean_radius() > lo && c.mean_radius() < hi;
  }
  return n;
}

}  // namespace

TEST_SUITE("postprocess") {
  TEST_CASE("region parameters") {
    const auto p = region_params();
    CHECK(p.neighbourhood_size == 45);
    CHECK(p.th_radial_tolerance == 0.2);
    CHECK(p.th_distribution_size == 3);
    CHECK(p.th_regular_derivative == 2);
  }

  TEST_CASE("closed chains are left alone") {
    const auto in = region_with({});
    const auto out = postprocess(in, 360, kC, kC);
    REQUIRE(out.size() == in.size());
    for (std::size_t i = 0; i < in.size(); ++i) CHECK(out[i].mean_radius() == in[i].mean_radius());
  }

  TEST_CASE("interpolation keeps a linear fraction between rings") {
    const Chain in = arc(0, 360, 0, 360, [](int t) { return 100.0 + (t % 2); });
    const Chain out = arc(1, 360, 0, 360, 200.0);
    Node left{0, 0, 10, 125, 0}, right{0, 0, 15, 175, 0};
    const auto nodes = interpolate_between_rings(left, right, in, out, 360, kC, kC);
    REQUIRE(nodes.size() == 4);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double rin = in.at_ray(nodes[i].ray)->radius;
      const double fl = (125.0 - 100.0) / 100.0, fr = (175.0 - 101.0) / 99.0;
      const double f = fl + (fr - fl) * static_cast<double>(i + 1) / 5.0;
      CHECK(nodes[i].radius == doctest::Approx(rin + f * (200.0 - rin)));
    }
  }

  TEST_CASE("chain covering 80 percent is completed between the rings") {
    Postprocessor p(region_with({arc(0, 360, 10, 288, 150.0)}), 360, kC, kC);
    const auto rings = p.within_chains(p.chains()[1].key, p.chains()[2].key);
    CHECK(rings.size() == 1);
    CHECK(p.split_and_connect_chains(p.chains()[1].key, p.chains()[2].key));
    CHECK(closed_between(p.chains(), 100, 200) == 1);
    for (const auto& c : p.chains()) {
      if (c.kind() == ChainKind::normal && c.closed() && c.mean_radius() < 199 && c.mean_radius() > 101) {
        for (const auto& n : c.nodes()) CHECK(n.radius == doctest::Approx(150));
      }
    }
  }

  TEST_CASE("empty region") {
    Postprocessor p(region_with({}), 360, kC, kC);
    CHECK_FALSE(p.split_and_connect_chains(p.chains()[0].key, p.chains()[1].key));
    CHECK_FALSE(p.connect_chains_if_there_is_enough_data(p.chains()[0].key, p.chains()[1].key));
  }

  TEST_CASE("two overlapping arcs are split, joined and closed") {
    const auto out = postprocess(region_with({arc(0, 360, 0, 200, 150.0), arc(1, 360, 195, 150, 150.0)}), 360, kC, kC);
    CHECK(closed_between(out, 100, 200) == 1);
  }

  TEST_CASE("pieces overlapping by more than the neighbourhood are ignored") {
    Postprocessor p(region_with({arc(0, 360, 0, 200, 150.0), arc(1, 360, 140, 120, 150.0)}), 360, kC, kC);
    const long in = p.chains()[2].key, out = p.chains()[3].key;
    CHECK_FALSE(p.split_and_connect_chains(in, out));
    CHECK(p.chains()[0].size() == 200);
    CHECK(p.chains()[1].size() == 120);
  }

  TEST_CASE("runs outside a chain") {
    const Chain cj = arc(0, 360, 100, 50, 150.0);
    CHECK(runs_outside(arc(1, 360, 120, 10, 151.0), cj).empty());
    const auto one = runs_outside(arc(1, 360, 140, 30, 151.0), cj);
    REQUIRE(one.size() == 1);
    CHECK(one[0].first_ray == 150);
    CHECK(one[0].count == 20);
    const auto two = runs_outside(arc(1, 360, 90, 70, 151.0), cj);
    REQUIRE(two.size() == 2);
    CHECK(two[0].first_ray == 90);
    CHECK(two[0].count == 10);
    CHECK(two[1].first_ray == 150);
    CHECK(two[1].count == 10);
  }

  TEST_CASE("splitting at an endpoint ray") {
    Chain cj = arc(0, 360, 100, 50, 150.0);
    cj.key = 0;
    std::vector<Chain> others{arc(1, 360, 140, 30, 151.0), arc(2, 360, 200, 20, 151.0)};
    others[0].key = 1;
    others[1].key = 2;
    const auto pieces = split_intersecting_chains(cj.a().ray, others, cj, Endpoint::A);
    REQUIRE(pieces.size() == 1);
    CHECK(pieces[0].source == 1);
    CHECK(pieces[0].first_ray == 150);
    CHECK(pieces[0].count == 20);

    // a long chain reaching around to B is cut a second time
    std::vector<Chain> wrap{arc(3, 360, 120, 350, 151.0)};
    wrap[0].key = 3;
    const auto cut = split_intersecting_chains(cj.a().ray, wrap, cj, Endpoint::A);
    REQUIRE(cut.size() == 1);
    CHECK(cut[0].first_ray == 150);
    CHECK(cut[0].count == 310);
  }

  TEST_CASE("enough data closes the ring") {
    Postprocessor p(region_with({arc(0, 360, 0, 100, 150.0), arc(1, 360, 120, 100, 152.0)}), 360, kC, kC);
    CHECK(p.connect_chains_if_there_is_enough_data(p.chains()[2].key, p.chains()[3].key));
    CHECK(closed_between(p.chains(), 100, 200) == 1);

    Postprocessor q(region_with({arc(0, 360, 0, 60, 150.0), arc(1, 360, 120, 60, 152.0)}), 360, kC, kC);
    CHECK_FALSE(q.connect_chains_if_there_is_enough_data(q.chains()[2].key, q.chains()[3].key));
    CHECK(closed_between(q.chains(), 100, 200) == 0);
  }

  TEST_CASE("three disjoint thirds become one ring through the source arcs") {
    auto radius = [](int ray) { return 150.0 + 5.0 * std::sin(ray * 3.14159265 / 180.0); };
    std::vector<Chain> thirds;
    for (int k = 0; k < 3; ++k) {
      thirds.push_back(arc(k, 360, 120 * k, 110, [&, k](int t) { return radius(120 * k + t); }));
    }
    Postprocessor p(region_with(thirds), 360, kC, kC);
    CHECK(p.connect_chains_if_there_is_enough_data(p.chains()[3].key, p.chains()[4].key));
    int rings = 0;
    for (const auto& c : p.chains()) {
      if (c.kind() != ChainKind::normal || !c.closed() || c.mean_radius() > 199 || c.mean_radius() < 101) continue;
      ++rings;
      for (const auto& n : c.nodes()) CHECK(std::abs(n.radius - radius(n.ray)) < 1.0);
    }
    CHECK(rings == 1);
  }

  TEST_CASE("final rings are closed normal chains by radius") {
    const auto rings = final_rings(region_with({arc(0, 360, 0, 100, 150.0)}));
    REQUIRE(rings.size() == 2);
    CHECK(rings[0].mean_radius() == 100);
    CHECK(rings[1].mean_radius() == 200);
  }
}
