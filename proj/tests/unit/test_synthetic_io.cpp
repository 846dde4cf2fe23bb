#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "cstrd/errors.hpp"
#include "cstrd/io.hpp"
#include "cstrd/metrics.hpp"
#include "cstrd/synthetic.hpp"
#include "helpers.hpp"

using namespace cstrd;

namespace {

DiskSpec ten_circles() {
  DiskSpec s;
  for (int k = 1; k <= 10; ++k) s.radii.push_back(50.0 * k);
  s.size = 1100;
  s.seed = 4;
  return s;
}

std::filesystem::path temp_dir() {
  auto p = std::filesystem::temp_directory_path() / "cstrd_unit";
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("synthetic") {
  TEST_CASE("ten circles give ten GT polygons") {
    const auto d = generate_disk(ten_circles());
    CHECK(d.image.height() == 1100);
    CHECK(d.image.width() == 1100);
    REQUIRE(d.rings.size() == 10);
    for (const auto& r : d.rings) CHECK(r.size() == static_cast<std::size_t>(kGtVertices));
    const auto doc = polygons_to_labelme(d.rings, 1100, 1100, "disk.png");
    CHECK(doc["shapes"].size() == 10);
  }

  TEST_CASE("zero deformation gives exact circles") {
    const auto d = generate_disk(ten_circles());
    for (std::size_t i = 0; i < d.rings.size(); ++i) {
      const double R = 50.0 * static_cast<double>(i + 1);
      for (const auto& p : d.rings[i]) CHECK(std::hypot(p.x - d.cx, p.y - d.cy) == doctest::Approx(R));
      const auto ring = rasterize_polygon(d.rings[i], d.cy, d.cx, 360);
      const double sag = R * (1 - std::cos(3.14159265358979 / kGtVertices));
      for (double r : ring.radii) CHECK(std::abs(r - R) <= sag + 1e-9);
    }
  }

  TEST_CASE("same seed gives identical output") {
    DiskSpec s = ten_circles();
    s.deformation = 0.1;
    s.crack = s.stain = s.gap = true;
    const auto a = generate_disk(s), b = generate_disk(s);
    CHECK(a.image == b.image);
    CHECK(polygons_to_labelme(a.rings, 1, 1, "x").dump() == polygons_to_labelme(b.rings, 1, 1, "x").dump());
    s.seed = 5;
    CHECK_FALSE(generate_disk(s).image == a.image);
  }

  TEST_CASE("invalid radii are rejected") {
    DiskSpec s;
    s.size = 400;
    s.radii = {50, 40};
    CHECK_THROWS_AS(generate_disk(s), InputError);
    s.radii = {50, 50};
    CHECK_THROWS_AS(generate_disk(s), InputError);
    s.radii = {};
    CHECK_THROWS_AS(generate_disk(s), InputError);
    for (int k = 1; k <= 30; ++k) s.radii.push_back(25.0 * k);
    CHECK_THROWS_AS(generate_disk(s), InputError);
  }

  TEST_CASE("deformed GT rings never cross") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      DiskSpec s;
      s.radii = random_radii(12, 500, seed);
      s.size = 1200;
      s.seed = seed;
      s.deformation = 0.1;
      const auto d = generate_disk(s);
      std::vector<RingPolyline> rings;
      for (const auto& p : d.rings) rings.push_back(rasterize_polygon(p, d.cy, d.cx, 720));
      CHECK_NOTHROW(build_influence_partition(rings));
    }
  }

  TEST_CASE("gradient at GT radii points outward") {
    const auto d = generate_disk(ten_circles());
    const int y = static_cast<int>(d.cy);
    for (int k = 1; k <= 10; ++k) {
      const int x = static_cast<int>(std::lround(d.cx + 50.0 * k));
      const int inside = d.image(y, x - 3).r, outside = d.image(y, x + 3).r;
      CHECK(inside < outside);
    }
  }
}

TEST_SUITE("io") {
  TEST_CASE("labelme output is rescaled to the original size") {
    std::vector<Node> nodes;
    for (int i = 0; i < 4; ++i) nodes.push_back({750, 750, i, 0, 0});
    nodes[1] = {760, 740, 1, 0, 0};
    const Chain ring(0, 4, ChainKind::normal, nodes);
    const auto doc = chains_to_labelme({ring}, 3000, 3000, 0.5, 0.5, "disk.png");
    CHECK(doc["imageHeight"] == 3000);
    CHECK(doc["imageWidth"] == 3000);
    CHECK(doc["imagePath"] == "disk.png");
    const auto& s = doc["shapes"][0];
    CHECK(s["shape_type"] == "polygon");
    CHECK(s["label"] == "1");
    CHECK(s["points"][0][0].get<double>() == 1500.0);
    CHECK(s["points"][0][1].get<double>() == 1500.0);
    CHECK(s["points"][1][0].get<double>() == 1520.0);
    CHECK(s["points"][1][1].get<double>() == 1480.0);
  }

  TEST_CASE("no rings is a valid document") {
    const auto doc = chains_to_labelme({}, 10, 20, 1, 1, "a.png");
    CHECK(doc["shapes"].is_array());
    CHECK(doc["shapes"].empty());
    CHECK(parse_labelme(nlohmann::json::parse(doc.dump())).polygons.empty());
  }

  TEST_CASE("write and read round trip is lossless") {
    const auto pts = testutil::circle_points(123.456, 321.987, 77.7777, 360);
    const std::vector<std::vector<Point>> polys{std::vector<Point>(pts.begin(), pts.end() - 1)};
    const auto path = (temp_dir() / "round.json").string();
    write_json(path, polygons_to_labelme(polys, 500, 600, "x.png"));
    const auto back = read_labelme(path);
    CHECK(back.image_height == 500);
    CHECK(back.image_width == 600);
    REQUIRE(back.polygons.size() == 1);
    REQUIRE(back.polygons[0].size() == polys[0].size());
    for (std::size_t i = 0; i < polys[0].size(); ++i) {
      CHECK(back.polygons[0][i].x == polys[0][i].x);
      CHECK(back.polygons[0][i].y == polys[0][i].y);
    }
    const auto a = rasterize_polygon(polys[0], 123.456, 321.987, 360);
    const auto b = rasterize_polygon(back.polygons[0], 123.456, 321.987, 360);
    CHECK(a.radii == b.radii);
  }

  TEST_CASE("rescale round trip stays under half a pixel") {
    const double sy = 1500.0 / 2417, sx = 1500.0 / 2389;
    std::vector<Node> nodes;
    for (int i = 0; i < 360; ++i) {
      const Point p = polar_point(750, 750, i, 360, 321.123);
      nodes.push_back({p.x, p.y, i, 321.123, 0});
    }
    const Chain ring(0, 360, ChainKind::normal, nodes);
    const auto doc = chains_to_labelme({ring}, 2417, 2389, sy, sx, "x");
    const auto parsed = parse_labelme(doc);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const Point p = parsed.polygons[0][i];
      CHECK(std::abs(p.x * sx - nodes[i].x) < 0.5);
      CHECK(std::abs(p.y * sy - nodes[i].y) < 0.5);
    }
  }

  TEST_CASE("strict schema") {
    CHECK_THROWS_AS(parse_labelme(nlohmann::json::array()), InputError);
    CHECK_THROWS_AS(parse_labelme({{"shapes", nlohmann::json::array()}}), InputError);
    auto doc = polygons_to_labelme({{{1, 1}, {2, 2}, {1, 2}}}, 5, 5, "x");
    doc["shapes"][0]["shape_type"] = "rectangle";
    CHECK_THROWS_AS(parse_labelme(doc), InputError);
    doc = polygons_to_labelme({{{1, 1}, {2, 2}, {1, 2}}}, 5, 5, "x");
    doc["shapes"][0]["points"][1] = {1};
    CHECK_THROWS_AS(parse_labelme(doc), InputError);
    const auto bad = (temp_dir() / "bad.json").string();
    {
      std::ofstream(bad) << "{not json";
    }
    CHECK_THROWS_AS(read_labelme(bad), InputError);
  }

  TEST_CASE("overlay drawing") {
    RgbImage img(100, 100, Rgb{200, 200, 200});
    CHECK(render_overlay(img, {}) == img);

    const auto pts = testutil::circle_points(50, 50, 30, 90);
    const std::vector<std::vector<Point>> ring{std::vector<Point>(pts.begin(), pts.end() - 1)};
    const auto out = render_overlay(img, ring);
    CHECK(out.height() == 100);
    const Rgb on = out(50, 80);
    CHECK(on.r > on.g);
    CHECK(out(50, 50) == img(50, 50));

    const auto gt_pts = testutil::circle_points(50, 50, 15, 90);
    const std::vector<std::vector<Point>> gt{std::vector<Point>(gt_pts.begin(), gt_pts.end() - 1)};
    const auto both = render_overlay(img, ring, gt);
    CHECK(both(50, 65).g > both(50, 65).r);
    CHECK(both == render_overlay(img, ring, gt));
  }

  TEST_CASE("image write and read") {
    RgbImage img(7, 9);
    for (int y = 0; y < 7; ++y) {
      for (int x = 0; x < 9; ++x) img(y, x) = {static_cast<std::uint8_t>(x * 20), static_cast<std::uint8_t>(y * 30), 5};
    }
    const auto path = (temp_dir() / "img.png").string();
    write_image(path, img);
    CHECK(read_image(path) == img);
    CHECK_THROWS_AS(read_image((temp_dir() / "missing.png").string()), IoError);
  }

  TEST_CASE("csv row layout") {
    MetricsReport r;
    r.tp = 21;
    r.fn = 1;
    fill_scores(r);
    CHECK(csv_header() == "name,TP,FP,TN,FN,P,R,F,RMSE,time_sec");
    CHECK(csv_row(r, "F02c", 12.26) == "F02c,21,0,0,1,1.0000,0.9545,0.9767,0.0000,12.2600");
  }
}
