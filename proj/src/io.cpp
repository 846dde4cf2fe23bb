#include "cstrd/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "cstrd/errors.hpp"

namespace cstrd {

namespace {

cv::Mat to_mat(const RgbImage& image) {
  cv::Mat m(image.height(), image.width(), CV_8UC3);
  for (int y = 0; y < image.height(); ++y) {
    auto* row = m.ptr<cv::Vec3b>(y);
    for (int x = 0; x < image.width(); ++x) {
      const Rgb p = image(y, x);
      row[x] = {p.b, p.g, p.r};
    }
  }
  return m;
}

RgbImage from_mat(const cv::Mat& m) {
  RgbImage out(m.rows, m.cols);
  for (int y = 0; y < m.rows; ++y) {
    const auto* row = m.ptr<cv::Vec3b>(y);
    for (int x = 0; x < m.cols; ++x) out(y, x) = {row[x][2], row[x][1], row[x][0]};
  }
  return out;
}

void draw(cv::Mat& m, const std::vector<std::vector<Point>>& polys, cv::Scalar color) {
  constexpr int kShift = 4;  // subpixel fixed point
  for (const auto& poly : polys) {
    if (poly.size() < 2) continue;
    std::vector<cv::Point> pts;
    pts.reserve(poly.size());
    for (const auto& p : poly) {
      pts.emplace_back(static_cast<int>(std::lround(p.x * (1 << kShift))),
                       static_cast<int>(std::lround(p.y * (1 << kShift))));
    }
    cv::polylines(m, pts, true, color, 2, cv::LINE_AA, kShift);
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

RgbImage read_image(const std::string& path) {
  const cv::Mat m = cv::imread(path, cv::IMREAD_COLOR);
  if (m.empty()) throw IoError("cannot read image: " + path);
  return from_mat(m);
}

void write_image(const std::string& path, const RgbImage& image) {
  if (!cv::imwrite(path, to_mat(image))) throw IoError("cannot write image: " + path);
}

nlohmann::json polygons_to_labelme(const std::vector<std::vector<Point>>& polygons, int height, int width,
                                   const std::string& image_path) {
  nlohmann::json shapes = nlohmann::json::array();
  for (std::size_t i = 0; i < polygons.size(); ++i) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : polygons[i]) pts.push_back({p.x, p.y});
    shapes.push_back({{"label", std::to_string(i + 1)},
                      {"points", pts},
                      {"group_id", nullptr},
                      {"shape_type", "polygon"},
                      {"flags", nlohmann::json::object()}});
  }
  return {{"version", "5.0.1"},
          {"flags", nlohmann::json::object()},
          {"shapes", shapes},
          {"imagePath", image_path},
          {"imageData", nullptr},
          {"imageHeight", height},
          {"imageWidth", width}};
}

nlohmann::json chains_to_labelme(const std::vector<Chain>& rings, int height, int width, double sy, double sx,
                                 const std::string& image_path) {
  std::vector<std::vector<Point>> polys;
  for (const auto& c : rings) {
    std::vector<Point> poly;
    for (const auto& n : c.nodes()) poly.push_back({n.x / sx, n.y / sy});
    polys.push_back(std::move(poly));
  }
  return polygons_to_labelme(polys, height, width, image_path);
}

LabelmeDocument parse_labelme(const nlohmann::json& doc) {
  auto fail = [](const std::string& what) { throw InputError("labelme: " + what); };
  if (!doc.is_object()) fail("document is not an object");
  for (const char* key : {"shapes", "imageHeight", "imageWidth"}) {
    if (!doc.contains(key)) fail(std::string("missing ") + key);
  }
  if (!doc["shapes"].is_array()) fail("shapes is not an array");
  if (!doc["imageHeight"].is_number_integer() || !doc["imageWidth"].is_number_integer()) fail("bad image size");
  LabelmeDocument out;
  if (doc.contains("imagePath") && doc["imagePath"].is_string()) out.image_path = doc["imagePath"];
  out.image_height = doc["imageHeight"];
  out.image_width = doc["imageWidth"];
  for (const auto& s : doc["shapes"]) {
    if (!s.is_object() || !s.contains("points") || !s["points"].is_array()) fail("shape without points");
    if (s.contains("shape_type") && s["shape_type"] != "polygon") fail("shape is not a polygon");
    std::vector<Point> poly;
    for (const auto& p : s["points"]) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) fail("bad point");
      poly.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    out.labels.push_back(s.contains("label") && s["label"].is_string() ? s["label"].get<std::string>() : "");
    out.polygons.push_back(std::move(poly));
  }
  return out;
}

LabelmeDocument read_labelme(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("labelme: " + std::string(e.what()));
  }
  return parse_labelme(doc);
}

void write_json(const std::string& path, const nlohmann::json& doc) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << doc.dump(2) << '\n';
}

std::vector<std::vector<Point>> chain_polygons(const std::vector<Chain>& rings) {
  std::vector<std::vector<Point>> polys;
  for (const auto& c : rings) {
    std::vector<Point> poly;
    for (const auto& n : c.nodes()) poly.push_back({n.x, n.y});
    polys.push_back(std::move(poly));
  }
  return polys;
}

RgbImage render_overlay(const RgbImage& image, const std::vector<std::vector<Point>>& detections,
                        const std::vector<std::vector<Point>>& gt) {
  if (detections.empty() && gt.empty()) return image;
  cv::Mat m = to_mat(image);
  draw(m, gt, cv::Scalar(0, 200, 0));
  draw(m, detections, cv::Scalar(0, 0, 255));
  return from_mat(m);
}

nlohmann::json report_json(const MetricsReport& r, const std::string& name, double time_sec) {
  return {{"name", name},         {"TP", r.tp},     {"FP", r.fp},        {"TN", r.tn},
          {"FN", r.fn},           {"P", r.precision}, {"R", r.recall},   {"F", r.f_score},
          {"RMSE", r.rmse},       {"time_sec", time_sec}, {"assignment", r.assignment}};
}

std::string csv_header() { return "name,TP,FP,TN,FN,P,R,F,RMSE,time_sec"; }

std::string csv_row(const MetricsReport& r, const std::string& name, double time_sec) {
  return name + "," + std::to_string(r.tp) + "," + std::to_string(r.fp) + "," + std::to_string(r.tn) + "," +
         std::to_string(r.fn) + "," + fmt(r.precision) + "," + fmt(r.recall) + "," + fmt(r.f_score) + "," +
         fmt(r.rmse) + "," + fmt(time_sec);
}

}  // namespace cstrd
