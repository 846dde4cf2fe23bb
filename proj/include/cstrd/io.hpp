#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cstrd/geometry.hpp"
#include "cstrd/metrics.hpp"
#include "cstrd/raster.hpp"

namespace cstrd {

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

RgbImage read_image(const std::string& path);
void write_image(const std::string& path, const RgbImage& image);

struct LabelmeDocument {
  std::string image_path;
  int image_height = 0;
  int image_width = 0;
  std::vector<std::string> labels;
  std::vector<std::vector<Point>> polygons;
};

// Rings in working coordinates are mapped back by (x / sx, y / sy).
nlohmann::json chains_to_labelme(const std::vector<Chain>& rings, int height, int width, double sy, double sx,
                                 const std::string& image_path);
nlohmann::json polygons_to_labelme(const std::vector<std::vector<Point>>& polygons, int height, int width,
                                   const std::string& image_path);

// Strict schema: throws InputError on missing fields or non-polygon shapes.
LabelmeDocument parse_labelme(const nlohmann::json& doc);
LabelmeDocument read_labelme(const std::string& path);
void write_json(const std::string& path, const nlohmann::json& doc);

// Detections in red, GT in green.
RgbImage render_overlay(const RgbImage& image, const std::vector<std::vector<Point>>& detections,
                        const std::vector<std::vector<Point>>& gt = {});
std::vector<std::vector<Point>> chain_polygons(const std::vector<Chain>& rings);

nlohmann::json report_json(const MetricsReport& report, const std::string& name, double time_sec);
std::string csv_header();
std::string csv_row(const MetricsReport& report, const std::string& name, double time_sec);

}  // namespace cstrd
