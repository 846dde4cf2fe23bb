#include "cstrd/edge_filter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <opencv2/imgproc.hpp>

namespace cstrd {

namespace {

constexpr double kBorderSigma = 11.0;
constexpr int kBorderPad = 3;

}  // namespace

double ray_gradient_angle(Point p, double cy, double cx, const GradientField& grad) {
  const int h = grad.gx.height(), w = grad.gx.width();
  const int col = std::clamp(static_cast<int>(std::lround(p.x)), 0, w - 1);
  const int row = std::clamp(static_cast<int>(std::lround(p.y)), 0, h - 1);
  const double gx = grad.gx(row, col), gy = grad.gy(row, col);
  const double vx = p.x - cx, vy = p.y - cy;
  const double gn = std::hypot(gx, gy), vn = std::hypot(vx, vy);
  if (gn == 0.0 || vn == 0.0) return -1.0;
  const double c = std::clamp((vx * gx + vy * gy) / (gn * vn), -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

std::vector<EdgeCurve> filter_edges(const std::vector<EdgeCurve>& curves, double cy, double cx,
                                    const GradientField& grad, double alpha_deg, const GrayImage& img) {
  std::vector<EdgeCurve> out;
  auto flush = [&](std::vector<Point>& piece) {
    if (piece.size() >= 2) {
      EdgeCurve c;
      c.id = static_cast<int>(out.size());
      c.kind = CurveKind::devernay;
      c.points = std::move(piece);
      out.push_back(std::move(c));
    }
    piece.clear();
  };
  std::vector<Point> piece;
  for (const auto& curve : curves) {
    for (const auto& p : curve.points) {
      const double delta = ray_gradient_angle(p, cy, cx, grad);
      if (delta < 0 || delta >= alpha_deg) {
        flush(piece);
      } else {
        piece.push_back(p);
      }
    }
    flush(piece);
  }
  out.push_back(get_border_curve(img, static_cast<int>(out.size())));
  return out;
}

EdgeCurve get_border_curve(const GrayImage& img, int id) {
  const int h = img.height(), w = img.width();
  EdgeCurve border;
  border.id = id;
  border.kind = CurveKind::border;

  cv::Mat mask(h, w, CV_32F);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) mask.at<float>(y, x) = img(y, x) == 255 ? 255.f : 0.f;
  }
  cv::GaussianBlur(mask, mask, cv::Size(0, 0), kBorderSigma, kBorderSigma, cv::BORDER_REFLECT);
  cv::Mat bin;
  cv::threshold(mask, bin, 127.5, 255, cv::THRESH_BINARY);
  bin.convertTo(bin, CV_8U);
  cv::copyMakeBorder(bin, bin, kBorderPad, kBorderPad, kBorderPad, kBorderPad, cv::BORDER_CONSTANT, 0);
  std::vector<std::vector<cv::Point>> contours;
  cv::findContours(bin, contours, cv::RETR_LIST, cv::CHAIN_APPROX_NONE);

  const double half = 0.5 * h * w;
  int best = -1;
  double best_gap = 0, best_area = 0;
  for (int i = 0; i < static_cast<int>(contours.size()); ++i) {
    if (contours[static_cast<std::size_t>(i)].size() < 3) continue;
    const double area = cv::contourArea(contours[static_cast<std::size_t>(i)]);
    const double gap = std::abs(area - half);
    if (best < 0 || gap < best_gap || (gap == best_gap && area > best_area)) {
      best = i;
      best_gap = gap;
      best_area = area;
    }
  }
  if (best < 0) {
    border.points = {{0, 0}, {static_cast<double>(w - 1), 0},
                     {static_cast<double>(w - 1), static_cast<double>(h - 1)},
                     {0, static_cast<double>(h - 1)}, {0, 0}};
    return border;
  }
  for (const auto& p : contours[static_cast<std::size_t>(best)]) {
    border.points.push_back({static_cast<double>(p.x - kBorderPad), static_cast<double>(p.y - kBorderPad)});
  }
  border.points.push_back(border.points.front());
  return border;
}

}  // namespace cstrd
