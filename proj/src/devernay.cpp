#include "cstrd/devernay.hpp"

#include <cfloat>
#include <cmath>
#include <vector>

#include "cstrd/errors.hpp"

namespace cstrd {

namespace {

bool greater(double a, double b) {
  if (a <= b) return false;
  return (a - b) >= 1000 * DBL_EPSILON;
}

int reflect(int i, int n) {
  // half-sample symmetric: -1 -> 0, n -> n-1
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - i - 1;
  }
  return i;
}

std::vector<double> gaussian_kernel(double sigma) {
  const int half = static_cast<int>(std::ceil(4.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * half + 1));
  double sum = 0;
  for (int i = -half; i <= half; ++i) {
    const double v = std::exp(-0.5 * (i / sigma) * (i / sigma));
    k[static_cast<std::size_t>(i + half)] = v;
    sum += v;
  }
  for (auto& v : k) v /= sum;
  return k;
}

constexpr int kLinkRadius = 1;  // 8-neighbourhood

struct Edgels {
  int w = 0, h = 0;
  std::vector<double> ex, ey;  // -1 where no edge point
  const double* gx = nullptr;
  const double* gy = nullptr;

  // >0 forward, <0 backward, 0 invalid
  double score(int from, int to) const {
    if (from == to || ex[from] < 0 || ex[to] < 0) return 0.0;
    const double dx = ex[to] - ex[from], dy = ey[to] - ey[from];
    const double cf = gy[from] * dx - gx[from] * dy;
    const double ct = gy[to] * dx - gx[to] * dy;
    if (cf * ct <= 0.0) return 0.0;
    const double d = std::hypot(dx, dy);
    return cf >= 0.0 ? 1.0 / d : -1.0 / d;
  }

  double angle_change(int from, int to) const {
    const double a = std::atan2(gy[from], gx[from]), b = std::atan2(gy[to], gx[to]);
    double d = std::abs(a - b);
    if (d > M_PI) d = 2 * M_PI - d;
    return d;
  }
};

}  // namespace

FloatImage gaussian_blur(const FloatImage& image, double sigma) {
  const int h = image.height(), w = image.width();
  const auto k = gaussian_kernel(sigma);
  const int half = static_cast<int>(k.size() / 2);
  FloatImage tmp(h, w), out(h, w);
  std::vector<int> xi(static_cast<std::size_t>(w + 2 * half));
  for (int x = -half; x < w + half; ++x) xi[static_cast<std::size_t>(x + half)] = reflect(x, w);
  for (int y = 0; y < h; ++y) {
    const double* src = image.row_ptr(y);
    double* dst = tmp.row_ptr(y);
    for (int x = 0; x < w; ++x) {
      double acc = 0;
      for (int i = 0; i < static_cast<int>(k.size()); ++i) acc += k[static_cast<std::size_t>(i)] * src[xi[static_cast<std::size_t>(x + i)]];
      dst[x] = acc;
    }
  }
  for (int y = 0; y < h; ++y) {
    double* dst = out.row_ptr(y);
    for (int i = 0; i < static_cast<int>(k.size()); ++i) {
      const double kv = k[static_cast<std::size_t>(i)];
      const double* src = tmp.row_ptr(reflect(y + i - half, h));
      for (int x = 0; x < w; ++x) dst[x] += kv * src[x];
    }
  }
  return out;
}

EdgeDetection detect_edges(const GrayImage& image, const EdgeDetectionParams& params) {
  FloatImage f(image.height(), image.width());
  for (std::size_t i = 0; i < image.size(); ++i) f.data()[i] = image.data()[i];
  return detect_edges(f, params);
}

EdgeDetection detect_edges(const FloatImage& image, const EdgeDetectionParams& params) {
  if (!(params.sigma > 0) || params.th_low < 0 || params.th_low > params.th_high) {
    throw InputError("invalid edge detection parameters");
  }
  const int h = image.height(), w = image.width();
  const int support = 2 * static_cast<int>(std::ceil(4.0 * params.sigma)) + 1;
  if (h < support || w < support || h < 5 || w < 5) throw InputError("image smaller than kernel support");

  const FloatImage smooth = gaussian_blur(image, params.sigma);

  EdgeDetection out;
  out.gradient.gx = FloatImage(h, w);
  out.gradient.gy = FloatImage(h, w);
  auto& gx = out.gradient.gx.data();
  auto& gy = out.gradient.gy.data();
  std::vector<double> mod(static_cast<std::size_t>(h) * w, 0.0);
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      gx[i] = smooth(y, x + 1) - smooth(y, x - 1);
      gy[i] = smooth(y + 1, x) - smooth(y - 1, x);
      mod[i] = std::hypot(gx[i], gy[i]);
    }
  }

  // non-maxima suppression with parabolic sub-pixel offset
  Edgels e;
  e.w = w;
  e.h = h;
  e.gx = gx.data();
  e.gy = gy.data();
  e.ex.assign(mod.size(), -1.0);
  e.ey.assign(mod.size(), -1.0);
  for (int y = 2; y < h - 2; ++y) {
    for (int x = 2; x < w - 2; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const double m = mod[i];
      const double L = mod[i - 1], R = mod[i + 1];
      const double D = mod[i - w], U = mod[i + w];
      const double ax = std::abs(gx[i]), ay = std::abs(gy[i]);
      int dx = 0, dy = 0;
      if (greater(m, L) && !greater(R, m) && ax >= ay) {
        dx = 1;
      } else if (greater(m, D) && !greater(U, m) && ax <= ay) {
        dy = 1;
      }
      if (dx == 0 && dy == 0) continue;
      const double a = mod[i - dx - static_cast<std::size_t>(dy) * w];
      const double c = mod[i + dx + static_cast<std::size_t>(dy) * w];
      const double off = 0.5 * (a - c) / (a - m - m + c);
      e.ex[i] = x + off * dx;
      e.ey[i] = y + off * dy;
    }
  }

  // chaining
  std::vector<int> next(mod.size(), -1), prev(mod.size(), -1);
  for (int y = 2; y < h - 2; ++y) {
    for (int x = 2; x < w - 2; ++x) {
      const int from = y * w + x;
      if (e.ex[static_cast<std::size_t>(from)] < 0) continue;
      double fwd_s = 0, bck_s = 0;
      int fwd = -1, bck = -1;
      for (int j = -kLinkRadius; j <= kLinkRadius; ++j) {
        for (int i = -kLinkRadius; i <= kLinkRadius; ++i) {
          const int to = from + i + j * w;
          const double s = e.score(from, to);
          if (s > fwd_s || (s > 0 && s == fwd_s && e.angle_change(from, to) < e.angle_change(from, fwd))) {
            fwd_s = s;
            fwd = to;
          }
          if (s < bck_s || (s < 0 && s == bck_s && e.angle_change(from, to) < e.angle_change(from, bck))) {
            bck_s = s;
            bck = to;
          }
        }
      }
      int alt;
      if (fwd >= 0 && next[static_cast<std::size_t>(from)] != fwd &&
          ((alt = prev[static_cast<std::size_t>(fwd)]) < 0 || e.score(alt, fwd) < fwd_s)) {
        if (next[static_cast<std::size_t>(from)] >= 0) prev[static_cast<std::size_t>(next[static_cast<std::size_t>(from)])] = -1;
        next[static_cast<std::size_t>(from)] = fwd;
        if (alt >= 0) next[static_cast<std::size_t>(alt)] = -1;
        prev[static_cast<std::size_t>(fwd)] = from;
      }
      if (bck >= 0 && prev[static_cast<std::size_t>(from)] != bck &&
          ((alt = next[static_cast<std::size_t>(bck)]) < 0 || e.score(alt, bck) > bck_s)) {
        if (alt >= 0) prev[static_cast<std::size_t>(alt)] = -1;
        next[static_cast<std::size_t>(bck)] = from;
        if (prev[static_cast<std::size_t>(from)] >= 0) next[static_cast<std::size_t>(prev[static_cast<std::size_t>(from)])] = -1;
        prev[static_cast<std::size_t>(from)] = bck;
      }
    }
  }

  // hysteresis
  std::vector<char> valid(mod.size(), 0);
  for (std::size_t i = 0; i < mod.size(); ++i) {
    if ((prev[i] < 0 && next[i] < 0) || valid[i] || mod[i] < params.th_high) continue;
    valid[i] = 1;
    for (int j = static_cast<int>(i), k; j >= 0 && (k = next[static_cast<std::size_t>(j)]) >= 0 && !valid[static_cast<std::size_t>(k)]; j = next[static_cast<std::size_t>(j)]) {
      if (mod[static_cast<std::size_t>(k)] < params.th_low) {
        next[static_cast<std::size_t>(j)] = -1;
        prev[static_cast<std::size_t>(k)] = -1;
      } else {
        valid[static_cast<std::size_t>(k)] = 1;
      }
    }
    for (int j = static_cast<int>(i), k; j >= 0 && (k = prev[static_cast<std::size_t>(j)]) >= 0 && !valid[static_cast<std::size_t>(k)]; j = prev[static_cast<std::size_t>(j)]) {
      if (mod[static_cast<std::size_t>(k)] < params.th_low) {
        prev[static_cast<std::size_t>(j)] = -1;
        next[static_cast<std::size_t>(k)] = -1;
      } else {
        valid[static_cast<std::size_t>(k)] = 1;
      }
    }
  }
  for (std::size_t i = 0; i < mod.size(); ++i) {
    if ((prev[i] >= 0 || next[i] >= 0) && !valid[i]) prev[i] = next[i] = -1;
  }

  // list curves
  for (std::size_t i = 0; i < mod.size(); ++i) {
    if (prev[i] < 0 && next[i] < 0) continue;
    int k = static_cast<int>(i);
    for (int n; (n = prev[static_cast<std::size_t>(k)]) >= 0 && n != static_cast<int>(i);) k = n;
    EdgeCurve curve;
    curve.kind = CurveKind::devernay;
    do {
      const auto ks = static_cast<std::size_t>(k);
      curve.points.push_back({e.ex[ks], e.ey[ks]});
      const int n = next[ks];
      next[ks] = -1;
      prev[ks] = -1;
      k = n;
    } while (k >= 0);
    if (curve.points.size() >= 2) {
      curve.id = static_cast<int>(out.curves.size());
      out.curves.push_back(std::move(curve));
    }
  }
  return out;
}

}  // namespace cstrd
