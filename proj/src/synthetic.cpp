#include "cstrd/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "cstrd/errors.hpp"

namespace cstrd {

namespace {

constexpr double kEarly = 200.0;
constexpr double kLate = 40.0;
constexpr double kLateFraction = 0.15;
constexpr double kRamp = 1.0;  // half-width of the boundary ramp

// Platform-independent uniform draw in [0,1).
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : gen_(seed) {}
  double operator()() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double operator()(double lo, double hi) { return lo + (hi - lo) * (*this)(); }

 private:
  std::mt19937_64 gen_;
};

struct Deform {
  std::array<double, 3> amp{};
  std::array<double, 3> phase{};
  double scale = 0;  // pixels at the outermost ring

  double operator()(double theta) const {
    double s = 0;
    for (int k = 0; k < 3; ++k) s += amp[static_cast<std::size_t>(k)] * std::sin((k + 2) * theta + phase[static_cast<std::size_t>(k)]);
    return scale * s;
  }
};

struct Stain {
  double x = 0, y = 0, a = 1, b = 1, cos_r = 1, sin_r = 0;
};

struct Crack {
  Point apex, left, right;
};

double tri_sign(Point p, Point a, Point b) { return (p.x - b.x) * (a.y - b.y) - (a.x - b.x) * (p.y - b.y); }

bool in_triangle(Point p, const Crack& t) {
  const double d1 = tri_sign(p, t.apex, t.left), d2 = tri_sign(p, t.left, t.right), d3 = tri_sign(p, t.right, t.apex);
  const bool neg = d1 < 0 || d2 < 0 || d3 < 0, pos = d1 > 0 || d2 > 0 || d3 > 0;
  return !(neg && pos);
}

double ramp(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

std::vector<double> random_radii(int count, double outer, std::uint64_t seed) {
  if (count <= 0) throw InputError("ring count must be positive");
  Uniform u(seed);
  std::vector<double> w(static_cast<std::size_t>(count));
  double total = 0;
  for (auto& v : w) {
    v = u(0.85, 1.15);
    total += v;
  }
  w.front() += 0.5;  // the pith ring tends to be wide
  total += 0.5;
  std::vector<double> radii;
  double r = 0;
  for (double v : w) {
    r += v * outer / total;
    radii.push_back(r);
  }
  return radii;
}

SyntheticDisk generate_disk(const DiskSpec& spec) {
  const auto& R = spec.radii;
  if (R.empty()) throw InputError("no rings");
  if (R.front() <= 0) throw InputError("radii must be positive");
  for (std::size_t i = 1; i < R.size(); ++i) {
    if (!(R[i] > R[i - 1])) throw InputError("radii must be strictly increasing");
  }
  if (spec.size <= 0) throw InputError("size must be positive");
  const std::size_t n = R.size();
  const double spacing = R.back() / static_cast<double>(n);
  const double last_width = n > 1 ? R[n - 1] - R[n - 2] : R[0];
  const double amp = std::abs(spec.deformation) * spacing;
  const double disk_max = R.back() + amp + 0.5 * last_width;
  if (disk_max >= spec.size / 2.0 - 2.0) throw InputError("rings do not fit in the canvas");

  Uniform u(spec.seed);
  Deform deform;
  for (int k = 0; k < 3; ++k) {
    deform.amp[static_cast<std::size_t>(k)] = u(0.3, 1.0);
    deform.phase[static_cast<std::size_t>(k)] = u(0.0, 2 * std::numbers::pi);
  }
  double peak = 0;
  for (int i = 0; i < 3600; ++i) {
    deform.scale = 1.0;
    peak = std::max(peak, std::abs(deform(i * 2 * std::numbers::pi / 3600)));
  }
  deform.scale = peak > 0 ? amp / peak : 0.0;

  SyntheticDisk out;
  out.cy = out.cx = spec.size / 2.0;
  const double cx = out.cx, cy = out.cy;
  const double rmax = R.back();

  auto ring_at = [&](std::size_t i, double theta) { return R[i] + deform(theta) * R[i] / rmax; };

  // perturbation geometry, drawn in a fixed order so the seed fully determines it
  const double crack_theta = u(0.0, 2 * std::numbers::pi);
  const double crack_half = u(1.5, 2.5) * std::numbers::pi / 180.0;
  const double crack_in = u(0.25, 0.4) * rmax, crack_out = u(0.85, 0.95) * rmax;
  Crack crack;
  crack.apex = {cx + crack_in * std::cos(crack_theta), cy + crack_in * std::sin(crack_theta)};
  crack.left = {cx + crack_out * std::cos(crack_theta - crack_half), cy + crack_out * std::sin(crack_theta - crack_half)};
  crack.right = {cx + crack_out * std::cos(crack_theta + crack_half), cy + crack_out * std::sin(crack_theta + crack_half)};

  Stain stain;
  {
    const double t = u(0.0, 2 * std::numbers::pi), d = u(0.3, 0.75) * rmax;
    stain.x = cx + d * std::cos(t);
    stain.y = cy + d * std::sin(t);
    stain.a = u(0.12, 0.2) * rmax;
    stain.b = u(0.06, 0.1) * rmax;
    const double rot = u(0.0, std::numbers::pi);
    stain.cos_r = std::cos(rot);
    stain.sin_r = std::sin(rot);
  }
  const double gap_start = u(0.0, 360.0);

  out.image = RgbImage(spec.size, spec.size, Rgb{255, 255, 255});
  std::vector<double> rr(n);
  for (int y = 0; y < spec.size; ++y) {
    for (int x = 0; x < spec.size; ++x) {
      const double dx = x - cx, dy = y - cy;
      const double rho = std::hypot(dx, dy);
      const double theta = std::atan2(dy, dx);
      for (std::size_t i = 0; i < n; ++i) rr[i] = ring_at(i, theta);
      const double disk = rr[n - 1] + 0.5 * (n > 1 ? rr[n - 1] - rr[n - 2] : rr[0]);
      if (rho > disk + 0.5) continue;

      bool in_gap = false;
      if (spec.gap) {
        double deg = theta * 180.0 / std::numbers::pi;
        if (deg < 0) deg += 360.0;
        in_gap = std::fmod(deg - gap_start + 720.0, 360.0) < spec.gap_deg;
      }
      double late = 0;
      if (!in_gap) {
        for (std::size_t i = 0; i < n; ++i) {
          const double outer = rr[i];
          const double width = outer - (i > 0 ? rr[i - 1] : 0.0);
          const double inner = outer - kLateFraction * width;
          if (rho < inner - kRamp || rho > outer + kRamp) continue;
          late = std::max(late, ramp((rho - inner + kRamp) / (2 * kRamp)) * ramp((outer + kRamp - rho) / (2 * kRamp)));
        }
      }
      double v = kEarly - (kEarly - kLate) * late;
      if (spec.stain) {
        const double ex = (x - stain.x) * stain.cos_r + (y - stain.y) * stain.sin_r;
        const double ey = -(x - stain.x) * stain.sin_r + (y - stain.y) * stain.cos_r;
        const double q = std::hypot(ex / stain.a, ey / stain.b);
        const double m = ramp((1.0 - q) * stain.b / 3.0);
        v *= 1.0 - 0.6 * m;
      }
      double red = v, green = v * 0.85, blue = v * 0.65;
      if (spec.crack && in_triangle({static_cast<double>(x), static_cast<double>(y)}, crack)) {
        red = green = blue = 255.0;
      } else {
        const double t = ramp(rho - (disk - 0.5));
        red = red * (1 - t) + 255 * t;
        green = green * (1 - t) + 255 * t;
        blue = blue * (1 - t) + 255 * t;
        red = std::min(red, 254.0);
      }
      out.image(y, x) = {static_cast<std::uint8_t>(std::lround(red)), static_cast<std::uint8_t>(std::lround(green)),
                         static_cast<std::uint8_t>(std::lround(blue))};
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Point> poly;
    poly.reserve(kGtVertices);
    for (int k = 0; k < kGtVertices; ++k) {
      const double theta = 2 * std::numbers::pi * k / kGtVertices;
      const double r = ring_at(i, theta);
      poly.push_back({cx + r * std::cos(theta), cy + r * std::sin(theta)});
    }
    out.rings.push_back(std::move(poly));
  }
  return out;
}

}  // namespace cstrd
