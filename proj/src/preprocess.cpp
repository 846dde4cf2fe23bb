#include "cstrd/preprocess.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "cstrd/errors.hpp"

namespace cstrd {

namespace {

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

double lanczos3(double x) { return (x > -3.0 && x < 3.0) ? sinc(x) * sinc(x / 3.0) : 0.0; }

struct Taps {
  int first = 0;
  std::vector<double> w;
};

std::vector<Taps> lanczos_taps(int in_size, int out_size) {
  const double scale = static_cast<double>(in_size) / out_size;
  const double filter_scale = std::max(scale, 1.0);
  const double support = 3.0 * filter_scale;
  std::vector<Taps> taps(static_cast<std::size_t>(out_size));
  for (int o = 0; o < out_size; ++o) {
    const double center = (o + 0.5) * scale;
    const int lo = std::max(static_cast<int>(center - support + 0.5), 0);
    const int hi = std::min(static_cast<int>(center + support + 0.5), in_size);
    Taps& t = taps[static_cast<std::size_t>(o)];
    t.first = lo;
    double total = 0;
    for (int i = lo; i < hi; ++i) {
      const double w = lanczos3((i - center + 0.5) / filter_scale);
      t.w.push_back(w);
      total += w;
    }
    if (total != 0.0) {
      for (auto& w : t.w) w /= total;
    }
  }
  return taps;
}

// Resamples `channels` interleaved planes stored as doubles.
std::vector<double> resample(const std::vector<double>& src, int h, int w, int ch, int ho, int wo) {
  const auto tx = lanczos_taps(w, wo);
  const auto ty = lanczos_taps(h, ho);
  std::vector<double> mid(static_cast<std::size_t>(h) * wo * ch, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < wo; ++x) {
      const Taps& t = tx[static_cast<std::size_t>(x)];
      for (int c = 0; c < ch; ++c) {
        double acc = 0;
        for (std::size_t k = 0; k < t.w.size(); ++k) {
          acc += t.w[k] * src[(static_cast<std::size_t>(y) * w + t.first + k) * ch + c];
        }
        mid[(static_cast<std::size_t>(y) * wo + x) * ch + c] = acc;
      }
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ho) * wo * ch, 0.0);
  for (int y = 0; y < ho; ++y) {
    const Taps& t = ty[static_cast<std::size_t>(y)];
    for (std::size_t k = 0; k < t.w.size(); ++k) {
      const double wk = t.w[k];
      const double* row = &mid[(static_cast<std::size_t>(t.first) + k) * wo * ch];
      double* dst = &out[static_cast<std::size_t>(y) * wo * ch];
      for (int i = 0; i < wo * ch; ++i) dst[i] += wk * row[i];
    }
  }
  return out;
}

std::uint8_t clamp_u8(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

int reflect101(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

}  // namespace

RgbImage resize_lanczos(const RgbImage& image, int height_out, int width_out) {
  if (height_out <= 0 || width_out <= 0) throw InputError("resize to zero dimension");
  if (image.empty()) throw InputError("empty image");
  const int h = image.height(), w = image.width();
  std::vector<double> src(static_cast<std::size_t>(h) * w * 3);
  for (std::size_t i = 0; i < image.size(); ++i) {
    src[i * 3] = image.data()[i].r;
    src[i * 3 + 1] = image.data()[i].g;
    src[i * 3 + 2] = image.data()[i].b;
  }
  const auto out = resample(src, h, w, 3, height_out, width_out);
  RgbImage res(height_out, width_out);
  for (std::size_t i = 0; i < res.size(); ++i) {
    res.data()[i] = {clamp_u8(out[i * 3]), clamp_u8(out[i * 3 + 1]), clamp_u8(out[i * 3 + 2])};
  }
  return res;
}

FloatImage resize_lanczos(const FloatImage& image, int height_out, int width_out) {
  if (height_out <= 0 || width_out <= 0) throw InputError("resize to zero dimension");
  if (image.empty()) throw InputError("empty image");
  FloatImage res(height_out, width_out);
  res.data() = resample(image.data(), image.height(), image.width(), 1, height_out, width_out);
  return res;
}

GrayImage to_gray(const RgbImage& image) {
  GrayImage g(image.height(), image.width());
  for (std::size_t i = 0; i < image.size(); ++i) {
    const Rgb p = image.data()[i];
    if (p.r == 255 && p.g == 255 && p.b == 255) {
      g.data()[i] = 255;
      continue;
    }
    const double y = 0.299 * p.r + 0.587 * p.g + 0.114 * p.b;
    g.data()[i] = static_cast<std::uint8_t>(std::min(std::lround(y), 254L));
  }
  return g;
}

GrayImage clahe(const GrayImage& image, const ClaheParams& params) {
  const int h = image.height(), w = image.width();
  const int ntx = params.tiles_x, nty = params.tiles_y;
  if (h == 0 || w == 0) return image;
  if (ntx <= 0 || nty <= 0) throw InputError("tile grid must be positive");
  // pad to a multiple of the grid (reflect-101), as the reference implementation does
  const int wp = w % ntx == 0 ? w : w + ntx - w % ntx;
  const int hp = h % nty == 0 ? h : h + nty - h % nty;
  const int tw = wp / ntx, th = hp / nty;
  const int area = tw * th;
  const int clip = params.clip_limit > 0
                       ? std::max(static_cast<int>(params.clip_limit * area / 256.0), 1)
                       : 0;

  std::vector<std::array<std::uint8_t, 256>> luts(static_cast<std::size_t>(ntx) * nty);
  for (int ty = 0; ty < nty; ++ty) {
    for (int tx = 0; tx < ntx; ++tx) {
      std::array<int, 256> hist{};
      for (int y = ty * th; y < (ty + 1) * th; ++y) {
        const int sy = reflect101(y, h);
        for (int x = tx * tw; x < (tx + 1) * tw; ++x) ++hist[image(sy, reflect101(x, w))];
      }
      if (clip > 0) {
        int clipped = 0;
        for (auto& v : hist) {
          if (v > clip) {
            clipped += v - clip;
            v = clip;
          }
        }
        const int batch = clipped / 256;
        int residual = clipped - batch * 256;
        for (auto& v : hist) v += batch;
        if (residual != 0) {
          const int step = std::max(256 / residual, 1);
          for (int i = 0; i < 256 && residual > 0; i += step, --residual) ++hist[static_cast<std::size_t>(i)];
        }
      }
      auto& lut = luts[static_cast<std::size_t>(ty) * ntx + tx];
      const double scale = 255.0 / area;
      int sum = 0;
      for (int i = 0; i < 256; ++i) {
        sum += hist[static_cast<std::size_t>(i)];
        lut[static_cast<std::size_t>(i)] = clamp_u8(sum * scale);
      }
    }
  }

  GrayImage out(h, w);
  const double inv_tw = 1.0 / tw, inv_th = 1.0 / th;
  for (int y = 0; y < h; ++y) {
    const double tyf = y * inv_th - 0.5;
    int ty1 = static_cast<int>(std::floor(tyf));
    int ty2 = ty1 + 1;
    const double ya = tyf - ty1, ya1 = 1.0 - ya;
    ty1 = std::max(ty1, 0);
    ty2 = std::min(ty2, nty - 1);
    for (int x = 0; x < w; ++x) {
      const double txf = x * inv_tw - 0.5;
      int tx1 = static_cast<int>(std::floor(txf));
      int tx2 = tx1 + 1;
      const double xa = txf - tx1, xa1 = 1.0 - xa;
      tx1 = std::max(tx1, 0);
      tx2 = std::min(tx2, ntx - 1);
      const std::size_t v = image(y, x);
      const auto& l11 = luts[static_cast<std::size_t>(ty1) * ntx + tx1];
      const auto& l12 = luts[static_cast<std::size_t>(ty1) * ntx + tx2];
      const auto& l21 = luts[static_cast<std::size_t>(ty2) * ntx + tx1];
      const auto& l22 = luts[static_cast<std::size_t>(ty2) * ntx + tx2];
      const double r = (l11[v] * xa1 + l12[v] * xa) * ya1 + (l21[v] * xa1 + l22[v] * xa) * ya;
      out(y, x) = clamp_u8(r);
    }
  }
  return out;
}

GrayImage equalize(const GrayImage& gray, const ClaheParams& params) {
  double sum = 0;
  std::size_t count = 0;
  for (auto v : gray.data()) {
    if (v != 255) {
      sum += v;
      ++count;
    }
  }
  if (count == 0) return gray;
  const auto mean = static_cast<std::uint8_t>(std::lround(sum / static_cast<double>(count)));
  GrayImage filled = gray;
  for (auto& v : filled.data()) {
    if (v == 255) v = mean;
  }
  GrayImage eq = clahe(filled, params);
  for (std::size_t i = 0; i < eq.size(); ++i) {
    if (gray.data()[i] == 255) {
      eq.data()[i] = 255;
    } else if (eq.data()[i] == 255) {
      eq.data()[i] = 254;  // keep the background mask unchanged
    }
  }
  return eq;
}

PreprocessedImage preprocess(const RgbImage& image, std::optional<int> height_out,
                             std::optional<int> width_out, double cy, double cx) {
  if (image.empty()) throw InputError("empty image");
  if (!(cy >= 0 && cx >= 0 && cy < image.height() && cx < image.width())) {
    throw InputError("pith outside image");
  }
  PreprocessedImage out;
  out.cy = cy;
  out.cx = cx;
  RgbImage work;
  const RgbImage* src = &image;
  if (height_out && width_out) {
    if (*height_out <= 0 || *width_out <= 0) throw InputError("zero-dimension resize request");
    work = resize_lanczos(image, *height_out, *width_out);
    out.sy = static_cast<double>(*height_out) / image.height();
    out.sx = static_cast<double>(*width_out) / image.width();
    out.cy = cy * out.sy;
    out.cx = cx * out.sx;
    src = &work;
  }
  out.gray = equalize(to_gray(*src));
  out.height = out.gray.height();
  out.width = out.gray.width();
  return out;
}

}  // namespace cstrd
