#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cstrd/errors.hpp"
#include "cstrd/io.hpp"
#include "cstrd/metrics.hpp"
#include "cstrd/pipeline.hpp"
#include "cstrd/synthetic.hpp"

namespace py = pybind11;
using namespace cstrd;

namespace {

using ImageArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

RgbImage to_image(const ImageArray& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) throw InputError("image must be an HxWx3 uint8 array");
  const int h = static_cast<int>(a.shape(0)), w = static_cast<int>(a.shape(1));
  RgbImage img(h, w);
  auto v = a.unchecked<3>();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) img(y, x) = {v(y, x, 0), v(y, x, 1), v(y, x, 2)};
  }
  return img;
}

ImageArray from_image(const RgbImage& img) {
  ImageArray a({img.height(), img.width(), 3});
  auto v = a.mutable_unchecked<3>();
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const Rgb p = img(y, x);
      v(y, x, 0) = p.r;
      v(y, x, 1) = p.g;
      v(y, x, 2) = p.b;
    }
  }
  return a;
}

using Polygon = std::vector<std::pair<double, double>>;

Polygon to_py(const std::vector<Point>& poly) {
  Polygon out;
  for (const auto& p : poly) out.emplace_back(p.x, p.y);
  return out;
}

std::vector<Point> from_py(const Polygon& poly) {
  std::vector<Point> out;
  for (const auto& p : poly) out.push_back({p.first, p.second});
  return out;
}

py::dict report_dict(const MetricsReport& r) {
  py::dict d;
  d["TP"] = r.tp;
  d["FP"] = r.fp;
  d["TN"] = r.tn;
  d["FN"] = r.fn;
  d["P"] = r.precision;
  d["R"] = r.recall;
  d["F"] = r.f_score;
  d["RMSE"] = r.rmse;
  d["assignment"] = r.assignment;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

  py::class_<DetectParams>(m, "DetectParams")
      .def(py::init<>())
      .def_readwrite("sigma", &DetectParams::sigma)
      .def_readwrite("th_low", &DetectParams::th_low)
      .def_readwrite("th_high", &DetectParams::th_high)
      .def_readwrite("alpha", &DetectParams::alpha)
      .def_readwrite("nr", &DetectParams::nr)
      .def_readwrite("min_chain_length", &DetectParams::min_chain_length)
      .def_readwrite("height", &DetectParams::height)
      .def_readwrite("width", &DetectParams::width);

  m.def(
      "detect",
      [](const ImageArray& image, double cy, double cx, const DetectParams& params) {
        const RgbImage img = to_image(image);
        DetectionResult r;
        {
          py::gil_scoped_release release;
          r = detect_rings(img, cy, cx, params);
        }
        std::vector<Polygon> rings;
        for (const auto& c : r.rings) {
          Polygon poly;
          for (const auto& n : c.nodes()) poly.emplace_back(n.x / r.preprocessed.sx, n.y / r.preprocessed.sy);
          rings.push_back(std::move(poly));
        }
        py::dict timings;
        for (const auto& t : r.timings) timings[py::str(t.first)] = t.second;
        return py::make_tuple(rings, timings);
      },
      py::arg("image"), py::arg("cy"), py::arg("cx"), py::arg("params") = DetectParams{},
      "Rings (innermost first) as lists of (x, y) in image coordinates, plus stage timings.");

  m.def(
      "generate_disk",
      [](const std::vector<double>& radii, double deformation, bool crack, bool stain, bool gap,
         std::uint64_t seed, int size) {
        DiskSpec spec;
        spec.radii = radii;
        spec.deformation = deformation;
        spec.crack = crack;
        spec.stain = stain;
        spec.gap = gap;
        spec.seed = seed;
        spec.size = size;
        const auto disk = generate_disk(spec);
        std::vector<Polygon> rings;
        for (const auto& r : disk.rings) rings.push_back(to_py(r));
        return py::make_tuple(from_image(disk.image), rings, disk.cy, disk.cx);
      },
      py::arg("radii"), py::arg("deformation") = 0.0, py::arg("crack") = false, py::arg("stain") = false,
      py::arg("gap") = false, py::arg("seed") = 0, py::arg("size") = 1500,
      "Returns (image, gt_rings, cy, cx).");

  m.def("random_radii", &random_radii, py::arg("count"), py::arg("outer"), py::arg("seed"));

  m.def(
      "evaluate",
      [](const std::vector<Polygon>& dt, const std::vector<Polygon>& gt, double cy, double cx, int height,
         int width, int nr, double th_pre) {
        std::vector<RingPolyline> d, g;
        for (const auto& p : dt) d.push_back(rasterize_polygon(from_py(p), cy, cx, nr));
        for (const auto& p : gt) g.push_back(rasterize_polygon(from_py(p), cy, cx, nr));
        return report_dict(evaluate_rings(d, g, th_pre, ray_lengths(nr, height, width, cy, cx)));
      },
      py::arg("dt"), py::arg("gt"), py::arg("cy"), py::arg("cx"), py::arg("height"), py::arg("width"),
      py::arg("nr") = 360, py::arg("th_pre") = kDefaultThPre);

  m.def(
      "scores_from_counts",
      [](int tp, int fp, int fn) {
        MetricsReport r;
        r.tp = tp;
        r.fp = fp;
        r.fn = fn;
        fill_scores(r);
        return py::make_tuple(r.precision, r.recall, r.f_score);
      },
      py::arg("tp"), py::arg("fp"), py::arg("fn"));
}
