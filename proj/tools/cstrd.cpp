#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "cstrd/errors.hpp"
#include "cstrd/io.hpp"
#include "cstrd/metrics.hpp"
#include "cstrd/pipeline.hpp"
#include "cstrd/synthetic.hpp"

namespace fs = std::filesystem;
using namespace cstrd;

namespace {

constexpr int kOk = 0;
constexpr int kBadArgs = 2;
constexpr int kBadImage = 3;
constexpr int kBadPith = 4;

struct DetectOptions {
  DetectParams params;
  int height = 0;
  int width = 0;
  std::string output = ".";
};

void add_detect_flags(CLI::App* cmd, DetectOptions& o) {
  cmd->add_option("--sigma", o.params.sigma, "Gaussian sigma")->capture_default_str();
  cmd->add_option("--th_low", o.params.th_low, "Low hysteresis threshold")->capture_default_str();
  cmd->add_option("--th_high", o.params.th_high, "High hysteresis threshold")->capture_default_str();
  cmd->add_option("--alpha", o.params.alpha, "Edge filter angle (degrees)")->capture_default_str();
  cmd->add_option("--nr", o.params.nr, "Number of rays")->capture_default_str();
  cmd->add_option("--min_chain_length", o.params.min_chain_length, "Minimum chain size")->capture_default_str();
  cmd->add_option("--height", o.height, "Working height (0 keeps the native size)");
  cmd->add_option("--width", o.width, "Working width (0 keeps the native size)");
  cmd->add_option("--output", o.output, "Output directory")->capture_default_str();
}

void finalize(DetectOptions& o) {
  if (o.height > 0 || o.width > 0) {
    o.params.height = o.height;
    o.params.width = o.width;
  }
}

struct ImageOutcome {
  int code = kOk;
  std::string message;
  std::vector<std::vector<Point>> polygons;  // original coordinates
  double seconds = 0;
};

ImageOutcome run_detect(const std::string& path, double cy, double cx, const DetectOptions& o) {
  ImageOutcome out;
  RgbImage image;
  try {
    image = read_image(path);
  } catch (const IoError& e) {
    return {kBadImage, e.what(), {}, 0};
  }
  if (!(cy >= 0 && cx >= 0 && cy < image.height() && cx < image.width())) {
    return {kBadPith, "pith outside image", {}, 0};
  }
  DetectionResult r;
  try {
    r = detect_rings(image, cy, cx, o.params);
  } catch (const InputError& e) {
    return {kBadArgs, e.what(), {}, 0};
  }
  const auto& pre = r.preprocessed;
  const auto doc = chains_to_labelme(r.rings, image.height(), image.width(), pre.sy, pre.sx,
                                     fs::path(path).filename().string());
  for (const auto& s : doc["shapes"]) {
    std::vector<Point> poly;
    for (const auto& p : s["points"]) poly.push_back({p[0].get<double>(), p[1].get<double>()});
    out.polygons.push_back(std::move(poly));
  }
  for (const auto& t : r.timings) out.seconds += t.second;

  fs::create_directories(o.output);
  const std::string stem = (fs::path(o.output) / fs::path(path).stem()).string();
  write_json(stem + ".json", doc);
  write_image(stem + "_overlay.png", render_overlay(image, out.polygons));
  std::ofstream log(stem + "_timing.log");
  for (const auto& t : r.timings) log << t.first << ' ' << t.second << '\n';
  log << "total " << out.seconds << '\n';
  out.message = std::to_string(r.rings.size()) + " rings";
  return out;
}

std::vector<RingPolyline> rasterize_all(const LabelmeDocument& doc, double cy, double cx, int nr) {
  std::vector<RingPolyline> out;
  for (const auto& p : doc.polygons) out.push_back(rasterize_polygon(p, cy, cx, nr));
  return out;
}

MetricsReport evaluate_docs(const LabelmeDocument& dt, const LabelmeDocument& gt, double cy, double cx, int nr,
                            double th_pre) {
  if (gt.image_height != dt.image_height || gt.image_width != dt.image_width) {
    throw InputError("detection and GT image sizes differ");
  }
  const auto cap = ray_lengths(nr, gt.image_height, gt.image_width, cy, cx);
  return evaluate_rings(rasterize_all(dt, cy, cx, nr), rasterize_all(gt, cy, cx, nr), th_pre, cap);
}

int thread_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CSTRD_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, static_cast<unsigned>(cap));
  }
  return static_cast<int>(n);
}

struct BatchItem {
  std::string image;
  double cy = 0, cx = 0;
  std::string gt;
};

std::vector<BatchItem> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read manifest " + path);
  std::vector<BatchItem> items;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::vector<std::string> cols;
    std::string col;
    while (std::getline(ss, col, ',')) cols.push_back(col);
    if (cols.size() < 3) throw InputError("manifest line needs image,cy,cx[,gt]: " + line);
    BatchItem it;
    it.image = cols[0];
    try {
      it.cy = std::stod(cols[1]);
      it.cx = std::stod(cols[2]);
    } catch (const std::exception&) {
      throw InputError("bad pith in manifest line: " + line);
    }
    if (cols.size() > 3) it.gt = cols[3];
    items.push_back(it);
  }
  return items;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tree ring detection on wood cross-section images"};
  app.set_config("--config", "", "Flat key=value file; flags override it");
  app.require_subcommand(1);

  DetectOptions det;
  std::string det_input;
  double det_cy = -1, det_cx = -1;
  auto* detect = app.add_subcommand("detect", "Detect rings in one image");
  detect->add_option("input", det_input, "Input image")->required();
  detect->add_option("--cy", det_cy, "Pith row")->required();
  detect->add_option("--cx", det_cx, "Pith column")->required();
  add_detect_flags(detect, det);

  std::string ev_dt, ev_gt, ev_report;
  double ev_cy = -1, ev_cx = -1, ev_th = kDefaultThPre;
  int ev_nr = 360;
  auto* evaluate = app.add_subcommand("evaluate", "Score detections against ground truth");
  evaluate->add_option("--dt", ev_dt, "Detection Labelme JSON")->required();
  evaluate->add_option("--gt", ev_gt, "Ground-truth Labelme JSON")->required();
  evaluate->add_option("--cy", ev_cy, "Pith row")->required();
  evaluate->add_option("--cx", ev_cx, "Pith column")->required();
  evaluate->add_option("--nr", ev_nr, "Number of rays")->capture_default_str();
  evaluate->add_option("--th-pre,--th_pre", ev_th, "Minimum percentage of nodes in the influence area")
      ->capture_default_str();
  evaluate->add_option("--report", ev_report, "Report path (.json; a .csv twin is written next to it)");

  int sy_rings = 10, sy_size = 1500;
  double sy_spacing = 25, sy_deform = 0;
  bool sy_crack = false, sy_stain = false, sy_gap = false;
  std::uint64_t sy_seed = 0;
  std::string sy_out = "synth";
  auto* synth = app.add_subcommand("synth", "Generate a synthetic disk and its ground truth");
  synth->add_option("--rings", sy_rings, "Ring count")->capture_default_str();
  synth->add_option("--spacing", sy_spacing, "Ring spacing in pixels")->capture_default_str();
  synth->add_option("--deform", sy_deform, "Deformation as a fraction of the spacing")->capture_default_str();
  synth->add_flag("--crack", sy_crack, "Add a crack wedge");
  synth->add_flag("--stain", sy_stain, "Add a stain");
  synth->add_flag("--gap", sy_gap, "Add an arc gap");
  synth->add_option("--seed", sy_seed, "Random seed")->capture_default_str();
  synth->add_option("--size", sy_size, "Canvas size")->capture_default_str();
  synth->add_option("--out", sy_out, "Output prefix (writes .png and .json)")->capture_default_str();

  DetectOptions bat;
  std::string bat_manifest;
  double bat_th = kDefaultThPre;
  auto* batch = app.add_subcommand("batch", "Detect rings in every image of a manifest");
  batch->add_option("manifest", bat_manifest, "CSV lines: image,cy,cx[,gt_json]")->required();
  batch->add_option("--th-pre,--th_pre", bat_th, "Evaluation threshold")->capture_default_str();
  add_detect_flags(batch, bat);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadArgs;
  }

  try {
    if (*detect) {
      finalize(det);
      const auto out = run_detect(det_input, det_cy, det_cx, det);
      if (out.code != kOk) {
        std::cerr << "error: " << out.message << '\n';
        return out.code;
      }
      std::cout << det_input << ": " << out.message << " in " << out.seconds << " s\n";
      return kOk;
    }

    if (*evaluate) {
      const auto dt = read_labelme(ev_dt);
      const auto gt = read_labelme(ev_gt);
      const auto r = evaluate_docs(dt, gt, ev_cy, ev_cx, ev_nr, ev_th);
      std::printf("P=%.4f R=%.4f F=%.4f RMSE=%.4f TP=%d FP=%d FN=%d\n", r.precision, r.recall, r.f_score, r.rmse,
                  r.tp, r.fp, r.fn);
      if (!ev_report.empty()) {
        const std::string name = fs::path(ev_dt).stem().string();
        write_json(ev_report, report_json(r, name, 0.0));
        std::ofstream csv(fs::path(ev_report).replace_extension(".csv"));
        csv << csv_header() << '\n' << csv_row(r, name, 0.0) << '\n';
      }
      return kOk;
    }

    if (*synth) {
      if (sy_rings < 1 || sy_spacing <= 0 || sy_size < 16) throw InputError("invalid synthetic spec");
      DiskSpec spec;
      for (int k = 1; k <= sy_rings; ++k) spec.radii.push_back(k * sy_spacing);
      spec.deformation = sy_deform;
      spec.crack = sy_crack;
      spec.stain = sy_stain;
      spec.gap = sy_gap;
      spec.seed = sy_seed;
      spec.size = sy_size;
      const auto disk = generate_disk(spec);
      const fs::path prefix(sy_out);
      if (prefix.has_parent_path()) fs::create_directories(prefix.parent_path());
      write_image(sy_out + ".png", disk.image);
      write_json(sy_out + ".json", polygons_to_labelme(disk.rings, disk.image.height(), disk.image.width(),
                                                       prefix.filename().string() + ".png"));
      std::printf("%s.png pith cy=%.1f cx=%.1f\n", sy_out.c_str(), disk.cy, disk.cx);
      return kOk;
    }

    if (*batch) {
      finalize(bat);
      const auto items = read_manifest(bat_manifest);
      std::vector<ImageOutcome> outcomes(items.size());
      std::vector<std::string> rows(items.size());
      std::atomic<std::size_t> next{0};
      std::mutex io_lock;
      auto worker = [&] {
        for (std::size_t i = next++; i < items.size(); i = next++) {
          const auto& it = items[i];
          ImageOutcome o;
          try {
            o = run_detect(it.image, it.cy, it.cx, bat);
            if (o.code == kOk && !it.gt.empty()) {
              const auto gt = read_labelme(it.gt);
              LabelmeDocument dt;
              dt.image_height = gt.image_height;
              dt.image_width = gt.image_width;
              dt.polygons = o.polygons;
              const auto r = evaluate_docs(dt, gt, it.cy, it.cx, bat.params.nr, bat_th);
              rows[i] = csv_row(r, fs::path(it.image).stem().string(), o.seconds);
            }
          } catch (const IoError& e) {
            o = {kBadImage, e.what(), {}, 0};
          } catch (const std::exception& e) {
            o = {kBadArgs, e.what(), {}, 0};
          }
          std::lock_guard<std::mutex> lock(io_lock);
          std::cerr << it.image << ": " << (o.code == kOk ? "" : "error: ") << o.message << '\n';
          outcomes[i] = std::move(o);
        }
      };
      std::vector<std::thread> pool;
      const int n = std::min<int>(thread_count(), static_cast<int>(std::max<std::size_t>(items.size(), 1)));
      for (int t = 0; t < n; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();

      if (std::any_of(rows.begin(), rows.end(), [](const std::string& s) { return !s.empty(); })) {
        fs::create_directories(bat.output);
        std::ofstream csv(fs::path(bat.output) / "results.csv");
        csv << csv_header() << '\n';
        for (const auto& r : rows) {
          if (!r.empty()) csv << r << '\n';
        }
      }
      int code = kOk;
      for (const auto& o : outcomes) code = std::max(code, o.code);
      return code;
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadArgs;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadImage;
  }
  return kOk;
}
