#include "cstrd/pipeline.hpp"

#include <chrono>

#include "cstrd/edge_filter.hpp"
#include "cstrd/errors.hpp"
#include "cstrd/postprocess.hpp"

namespace cstrd {

DetectionResult detect_rings(const RgbImage& image, double cy, double cx, const DetectParams& params,
                             const ConnectObserver* observer) {
  if (!(cy >= 0 && cx >= 0 && cy < image.height() && cx < image.width())) throw InputError("pith outside image");
  if (params.nr < 3) throw InputError("nr must be >= 3");
  if (params.min_chain_length < 2) throw InputError("min_chain_length must be >= 2");
  if (!(params.alpha > 0 && params.alpha <= 180)) throw InputError("alpha must lie in (0, 180]");
  if (params.height.has_value() != params.width.has_value()) throw InputError("give both height and width");
  if (params.height && (*params.height < 1 || *params.width < 1)) throw InputError("bad output size");

  DetectionResult r;
  using clock = std::chrono::steady_clock;
  auto mark = clock::now();
  auto lap = [&](const char* name) {
    const auto now = clock::now();
    r.timings.emplace_back(name, std::chrono::duration<double>(now - mark).count());
    mark = now;
  };

  r.preprocessed = preprocess(image, params.height, params.width, cy, cx);
  const auto& pre = r.preprocessed;
  lap("preprocess");

  auto edges = detect_edges(pre.gray, {params.sigma, params.th_low, params.th_high});
  r.curves = std::move(edges.curves);
  lap("edge_detection");

  r.filtered = filter_edges(r.curves, pre.cy, pre.cx, edges.gradient, params.alpha, pre.gray);
  lap("edge_filter");

  SamplingParams sp;
  sp.nr = params.nr;
  sp.min_chain_length = params.min_chain_length;
  r.sampled = sampling_edges(r.filtered, pre.cy, pre.cx, pre.height, pre.width, sp);
  lap("sampling");

  r.connected = connect_chains(r.sampled, params.nr, pre.cy, pre.cx, observer);
  lap("connect");

  r.chains = postprocess(r.connected, params.nr, pre.cy, pre.cx);
  r.rings = final_rings(r.chains);
  lap("postprocess");
  return r;
}

}  // namespace cstrd
