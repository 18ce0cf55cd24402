#ifndef CFLOW_PIPELINE_HPP
#define CFLOW_PIPELINE_HPP

// File-to-file steps behind the command-line tool. Each step reads its inputs
// from disk and writes its outputs, so a demo run and a manual rerun of the
// same steps see exactly the same (float32-serialised) intermediates.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "cflow/distance.hpp"
#include "cflow/fields.hpp"
#include "cflow/flow.hpp"
#include "cflow/io.hpp"
#include "cflow/losses.hpp"
#include "cflow/refine.hpp"
#include "cflow/segmetrics.hpp"
#include "cflow/synth.hpp"

namespace cflow::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

inline void sdt(const fs::path& mask_in, const fs::path& phi_out) {
  io::write_field(phi_out, signed_distance(io::read_pgm_mask(mask_in)).phi);
}

inline void flow(const fs::path& phi_in, const fs::path& flow_out, bool zero_border = true) {
  FlowOptions opts;
  opts.zero_border = zero_border;
  io::write_field(flow_out, contour_flow(io::read_scalar_field(phi_in), opts).field);
}

inline void perturb(const fs::path& flow_in, double delta, std::uint64_t seed,
                    const fs::path& flow_out) {
  io::write_field(flow_out, perturb_flow(io::read_flow(flow_in), delta, seed).field);
}

struct RefineOutputs {
  fs::path u_out;
  std::optional<fs::path> mask_out;
  double threshold = 0.5;
  std::optional<fs::path> trace_out;
};

inline RefineTrace refine(const fs::path& feature_in, const fs::path& flow_in, RefineConfig cfg,
                          const RefineOutputs& out) {
  cfg.record_trace = cfg.record_trace || out.trace_out.has_value();
  const ScalarField o = io::read_scalar_field(feature_in);
  const ContourFlow f = io::read_flow(flow_in);
  RefineResult r = cflow::refine(o, f, cfg);
  io::write_field(out.u_out, r.u);
  if (out.mask_out) io::write_pgm(*out.mask_out, threshold(r.u, out.threshold));
  if (out.trace_out) io::write_report(*out.trace_out, r.trace);
  return std::move(r.trace);
}

struct LossRequest {
  fs::path u;
  std::optional<fs::path> flow;
  std::optional<fs::path> phi;
  std::optional<fs::path> gt;
  BaseLoss base = BaseLoss::CE;
  double alpha = 1.0;
  double beta = 1.0;
};

/// Picks the loss from the inputs given: a volume with --phi gives the 3D shape
/// loss; a flow alone gives the 2D shape loss; a flow plus ground truth gives the
/// combined loss; ground truth alone gives the base loss.
inline LossValue loss(const LossRequest& req) {
  const ScalarField u = io::read_scalar_field(req.u);
  if (req.phi) return shape_loss_3d(u, io::read_scalar_field(*req.phi));
  std::optional<BinaryMask> gt;
  if (req.gt) gt = io::read_pgm_mask(*req.gt);
  if (req.flow) {
    const ContourFlow f = io::read_flow(*req.flow);
    if (gt) return combined_loss(u, *gt, f, req.alpha, req.beta, req.base);
    return shape_loss_2d(u, f);
  }
  if (gt) return req.base == BaseLoss::CE ? ce_loss(u, *gt) : dice_loss(u, *gt);
  throw Error(ErrorKind::InvalidArgument, "loss needs --flow, --phi or --gt");
}

inline MetricsReport metrics(const fs::path& pred, const fs::path& gt) {
  return segmentation_metrics(io::read_pgm_mask(pred), io::read_pgm_mask(gt));
}

inline MetricsReport flow_metrics(const fs::path& pred, const fs::path& gt) {
  return cflow::flow_metrics(io::read_flow(pred), io::read_flow(gt));
}

inline void synth(const SynthSpec& spec, const fs::path& image_out, const fs::path& gt_out) {
  const SynthResult r = synthesize(spec);
  io::write_pgm(image_out, r.image);
  io::write_pgm(gt_out, r.gt);
}

inline void corrupt(const fs::path& image_in, const CorruptionSpec& spec, const fs::path& out) {
  io::write_pgm(out, cflow::corrupt(io::read_pgm(image_in), spec));
}

inline void features(const fs::path& image_in, int k, std::uint64_t seed,
                     const KMeansOptions& opts, const fs::path& out) {
  io::write_field(out, kmeans_features(io::read_pgm(image_in), k, seed, opts));
}

enum class DemoCase { Noise, Patch };

struct DemoOptions {
  DemoCase kind = DemoCase::Noise;
  SynthSpec shape{};
  CorruptionSpec corruption{};
  KMeansOptions kmeans{};
  std::uint64_t kmeans_seed = 0;
  double eps = 10.0;
  double tau = 10.0;
  /// 0 selects the per-case default: 100 for noise, 1000 for patches.
  int iters = 0;
  double flow_delta = 0.0;
  std::uint64_t flow_seed = 7;
  double threshold = 0.5;

  int effective_iters() const {
    return iters > 0 ? iters : (kind == DemoCase::Noise ? 100 : 1000);
  }
};

struct DemoSummary {
  MetricsReport unrefined;
  MetricsReport refined;
  RefineTrace trace;
  double seconds = 0.0;
  json document;
};

inline const char* to_string(DemoCase c) { return c == DemoCase::Noise ? "noise" : "patch"; }

/// synth -> corrupt -> features -> sdt -> flow -> (perturb) -> refine -> metrics,
/// with every intermediate written to `workdir` and a summary.json comparing the
/// unrefined and refined segmentations.
inline DemoSummary demo(const DemoOptions& opts, const fs::path& workdir) {
  const auto t0 = std::chrono::steady_clock::now();
  std::error_code ec;
  fs::create_directories(workdir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + workdir.string() + ": " + ec.message());

  const fs::path image = workdir / "image.pgm";
  const fs::path gt = workdir / "gt.pgm";
  const fs::path damaged = workdir / "corrupted.pgm";
  const fs::path feature = workdir / "feature.cff";
  const fs::path phi = workdir / "phi.cff";
  const fs::path gt_flow = workdir / "flow_gt.cff";
  const fs::path used_flow = workdir / "flow.cff";
  const fs::path u0 = workdir / "u_unrefined.cff";
  const fs::path seg0 = workdir / "seg_unrefined.pgm";
  const fs::path u = workdir / "u.cff";
  const fs::path seg = workdir / "seg.pgm";
  const fs::path trace_path = workdir / "trace.json";

  CorruptionSpec damage = opts.corruption;
  damage.mode = opts.kind == DemoCase::Noise ? CorruptionMode::Gaussian : CorruptionMode::Patches;

  synth(opts.shape, image, gt);
  corrupt(image, damage, damaged);
  features(damaged, 2, opts.kmeans_seed, opts.kmeans, feature);
  sdt(gt, phi);
  flow(phi, gt_flow);
  perturb(gt_flow, opts.flow_delta, opts.flow_seed, used_flow);

  // Unrefined baseline: the soft-threshold solution of the raw feature.
  const ScalarField u_plain = map_sigmoid(io::read_scalar_field(feature), opts.eps);
  io::write_field(u0, u_plain);
  io::write_pgm(seg0, threshold(u_plain, opts.threshold));

  const RefineConfig cfg{opts.eps, opts.tau, opts.effective_iters(), true};
  DemoSummary s;
  s.trace = refine(feature, used_flow, cfg, {u, seg, opts.threshold, trace_path});
  s.unrefined = metrics(seg0, gt);
  s.refined = metrics(seg, gt);
  s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const auto pick = [](const MetricsReport& m) {
    return json{{"dice_percent", *m.dice_percent}, {"bd", *m.bd}, {"bdsd", *m.bdsd}};
  };
  json doc;
  doc["case"] = to_string(opts.kind);
  doc["params"] = {{"eps", opts.eps},
                   {"tau", opts.tau},
                   {"iters", cfg.iters},
                   {"threshold", opts.threshold},
                   {"flow_delta", opts.flow_delta},
                   {"flow_seed", opts.flow_seed},
                   {"corruption_seed", damage.seed},
                   {"sigma", damage.sigma},
                   {"patch_count", damage.patch_count},
                   {"patch_size", damage.patch_size},
                   {"rows", opts.shape.rows},
                   {"cols", opts.shape.cols}};
  doc["unrefined"] = pick(s.unrefined);
  doc["refined"] = pick(s.refined);
  doc["orthogonality_first"] = s.trace.orthogonality.front();
  doc["orthogonality_last"] = s.trace.orthogonality.back();
  if (s.trace.size() >= 100) doc["orthogonality_at_100"] = s.trace.orthogonality[99];
  doc["seconds"] = s.seconds;
  io::write_json(workdir / "summary.json", doc);
  s.document = std::move(doc);
  return s;
}

}  // namespace cflow::pipeline

#endif  // CFLOW_PIPELINE_HPP
