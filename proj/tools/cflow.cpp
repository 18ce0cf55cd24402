// cflow: command-line front end for the contour-flow library.
//
// Exit status: 0 success, 1 usage error, 2 I/O error, 3 numeric/domain error.

#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cflow/cflow.hpp"

namespace {

using cflow::io::json;
namespace fs = std::filesystem;

constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitDomain = 3;

void print_json(const json& j) { std::cout << j.dump(2) << '\n'; }

json metrics_json(const cflow::MetricsReport& r) {
  return {{"dice_percent", *r.dice_percent}, {"bd", *r.bd}, {"bdsd", *r.bdsd}};
}

const std::map<std::string, cflow::ShapeKind> kShapes{{"disk", cflow::ShapeKind::Disk},
                                                      {"letter-c", cflow::ShapeKind::LetterC},
                                                      {"two-blobs", cflow::ShapeKind::TwoBlobs},
                                                      {"square", cflow::ShapeKind::Square}};

void add_shape_flags(CLI::App* cmd, cflow::SynthSpec& spec, std::size_t& size) {
  cmd->add_option("--shape", spec.kind, "disk | letter-c | two-blobs | square")
      ->transform(CLI::CheckedTransformer(kShapes, CLI::ignore_case));
  cmd->add_option("--size", size, "Square canvas side in pixels")->capture_default_str();
  cmd->add_option("--radius", spec.radius, "Disk radius / C outer radius / square half side")
      ->capture_default_str();
  cmd->add_option("--thickness", spec.thickness, "Ring width of the C")->capture_default_str();
  cmd->add_option("--opening", spec.opening_deg, "Half-angle of the C gap in degrees")
      ->capture_default_str();
  cmd->add_option("--center-row", spec.center_row, "Shape centre row (default: canvas centre)");
  cmd->add_option("--center-col", spec.center_col, "Shape centre column (default: canvas centre)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contour-flow segmentation toolkit"};
  app.require_subcommand(1);

  // sdt
  std::string sdt_in, sdt_out;
  auto* sdt = app.add_subcommand("sdt", "Signed distance transform of a mask");
  sdt->add_option("--in", sdt_in, "Mask PGM")->required();
  sdt->add_option("--out", sdt_out, "Output field (.cff)")->required();

  // flow
  std::string flow_phi, flow_out;
  bool border_zero = true;
  auto* flow = app.add_subcommand("flow", "Contour flow field of a signed distance function");
  flow->add_option("--phi", flow_phi, "Signed distance field (.cff)")->required();
  flow->add_option("--out", flow_out, "Output flow (.cff)")->required();
  flow->add_flag("--border-zero,!--no-border-zero", border_zero,
                 "Zero the flow on the outermost pixel ring (default on)");

  // refine
  std::string ref_feature, ref_flow, ref_out, ref_mask, ref_trace;
  cflow::RefineConfig ref_cfg;
  double ref_threshold = 0.5;
  auto* refine = app.add_subcommand("refine", "Contour-flow constrained refinement");
  refine->add_option("--feature", ref_feature, "Segmentation feature o (.cff)")->required();
  refine->add_option("--flow", ref_flow, "Contour flow (.cff)")->required();
  refine->add_option("--eps", ref_cfg.eps, "Entropy weight")->capture_default_str();
  refine->add_option("--tau", ref_cfg.tau, "Dual step size")->capture_default_str();
  refine->add_option("--iters", ref_cfg.iters, "Iterations")->capture_default_str();
  refine->add_option("--out", ref_out, "Refined u (.cff)")->required();
  refine->add_option("--mask-out", ref_mask, "Thresholded segmentation (.pgm)");
  refine->add_option("--threshold", ref_threshold, "Threshold for --mask-out")
      ->capture_default_str();
  refine->add_option("--trace", ref_trace, "Per-iteration diagnostics (.json)");

  // loss
  cflow::pipeline::LossRequest loss_req;
  std::string loss_u, loss_flow, loss_phi, loss_gt;
  auto* loss = app.add_subcommand("loss", "Evaluate CE / Dice / shape losses");
  loss->add_option("--u", loss_u, "Segmentation function (.cff)")->required();
  auto* loss_flow_opt = loss->add_option("--flow", loss_flow, "Contour flow (.cff), 2D");
  auto* loss_phi_opt = loss->add_option("--phi", loss_phi, "Signed distance (.cff), 3D loss");
  loss_flow_opt->excludes(loss_phi_opt);
  loss->add_option("--gt", loss_gt, "Ground truth mask (.pgm)");
  loss->add_option("--base", loss_req.base, "Base loss: ce | dice")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, cflow::BaseLoss>{{"ce", cflow::BaseLoss::CE},
                                                 {"dice", cflow::BaseLoss::Dice}},
          CLI::ignore_case));
  loss->add_option("--alpha", loss_req.alpha, "Base loss weight")->capture_default_str();
  loss->add_option("--beta", loss_req.beta, "Shape loss weight")->capture_default_str();

  // metrics
  std::string met_pred, met_gt;
  auto* metrics = app.add_subcommand("metrics", "Dice, BD and BDSD of a segmentation");
  metrics->add_option("--pred", met_pred, "Predicted mask (.pgm)")->required();
  metrics->add_option("--gt", met_gt, "Ground truth mask (.pgm)")->required();

  // flow-metrics
  std::string fm_pred, fm_gt;
  auto* flow_metrics = app.add_subcommand("flow-metrics", "ACS, EPE and ADE between two flows");
  flow_metrics->add_option("--pred", fm_pred, "Predicted flow (.cff)")->required();
  flow_metrics->add_option("--gt", fm_gt, "Reference flow (.cff)")->required();

  // synth
  cflow::SynthSpec synth_spec;
  std::size_t synth_size = 128;
  std::string synth_out, synth_gt;
  auto* synth = app.add_subcommand("synth", "Generate a two-level test image");
  add_shape_flags(synth, synth_spec, synth_size);
  synth->add_option("--out", synth_out, "Image (.pgm)")->required();
  synth->add_option("--gt", synth_gt, "Ground truth mask (.pgm)")->required();

  // corrupt
  cflow::CorruptionSpec cor_spec;
  std::string cor_in, cor_out;
  auto* corrupt = app.add_subcommand("corrupt", "Damage an image");
  corrupt->add_option("--in", cor_in, "Input image (.pgm)")->required();
  corrupt->add_option("--mode", cor_spec.mode, "gaussian | saltpepper | patches")
      ->required()
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, cflow::CorruptionMode>{
              {"gaussian", cflow::CorruptionMode::Gaussian},
              {"saltpepper", cflow::CorruptionMode::SaltPepper},
              {"patches", cflow::CorruptionMode::Patches}},
          CLI::ignore_case));
  corrupt->add_option("--sigma", cor_spec.sigma, "Gaussian std (intensity units)")
      ->capture_default_str();
  corrupt->add_option("--ratio", cor_spec.sp_ratio, "Salt-and-pepper pixel fraction")
      ->capture_default_str();
  corrupt->add_option("--patches", cor_spec.patch_count, "Number of patches")
      ->capture_default_str();
  corrupt->add_option("--patch-size", cor_spec.patch_size, "Patch side")->capture_default_str();
  corrupt->add_option("--seed", cor_spec.seed, "Random seed")->capture_default_str();
  corrupt->add_option("--out", cor_out, "Output image (.pgm)")->required();

  // features
  std::string feat_in, feat_out;
  int feat_k = 2;
  std::uint64_t feat_seed = 0;
  cflow::KMeansOptions feat_opts;
  auto* features = app.add_subcommand("features", "K-means segmentation feature");
  features->add_option("--in", feat_in, "Input image (.pgm)")->required();
  features->add_option("--k", feat_k, "Cluster count (2 only)")->capture_default_str();
  features->add_option("--seed", feat_seed, "Seed (initialisation is deterministic)")
      ->capture_default_str();
  features->add_option("--spread-floor", feat_opts.relative_min_spread,
                       "Spread floor as a fraction of centroid separation")
      ->capture_default_str();
  features->add_option("--out", feat_out, "Feature field (.cff)")->required();

  // demo
  cflow::pipeline::DemoOptions demo_opts;
  std::size_t demo_size = 128;
  std::string demo_dir;
  auto* demo = app.add_subcommand("demo", "Toy recovery experiment end to end");
  demo->add_option("--case", demo_opts.kind, "noise | patch")
      ->required()
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, cflow::pipeline::DemoCase>{
              {"noise", cflow::pipeline::DemoCase::Noise},
              {"patch", cflow::pipeline::DemoCase::Patch}},
          CLI::ignore_case));
  demo->add_option("--workdir", demo_dir, "Directory for intermediates and summary.json")
      ->required();
  demo->add_option("--flow-delta", demo_opts.flow_delta, "Flow noise std")->capture_default_str();
  demo->add_option("--flow-seed", demo_opts.flow_seed, "Flow noise seed")->capture_default_str();
  demo->add_option("--eps", demo_opts.eps, "Entropy weight")->capture_default_str();
  demo->add_option("--tau", demo_opts.tau, "Dual step size")->capture_default_str();
  demo->add_option("--iters", demo_opts.iters, "Iterations (default 100 noise, 1000 patch)");
  demo->add_option("--sigma", demo_opts.corruption.sigma, "Gaussian noise std")
      ->capture_default_str();
  demo->add_option("--patches", demo_opts.corruption.patch_count, "Number of patches")
      ->capture_default_str();
  demo->add_option("--patch-size", demo_opts.corruption.patch_size, "Patch side")
      ->capture_default_str();
  demo->add_option("--seed", demo_opts.corruption.seed, "Corruption seed")->capture_default_str();
  add_shape_flags(demo, demo_opts.shape, demo_size);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*sdt) {
      cflow::pipeline::sdt(sdt_in, sdt_out);
    } else if (*flow) {
      cflow::pipeline::flow(flow_phi, flow_out, border_zero);
    } else if (*refine) {
      cflow::pipeline::RefineOutputs out{ref_out, std::nullopt, ref_threshold, std::nullopt};
      if (!ref_mask.empty()) out.mask_out = ref_mask;
      if (!ref_trace.empty()) out.trace_out = ref_trace;
      const cflow::RefineTrace trace = cflow::pipeline::refine(ref_feature, ref_flow, ref_cfg, out);
      if (trace.size())
        std::cerr << "refine: " << trace.size() << " iterations, orthogonality "
                  << trace.orthogonality.front() << " -> " << trace.orthogonality.back() << '\n';
    } else if (*loss) {
      loss_req.u = loss_u;
      if (!loss_flow.empty()) loss_req.flow = loss_flow;
      if (!loss_phi.empty()) loss_req.phi = loss_phi;
      if (!loss_gt.empty()) loss_req.gt = loss_gt;
      print_json(cflow::io::to_json(cflow::pipeline::loss(loss_req)));
    } else if (*metrics) {
      print_json(metrics_json(cflow::pipeline::metrics(met_pred, met_gt)));
    } else if (*flow_metrics) {
      const cflow::MetricsReport r = cflow::pipeline::flow_metrics(fm_pred, fm_gt);
      print_json({{"acs", *r.acs}, {"epe", *r.epe}, {"ade", *r.ade}});
    } else if (*synth) {
      synth_spec.rows = synth_spec.cols = synth_size;
      cflow::pipeline::synth(synth_spec, synth_out, synth_gt);
    } else if (*corrupt) {
      cflow::pipeline::corrupt(cor_in, cor_spec, cor_out);
    } else if (*features) {
      cflow::pipeline::features(feat_in, feat_k, feat_seed, feat_opts, feat_out);
    } else if (*demo) {
      demo_opts.shape.rows = demo_opts.shape.cols = demo_size;
      const auto s = cflow::pipeline::demo(demo_opts, demo_dir);
      std::cerr << "demo " << cflow::pipeline::to_string(demo_opts.kind) << ": dice "
                << *s.unrefined.dice_percent << " -> " << *s.refined.dice_percent << ", bd "
                << *s.unrefined.bd << " -> " << *s.refined.bd << ", bdsd " << *s.unrefined.bdsd
                << " -> " << *s.refined.bdsd << " (" << s.seconds << " s)\n";
      print_json(s.document);
    }
  } catch (const cflow::Error& e) {
    std::cerr << "cflow: " << e.what() << '\n';
    return e.is_io() ? kExitIo : kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "cflow: " << e.what() << '\n';
    return kExitDomain;
  }
  return 0;
}
