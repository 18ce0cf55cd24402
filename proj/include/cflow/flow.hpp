#ifndef CFLOW_FLOW_HPP
#define CFLOW_FLOW_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>

#include "cflow/distance.hpp"
#include "cflow/fields.hpp"
#include "cflow/operators.hpp"
#include "cflow/report.hpp"

namespace cflow {

/// Unit tangent field of the level sets of a signed distance function.
/// Vectors are zero wherever `defined` is 0.
struct ContourFlow {
  VectorField field;
  BinaryMask defined;
};

struct FlowOptions {
  /// Pixels whose gradient norm falls below this are left undefined.
  double min_gradient = 1e-8;
  /// Zero the flow on the outermost pixel ring (no flux through the grid edge).
  bool zero_border = true;
};

/// Central differences inside the grid, one-sided differences on its edge.
inline VectorField central_gradient(const ScalarField& f) {
  const GridShape& shape = f.shape();
  VectorField g(shape);
  const std::size_t nch = g.channels();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto rcs = shape.coords(i);
    for (std::size_t ch = 0; ch < nch; ++ch) {
      const int axis = channel_axis(static_cast<int>(ch));
      const std::size_t n = shape.extent(axis);
      const std::size_t pos = rcs[static_cast<std::size_t>(axis)];
      const std::size_t s = shape.stride(axis);
      double d = 0.0;
      if (n > 1) {
        if (pos == 0)
          d = f[i + s] - f[i];
        else if (pos + 1 == n)
          d = f[i] - f[i - s];
        else
          d = 0.5 * (f[i + s] - f[i - s]);
      }
      g(i, ch) = d;
    }
  }
  return g;
}

/// Rotates the normalised gradient of `phi` by +pi/2: (x, y) -> (-y, x).
inline ContourFlow contour_flow(const ScalarField& phi, const FlowOptions& opts = {}) {
  const GridShape& shape = phi.shape();
  if (shape.ndim() != 2)
    throw Error(ErrorKind::Dimensionality,
                "contour_flow is defined for 2D fields only; use shape_loss_3d for volumes");
  const VectorField grad = central_gradient(phi);
  ContourFlow out{VectorField(shape), BinaryMask(shape)};
  for (std::size_t r = 0; r < shape.rows(); ++r) {
    for (std::size_t c = 0; c < shape.cols(); ++c) {
      const std::size_t i = shape.index(r, c);
      if (opts.zero_border &&
          (r == 0 || c == 0 || r + 1 == shape.rows() || c + 1 == shape.cols()))
        continue;
      const double gx = grad(i, 0);
      const double gy = grad(i, 1);
      const double norm = std::hypot(gx, gy);
      if (!(norm >= opts.min_gradient)) continue;
      out.field(i, 0) = -gy / norm;
      out.field(i, 1) = gx / norm;
      out.defined[i] = 1;
    }
  }
  return out;
}

inline ContourFlow contour_flow(const SignedDistance& sd, const FlowOptions& opts = {}) {
  return contour_flow(sd.phi, opts);
}

/// Adds independent N(0, delta^2) noise to every component of every defined
/// vector. The result is not renormalised.
inline ContourFlow perturb_flow(const ContourFlow& f, double delta, std::uint64_t seed) {
  if (!(delta >= 0.0) || !std::isfinite(delta))
    throw Error(ErrorKind::InvalidArgument, "perturb_flow: delta must be >= 0");
  ContourFlow out = f;
  if (delta == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, delta);
  const std::size_t nch = out.field.channels();
  for (std::size_t i = 0; i < out.defined.size(); ++i) {
    if (!out.defined[i]) continue;
    for (std::size_t ch = 0; ch < nch; ++ch) out.field(i, ch) += noise(rng);
  }
  return out;
}

/// ACS, EPE and ADE over the pixels where both flows are defined.
inline MetricsReport flow_metrics(const ContourFlow& pred, const ContourFlow& gt) {
  require_same_shape(pred.field.shape(), gt.field.shape(), "flow_metrics");
  const ScalarField div_pred = div_backward(pred.field);
  const ScalarField div_gt = div_backward(gt.field);
  const std::size_t nch = pred.field.channels();

  double cos_sum = 0.0, epe_sum = 0.0, ade_sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < pred.defined.size(); ++i) {
    if (!pred.defined[i] || !gt.defined[i]) continue;
    double dot = 0.0, diff2 = 0.0;
    for (std::size_t ch = 0; ch < nch; ++ch) {
      dot += pred.field(i, ch) * gt.field(i, ch);
      const double d = pred.field(i, ch) - gt.field(i, ch);
      diff2 += d * d;
    }
    const double denom = pred.field.norm_at(i) * gt.field.norm_at(i);
    cos_sum += denom > 0.0 ? dot / denom : 0.0;
    epe_sum += std::sqrt(diff2);
    ade_sum += std::abs(div_pred[i] - div_gt[i]);
    ++n;
  }
  if (n == 0) throw Error(ErrorKind::EmptySet, "flow_metrics: flows share no defined pixel");

  MetricsReport report;
  const double count = static_cast<double>(n);
  report.acs = cos_sum / count;
  report.epe = epe_sum / count;
  report.ade = ade_sum / count;
  report.aux["pixel_count"] = count;
  return report;
}

/// Euclidean norm of the difference of two vector fields.
inline double flow_l2_loss(const VectorField& pred, const VectorField& gt) {
  require_same_shape(pred.shape(), gt.shape(), "flow_l2_loss");
  double acc = 0.0;
  const auto a = pred.values();
  const auto b = gt.values();
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace cflow

#endif  // CFLOW_FLOW_HPP
