#ifndef CFLOW_LOSSES_HPP
#define CFLOW_LOSSES_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>

#include "cflow/distance.hpp"
#include "cflow/fields.hpp"
#include "cflow/flow.hpp"
#include "cflow/operators.hpp"

namespace cflow {

/// Losses are sums over pixels, not means.
struct LossValue {
  double total = 0.0;
  std::map<std::string, double> per_term;
  std::size_t pixel_count = 0;
};

enum class LossKind { CE, Dice, Shape2D };
enum class BaseLoss { CE, Dice };

inline constexpr double kProbabilityFloor = 1e-7;
inline constexpr double kShapeDenominatorGuard = 1e-8;

inline double clamp_probability(double u) noexcept {
  return std::clamp(u, kProbabilityFloor, 1.0 - kProbabilityFloor);
}

inline LossValue ce_loss(const ScalarField& u, const BinaryMask& g) {
  require_same_shape(u.shape(), g.shape(), "ce_loss");
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double p = clamp_probability(u[i]);
    acc -= g[i] ? std::log(p) : std::log(1.0 - p);
  }
  LossValue out{acc, {{"ce", acc}}, u.size()};
  return out;
}

/// Soft Dice loss with a linear (unsquared) denominator; 0 when both sums vanish.
inline LossValue dice_loss(const ScalarField& u, const BinaryMask& g) {
  require_same_shape(u.shape(), g.shape(), "dice_loss");
  double inter = 0.0, su = 0.0, sg = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    inter += u[i] * g[i];
    su += u[i];
    sg += g[i];
  }
  const double denom = su + sg;
  const double value = denom > 0.0 ? 1.0 - 2.0 * inter / denom : 0.0;
  return {value, {{"dice", value}}, u.size()};
}

/// Sum over flow-defined pixels of |<grad u, F>| / (|grad u| + 1e-8), with
/// forward-difference gradients.
inline LossValue shape_loss_2d(const ScalarField& u, const ContourFlow& f) {
  if (u.shape().ndim() != 2) throw Error(ErrorKind::Dimensionality, "shape_loss_2d needs 2D input");
  require_same_shape(u.shape(), f.field.shape(), "shape_loss_2d");
  const VectorField grad = grad_forward(u);
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!f.defined[i]) continue;
    const double gx = grad(i, 0), gy = grad(i, 1);
    const double s = gx * f.field(i, 0) + gy * f.field(i, 1);
    acc += std::abs(s) / (std::hypot(gx, gy) + kShapeDenominatorGuard);
    ++n;
  }
  return {acc, {{"shape", acc}}, n};
}

/// Sum over voxels of |grad u x grad phi| with forward-difference gradients.
inline LossValue shape_loss_3d(const ScalarField& u, const ScalarField& phi) {
  if (u.shape().ndim() != 3 || phi.shape().ndim() != 3)
    throw Error(ErrorKind::Dimensionality, "shape_loss_3d needs 3D input");
  require_same_shape(u.shape(), phi.shape(), "shape_loss_3d");
  const VectorField a = grad_forward(u);
  const VectorField b = grad_forward(phi);
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double cx = a(i, 1) * b(i, 2) - a(i, 2) * b(i, 1);
    const double cy = a(i, 2) * b(i, 0) - a(i, 0) * b(i, 2);
    const double cz = a(i, 0) * b(i, 1) - a(i, 1) * b(i, 0);
    acc += std::sqrt(cx * cx + cy * cy + cz * cz);
  }
  return {acc, {{"shape3d", acc}}, u.size()};
}

inline LossValue shape_loss_3d(const ScalarField& u, const SignedDistance& phi) {
  return shape_loss_3d(u, phi.phi);
}

/// alpha * base + beta * shape_2d.
inline LossValue combined_loss(const ScalarField& u, const BinaryMask& g, const ContourFlow& f,
                               double alpha, double beta, BaseLoss base) {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw Error(ErrorKind::InvalidArgument, "combined_loss: alpha and beta must be positive");
  const LossValue b = base == BaseLoss::CE ? ce_loss(u, g) : dice_loss(u, g);
  const LossValue s = shape_loss_2d(u, f);
  LossValue out;
  const std::string base_name = base == BaseLoss::CE ? "ce" : "dice";
  out.per_term[base_name] = b.total;
  out.per_term["shape"] = s.total;
  out.total = alpha * b.total + beta * s.total;
  out.pixel_count = u.size();
  return out;
}

/// Inputs a gradient needs beyond u; which members are required depends on the loss.
struct LossContext {
  const BinaryMask* gt = nullptr;
  const ContourFlow* flow = nullptr;
};

/// dL/du per pixel. The |.| in the shape loss takes subgradient 0 at 0.
inline ScalarField loss_gradient(LossKind kind, const ScalarField& u, const LossContext& ctx) {
  ScalarField out(u.shape());
  switch (kind) {
    case LossKind::CE: {
      if (!ctx.gt) throw Error(ErrorKind::InvalidArgument, "CE gradient needs a ground truth");
      require_same_shape(u.shape(), ctx.gt->shape(), "loss_gradient");
      const BinaryMask& g = *ctx.gt;
      for (std::size_t i = 0; i < u.size(); ++i) {
        // Outside the clamp interval the loss is flat in u.
        if (u[i] < kProbabilityFloor || u[i] > 1.0 - kProbabilityFloor) continue;
        out[i] = g[i] ? -1.0 / u[i] : 1.0 / (1.0 - u[i]);
      }
      return out;
    }
    case LossKind::Dice: {
      if (!ctx.gt) throw Error(ErrorKind::InvalidArgument, "Dice gradient needs a ground truth");
      require_same_shape(u.shape(), ctx.gt->shape(), "loss_gradient");
      const BinaryMask& g = *ctx.gt;
      double inter = 0.0, denom = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        inter += u[i] * g[i];
        denom += u[i] + g[i];
      }
      if (denom <= 0.0) return out;
      for (std::size_t i = 0; i < u.size(); ++i)
        out[i] = -2.0 * g[i] / denom + 2.0 * inter / (denom * denom);
      return out;
    }
    case LossKind::Shape2D: {
      if (!ctx.flow) throw Error(ErrorKind::InvalidArgument, "shape gradient needs a flow");
      const ContourFlow& f = *ctx.flow;
      if (u.shape().ndim() != 2)
        throw Error(ErrorKind::Dimensionality, "shape_loss_2d needs 2D input");
      require_same_shape(u.shape(), f.field.shape(), "loss_gradient");
      const VectorField grad = grad_forward(u);
      VectorField w(u.shape());
      for (std::size_t i = 0; i < u.size(); ++i) {
        if (!f.defined[i]) continue;
        const double gx = grad(i, 0), gy = grad(i, 1);
        const double fx = f.field(i, 0), fy = f.field(i, 1);
        const double s = gx * fx + gy * fy;
        const double n = std::hypot(gx, gy);
        const double den = n + kShapeDenominatorGuard;
        const double sgn = s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : 0.0);
        double wx = sgn * fx / den, wy = sgn * fy / den;
        if (n > 0.0) {
          const double k = std::abs(s) / (den * den * n);
          wx -= k * gx;
          wy -= k * gy;
        }
        w(i, 0) = wx;
        w(i, 1) = wy;
      }
      // The transpose of grad_forward is -div_backward.
      ScalarField d = div_backward(w);
      for (std::size_t i = 0; i < d.size(); ++i) out[i] = -d[i];
      return out;
    }
  }
  return out;
}

}  // namespace cflow

#endif  // CFLOW_LOSSES_HPP
