#ifndef CFLOW_REFINE_HPP
#define CFLOW_REFINE_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "cflow/fields.hpp"
#include "cflow/flow.hpp"
#include "cflow/losses.hpp"
#include "cflow/operators.hpp"

namespace cflow {

struct RefineConfig {
  double eps = 10.0;
  double tau = 10.0;
  int iters = 100;
  bool record_trace = false;

  void validate() const {
    if (!(eps > 0.0) || !std::isfinite(eps))
      throw Error(ErrorKind::InvalidArgument, "refine: eps must be positive");
    if (!(tau > 0.0) || !std::isfinite(tau))
      throw Error(ErrorKind::InvalidArgument, "refine: tau must be positive");
    if (iters < 1) throw Error(ErrorKind::InvalidArgument, "refine: iters must be >= 1");
  }
};

/// Per-iteration diagnostics; entry t describes u^{t+1} and q^{t+1}.
struct RefineTrace {
  /// Mean |<grad u, F>| over flow-defined pixels.
  std::vector<double> orthogonality;
  /// <-o, u>
  std::vector<double> linear_energy;
  /// eps * H(u), H(u) = <u, ln u> + <1 - u, ln(1 - u)>
  std::vector<double> entropy_energy;
  /// Euclidean norm of q^{t+1} - q^t.
  std::vector<double> dual_step;

  std::size_t size() const noexcept { return orthogonality.size(); }
};

struct RefineResult {
  ScalarField u;
  RefineTrace trace;
};

namespace detail {

inline double mean_abs_on(const ScalarField& r, const BinaryMask& mask) {
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!mask[i]) continue;
    acc += std::abs(r[i]);
    ++n;
  }
  return n ? acc / static_cast<double>(n) : 0.0;
}

inline double entropy(const ScalarField& u) {
  double acc = 0.0;
  for (double v : u) {
    const double p = clamp_probability(v);
    acc += p * std::log(p) + (1.0 - p) * std::log(1.0 - p);
  }
  return acc;
}

}  // namespace detail

/// Mean |<grad_forward(u), F>| over the pixels where the flow is defined.
inline double orthogonality_residual(const ScalarField& u, const ContourFlow& f) {
  require_same_shape(u.shape(), f.field.shape(), "orthogonality_residual");
  return detail::mean_abs_on(pointwise_dot(grad_forward(u), f.field), f.defined);
}

/// Primal-dual iteration for the soft-threshold model under the contour-flow
/// constraint <grad u, F> = 0:
///
///   u^{t+1} = sigmoid((o - div(q^t F)) / eps)
///   q^{t+1} = q^t - tau * <grad u^{t+1}, F>
///
/// starting from q^0 = 0. q only moves where the flow is defined.
inline RefineResult refine(const ScalarField& o, const ContourFlow& f, const RefineConfig& cfg) {
  cfg.validate();
  require_same_shape(o.shape(), f.field.shape(), "refine");
  const GridShape& shape = o.shape();
  const std::size_t n = shape.size();

  ScalarField q(shape);
  ScalarField u(shape);
  RefineTrace trace;

  for (int t = 0; t < cfg.iters; ++t) {
    const ScalarField d = div_backward(scale(f.field, q));
    for (std::size_t i = 0; i < n; ++i) {
      u[i] = sigmoid((o[i] - d[i]) / cfg.eps);
      if (!std::isfinite(u[i]))
        throw Error(ErrorKind::NonFinite, "refine: u is not finite at iteration " +
                                              std::to_string(t + 1));
    }

    const ScalarField r = pointwise_dot(grad_forward(u), f.field);
    double step2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!f.defined[i]) continue;
      const double dq = cfg.tau * r[i];
      q[i] -= dq;
      step2 += dq * dq;
      if (!std::isfinite(q[i]))
        throw Error(ErrorKind::NonFinite, "refine: dual variable is not finite at iteration " +
                                              std::to_string(t + 1));
    }

    if (cfg.record_trace) {
      trace.orthogonality.push_back(detail::mean_abs_on(r, f.defined));
      double lin = 0.0;
      for (std::size_t i = 0; i < n; ++i) lin -= o[i] * u[i];
      trace.linear_energy.push_back(lin);
      trace.entropy_energy.push_back(cfg.eps * detail::entropy(u));
      trace.dual_step.push_back(std::sqrt(step2));
    }
  }
  return {std::move(u), std::move(trace)};
}

}  // namespace cflow

#endif  // CFLOW_REFINE_HPP
