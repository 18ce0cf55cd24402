#ifndef CFLOW_OPERATORS_HPP
#define CFLOW_OPERATORS_HPP

#include <cstddef>

#include "cflow/fields.hpp"

namespace cflow {

/// Forward differences, du(i) = u(i + e_axis) - u(i), zero at the last index of
/// each axis.
inline VectorField grad_forward(const ScalarField& u) {
  const GridShape& shape = u.shape();
  VectorField g(shape);
  const std::size_t nch = g.channels();
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto rcs = shape.coords(i);
    for (std::size_t ch = 0; ch < nch; ++ch) {
      const int axis = channel_axis(static_cast<int>(ch));
      const std::size_t pos = rcs[static_cast<std::size_t>(axis)];
      g(i, ch) = pos + 1 < shape.extent(axis) ? u[i + shape.stride(axis)] - u[i] : 0.0;
    }
  }
  return g;
}

/// Backward-difference divergence, the exact negative adjoint of grad_forward:
/// <div v, u> = -<v, grad_forward u> for every u and v on the grid.
inline ScalarField div_backward(const VectorField& v) {
  const GridShape& shape = v.shape();
  ScalarField d(shape);
  const std::size_t nch = v.channels();
  for (std::size_t i = 0; i < shape.size(); ++i) {
    const auto rcs = shape.coords(i);
    double acc = 0.0;
    for (std::size_t ch = 0; ch < nch; ++ch) {
      const int axis = channel_axis(static_cast<int>(ch));
      const std::size_t n = shape.extent(axis);
      if (n == 1) continue;
      const std::size_t pos = rcs[static_cast<std::size_t>(axis)];
      const std::size_t stride = shape.stride(axis);
      if (pos + 1 < n) acc += v(i, ch);
      if (pos > 0) acc -= v(i - stride, ch);
    }
    d[i] = acc;
  }
  return d;
}

/// Scales each vector of `f` by the matching entry of `q`.
inline VectorField scale(const VectorField& f, const ScalarField& q) {
  require_same_shape(f.shape(), q.shape(), "scale");
  VectorField out(f.shape());
  const std::size_t nch = f.channels();
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t ch = 0; ch < nch; ++ch) out(i, ch) = q[i] * f(i, ch);
  return out;
}

}  // namespace cflow

#endif  // CFLOW_OPERATORS_HPP
