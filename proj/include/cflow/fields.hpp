#ifndef CFLOW_FIELDS_HPP
#define CFLOW_FIELDS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cflow/error.hpp"

namespace cflow {

// Grid layout: extents are (rows, cols[, slices]) and storage is row-major with
// the slice index fastest, i.e. index = (r * cols + c) * slices + s.
//
// Vector channels follow the (x, y[, z]) convention of image coordinates:
// channel 0 is the derivative along columns (x), channel 1 along rows (y),
// channel 2 along slices (z).

class GridShape {
 public:
  GridShape() = default;

  GridShape(std::size_t rows, std::size_t cols) : ndim_(2), dims_{rows, cols, 1} { validate(); }

  GridShape(std::size_t rows, std::size_t cols, std::size_t slices)
      : ndim_(3), dims_{rows, cols, slices} {
    validate();
  }

  static GridShape from_extents(std::span<const std::size_t> extents) {
    if (extents.size() == 2) return GridShape(extents[0], extents[1]);
    if (extents.size() == 3) return GridShape(extents[0], extents[1], extents[2]);
    throw Error(ErrorKind::Dimensionality,
                "grid must have 2 or 3 extents, got " + std::to_string(extents.size()));
  }

  int ndim() const noexcept { return ndim_; }
  std::size_t rows() const noexcept { return dims_[0]; }
  std::size_t cols() const noexcept { return dims_[1]; }
  std::size_t slices() const noexcept { return dims_[2]; }
  std::size_t extent(int axis) const noexcept { return dims_[static_cast<std::size_t>(axis)]; }

  std::size_t size() const noexcept { return dims_[0] * dims_[1] * dims_[2]; }

  /// Distance in elements between neighbours along `axis`.
  std::size_t stride(int axis) const noexcept {
    switch (axis) {
      case 0: return dims_[1] * dims_[2];
      case 1: return dims_[2];
      default: return 1;
    }
  }

  std::size_t index(std::size_t r, std::size_t c, std::size_t s = 0) const noexcept {
    return (r * dims_[1] + c) * dims_[2] + s;
  }

  std::array<std::size_t, 3> coords(std::size_t i) const noexcept {
    const std::size_t s = i % dims_[2];
    const std::size_t rc = i / dims_[2];
    return {rc / dims_[1], rc % dims_[1], s};
  }

  std::vector<std::size_t> extents() const {
    return {dims_.begin(), dims_.begin() + ndim_};
  }

  std::string to_string() const {
    std::string out = std::to_string(dims_[0]) + "x" + std::to_string(dims_[1]);
    if (ndim_ == 3) out += "x" + std::to_string(dims_[2]);
    return out;
  }

  friend bool operator==(const GridShape& a, const GridShape& b) noexcept {
    return a.ndim_ == b.ndim_ && a.dims_ == b.dims_;
  }

 private:
  void validate() const {
    std::size_t total = 1;
    for (std::size_t d : dims_) {
      if (d == 0) throw Error(ErrorKind::InvalidArgument, "grid extents must be >= 1");
      if (total > std::numeric_limits<std::size_t>::max() / d)
        throw Error(ErrorKind::InvalidArgument, "grid too large to address");
      total *= d;
    }
  }

  int ndim_ = 2;
  std::array<std::size_t, 3> dims_{1, 1, 1};
};

/// Grid axis differentiated by vector channel `ch`.
constexpr int channel_axis(int ch) noexcept { return ch == 0 ? 1 : (ch == 1 ? 0 : 2); }

inline void require_same_shape(const GridShape& a, const GridShape& b, const char* what) {
  if (!(a == b))
    throw Error(ErrorKind::ShapeMismatch,
                std::string(what) + ": " + a.to_string() + " vs " + b.to_string());
}

template <typename T>
struct GridValuePolicy {
  static void check(std::span<const T>) {}
};

template <>
struct GridValuePolicy<double> {
  static void check(std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i)
      if (!std::isfinite(values[i]))
        throw Error(ErrorKind::NonFinite, "value at index " + std::to_string(i));
  }
};

template <>
struct GridValuePolicy<std::uint8_t> {
  static void check(std::span<const std::uint8_t> values) {
    for (std::size_t i = 0; i < values.size(); ++i)
      if (values[i] > 1)
        throw Error(ErrorKind::InvalidArgument,
                    "mask value at index " + std::to_string(i) + " is not 0 or 1");
  }
};

/// Dense one-value-per-pixel grid.
template <typename T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;

  explicit Grid(GridShape shape, T fill = T{}) : shape_(shape), values_(shape.size(), fill) {
    GridValuePolicy<T>::check(std::span<const T>(&fill, 1));
  }

  Grid(GridShape shape, std::vector<T> values) : shape_(shape), values_(std::move(values)) {
    if (values_.size() != shape_.size())
      throw Error(ErrorKind::ShapeMismatch, "value count " + std::to_string(values_.size()) +
                                                " does not match grid " + shape_.to_string());
    GridValuePolicy<T>::check(values_);
  }

  const GridShape& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return values_.size(); }

  T& operator[](std::size_t i) noexcept { return values_[i]; }
  const T& operator[](std::size_t i) const noexcept { return values_[i]; }

  T& at(std::size_t r, std::size_t c, std::size_t s = 0) noexcept {
    return values_[shape_.index(r, c, s)];
  }
  const T& at(std::size_t r, std::size_t c, std::size_t s = 0) const noexcept {
    return values_[shape_.index(r, c, s)];
  }

  std::span<T> values() noexcept { return values_; }
  std::span<const T> values() const noexcept { return values_; }

  auto begin() noexcept { return values_.begin(); }
  auto end() noexcept { return values_.end(); }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.shape_ == b.shape_ && a.values_ == b.values_;
  }

 private:
  GridShape shape_;
  std::vector<T> values_;
};

using ScalarField = Grid<double>;
using BinaryMask = Grid<std::uint8_t>;

/// Per-pixel vector with one channel per grid dimension, channel-interleaved.
class VectorField {
 public:
  VectorField() = default;

  explicit VectorField(GridShape shape)
      : shape_(shape), values_(shape.size() * static_cast<std::size_t>(shape.ndim()), 0.0) {}

  VectorField(GridShape shape, std::vector<double> values)
      : shape_(shape), values_(std::move(values)) {
    if (values_.size() != shape_.size() * channels())
      throw Error(ErrorKind::ShapeMismatch,
                  "vector payload " + std::to_string(values_.size()) + " does not match grid " +
                      shape_.to_string() + " with " + std::to_string(channels()) + " channels");
    GridValuePolicy<double>::check(values_);
  }

  const GridShape& shape() const noexcept { return shape_; }
  std::size_t channels() const noexcept { return static_cast<std::size_t>(shape_.ndim()); }
  std::size_t pixel_count() const noexcept { return shape_.size(); }

  double& operator()(std::size_t i, std::size_t ch) noexcept { return values_[i * channels() + ch]; }
  double operator()(std::size_t i, std::size_t ch) const noexcept {
    return values_[i * channels() + ch];
  }

  double dot_at(std::size_t i, std::span<const double> v) const noexcept {
    double acc = 0.0;
    for (std::size_t ch = 0; ch < channels(); ++ch) acc += (*this)(i, ch) * v[ch];
    return acc;
  }

  double norm_at(std::size_t i) const noexcept {
    double acc = 0.0;
    for (std::size_t ch = 0; ch < channels(); ++ch) acc += (*this)(i, ch) * (*this)(i, ch);
    return std::sqrt(acc);
  }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const VectorField& a, const VectorField& b) {
    return a.shape_ == b.shape_ && a.values_ == b.values_;
  }

 private:
  GridShape shape_;
  std::vector<double> values_;
};

/// Pointwise inner product of two vector fields.
inline ScalarField pointwise_dot(const VectorField& a, const VectorField& b) {
  require_same_shape(a.shape(), b.shape(), "pointwise_dot");
  ScalarField out(a.shape());
  const std::size_t nch = a.channels();
  for (std::size_t i = 0; i < a.pixel_count(); ++i) {
    double acc = 0.0;
    for (std::size_t ch = 0; ch < nch; ++ch) acc += a(i, ch) * b(i, ch);
    out[i] = acc;
  }
  return out;
}

/// Logistic function evaluated without overflow; the result is kept strictly
/// inside (0, 1) so that log(u) and log(1 - u) stay finite downstream.
inline double sigmoid(double x) noexcept {
  constexpr double lo = std::numeric_limits<double>::min();
  constexpr double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  double y;
  if (x >= 0.0) {
    y = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    y = e / (1.0 + e);
  }
  return std::clamp(y, lo, hi);
}

inline BinaryMask threshold(const ScalarField& u, double t) {
  if (!(t >= 0.0 && t <= 1.0))
    throw Error(ErrorKind::InvalidArgument, "threshold must lie in [0, 1]");
  BinaryMask out(u.shape());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] >= t ? 1 : 0;
  return out;
}

/// Minimiser of the entropy-regularised linear model: u = 1 / (1 + exp(-o / eps)).
inline ScalarField map_sigmoid(const ScalarField& o, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps))
    throw Error(ErrorKind::InvalidArgument, "eps must be positive");
  ScalarField u(o.shape());
  for (std::size_t i = 0; i < o.size(); ++i) u[i] = sigmoid(o[i] / eps);
  return u;
}

inline ScalarField to_field(const BinaryMask& g) {
  ScalarField out(g.shape());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = g[i];
  return out;
}

inline std::size_t count_ones(const BinaryMask& g) {
  std::size_t n = 0;
  for (auto v : g) n += v;
  return n;
}

inline double sum(const ScalarField& f) {
  double acc = 0.0;
  for (double v : f) acc += v;
  return acc;
}

}  // namespace cflow

#endif  // CFLOW_FIELDS_HPP
