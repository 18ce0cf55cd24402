#ifndef CFLOW_DISTANCE_HPP
#define CFLOW_DISTANCE_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "cflow/fields.hpp"

namespace cflow {

/// Signed Euclidean distance to the ground-truth boundary, in pixels.
/// Positive inside the foreground, zero on its boundary, negative outside.
struct SignedDistance {
  ScalarField phi;
  BinaryMask source;
};

/// Foreground pixels with at least one 4-neighbour (6-neighbour in 3D) in the
/// background. The grid border counts as background, so a full mask has its
/// outermost ring as boundary.
inline BinaryMask boundary_pixels(const BinaryMask& g) {
  const GridShape& shape = g.shape();
  BinaryMask out(shape);
  const int nd = shape.ndim();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g[i]) continue;
    const auto rcs = shape.coords(i);
    bool edge = false;
    for (int axis = 0; axis < nd && !edge; ++axis) {
      const std::size_t pos = rcs[static_cast<std::size_t>(axis)];
      const std::size_t stride = shape.stride(axis);
      if (pos == 0 || pos + 1 == shape.extent(axis)) {
        edge = true;
      } else if (!g[i - stride] || !g[i + stride]) {
        edge = true;
      }
    }
    out[i] = edge ? 1 : 0;
  }
  return out;
}

namespace detail {

// Stand-in for +inf in the envelope computation; keeps arithmetic finite.
inline constexpr double kFar = 1e20;

// Lower envelope of parabolas (Felzenszwalb & Huttenlocher) along one line.
// Inputs and outputs are squared distances; integer-valued inputs stay exact.
inline void envelope_1d(const double* f, std::size_t n, double* d, std::vector<std::size_t>& v,
                        std::vector<double>& z) {
  v.assign(n, 0);
  z.assign(n + 1, 0.0);
  std::size_t k = 0;
  v[0] = 0;
  z[0] = -kFar;
  z[1] = kFar;
  for (std::size_t q = 1; q < n; ++q) {
    const double qd = static_cast<double>(q);
    double s;
    for (;;) {
      const double vk = static_cast<double>(v[k]);
      s = ((f[q] + qd * qd) - (f[v[k]] + vk * vk)) / (2.0 * qd - 2.0 * vk);
      if (s <= z[k] && k > 0) {
        --k;
        continue;
      }
      break;
    }
    if (s <= z[k]) {
      // k == 0 and the new parabola dominates everywhere
      v[0] = q;
      z[0] = -kFar;
      z[1] = kFar;
      continue;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kFar;
  }
  k = 0;
  for (std::size_t q = 0; q < n; ++q) {
    const double qd = static_cast<double>(q);
    while (z[k + 1] < qd) ++k;
    const double dq = qd - static_cast<double>(v[k]);
    d[q] = dq * dq + f[v[k]];
  }
}

}  // namespace detail

/// Exact squared Euclidean distance from every pixel to the nearest seed pixel.
/// Pixels are farther than any real distance when the seed set is empty.
inline ScalarField squared_distance_to(const BinaryMask& seeds) {
  const GridShape& shape = seeds.shape();
  std::vector<double> work(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) work[i] = seeds[i] ? 0.0 : detail::kFar;

  std::vector<double> line_in, line_out;
  std::vector<std::size_t> v;
  std::vector<double> z;
  for (int axis = 0; axis < shape.ndim(); ++axis) {
    const std::size_t n = shape.extent(axis);
    if (n == 1) continue;
    const std::size_t stride = shape.stride(axis);
    line_in.resize(n);
    line_out.resize(n);
    for (std::size_t start = 0; start < work.size(); ++start) {
      // A line starts at every index whose coordinate along `axis` is zero.
      if ((start / stride) % n != 0) continue;
      for (std::size_t q = 0; q < n; ++q) line_in[q] = work[start + q * stride];
      detail::envelope_1d(line_in.data(), n, line_out.data(), v, z);
      for (std::size_t q = 0; q < n; ++q) work[start + q * stride] = line_out[q];
    }
  }
  return ScalarField(shape, std::move(work));
}

/// Unsigned Euclidean distance to a non-empty seed set.
inline ScalarField distance_to(const BinaryMask& seeds) {
  if (count_ones(seeds) == 0) throw Error(ErrorKind::EmptySet, "distance_to: no seed pixels");
  ScalarField d = squared_distance_to(seeds);
  for (double& x : d) x = std::sqrt(x);
  return d;
}

inline SignedDistance signed_distance(const BinaryMask& g) {
  if (count_ones(g) == 0)
    throw Error(ErrorKind::EmptyForeground, "signed_distance needs at least one foreground pixel");
  const BinaryMask boundary = boundary_pixels(g);
  ScalarField phi = squared_distance_to(boundary);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (boundary[i]) {
      phi[i] = 0.0;
    } else {
      const double r = std::sqrt(phi[i]);
      phi[i] = g[i] ? r : -r;
    }
  }
  return {std::move(phi), g};
}

}  // namespace cflow

#endif  // CFLOW_DISTANCE_HPP
