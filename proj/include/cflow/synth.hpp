#ifndef CFLOW_SYNTH_HPP
#define CFLOW_SYNTH_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cflow/fields.hpp"

namespace cflow {

enum class ShapeKind { Disk, LetterC, TwoBlobs, Square };

struct SynthSpec {
  ShapeKind kind = ShapeKind::Disk;
  std::size_t rows = 128;
  std::size_t cols = 128;
  double fg_value = 255.0;
  double bg_value = 0.0;
  /// Negative means the grid centre.
  double center_row = -1.0;
  double center_col = -1.0;
  /// Disk radius, outer radius of the C, half side of the square, spacing unit for the blobs.
  double radius = 30.0;
  /// Ring width of the C.
  double thickness = 14.0;
  /// Half-angle in degrees of the gap cut out of the C, opening towards +x.
  double opening_deg = 40.0;
};

struct SynthResult {
  ScalarField image;
  BinaryMask gt;
};

inline bool synth_contains(const SynthSpec& spec, double r, double c) {
  const double cr = spec.center_row < 0.0 ? (static_cast<double>(spec.rows) - 1.0) / 2.0
                                          : spec.center_row;
  const double cc = spec.center_col < 0.0 ? (static_cast<double>(spec.cols) - 1.0) / 2.0
                                          : spec.center_col;
  const double dy = r - cr;
  const double dx = c - cc;
  const double rad = spec.radius;
  switch (spec.kind) {
    case ShapeKind::Disk:
      return dx * dx + dy * dy <= rad * rad;
    case ShapeKind::Square:
      return std::abs(dx) <= rad && std::abs(dy) <= rad;
    case ShapeKind::LetterC: {
      const double d2 = dx * dx + dy * dy;
      const double inner = std::max(0.0, rad - spec.thickness);
      if (d2 > rad * rad || d2 <= inner * inner) return false;
      const double angle = std::abs(std::atan2(dy, dx)) * 180.0 / std::numbers::pi;
      return angle > spec.opening_deg;
    }
    case ShapeKind::TwoBlobs: {
      const double rb = 0.6 * rad;
      const double off = 1.3 * rad;
      const double dl = (dx + off) * (dx + off) + dy * dy;
      const double dr = (dx - off) * (dx - off) + dy * dy;
      return dl <= rb * rb || dr <= rb * rb;
    }
  }
  return false;
}

/// Two-level test image and its ground truth.
inline SynthResult synthesize(const SynthSpec& spec) {
  const GridShape shape(spec.rows, spec.cols);
  SynthResult out{ScalarField(shape, spec.bg_value), BinaryMask(shape)};
  std::size_t fg = 0;
  for (std::size_t r = 0; r < spec.rows; ++r) {
    for (std::size_t c = 0; c < spec.cols; ++c) {
      if (!synth_contains(spec, static_cast<double>(r), static_cast<double>(c))) continue;
      out.gt.at(r, c) = 1;
      out.image.at(r, c) = spec.fg_value;
      ++fg;
    }
  }
  if (fg == 0 || fg == shape.size())
    throw Error(ErrorKind::DegenerateInput, "synthesize: geometry yields an empty or full mask");
  return out;
}

enum class CorruptionMode { Gaussian, SaltPepper, Patches };

struct CorruptionSpec {
  CorruptionMode mode = CorruptionMode::Gaussian;
  double sigma = 20.0;
  double sp_ratio = 0.02;
  std::size_t patch_count = 12;
  std::size_t patch_size = 16;
  std::uint64_t seed = 42;
};

/// Damages an 8-bit image. Every random draw comes from `spec.seed`.
inline ScalarField corrupt(const ScalarField& image, const CorruptionSpec& spec) {
  ScalarField out = image;
  std::mt19937_64 rng(spec.seed);
  switch (spec.mode) {
    case CorruptionMode::Gaussian: {
      if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma))
        throw Error(ErrorKind::InvalidArgument, "corrupt: sigma must be >= 0");
      if (spec.sigma == 0.0) return out;
      std::normal_distribution<double> noise(0.0, spec.sigma);
      for (double& v : out) v = std::clamp(v + noise(rng), 0.0, 255.0);
      return out;
    }
    case CorruptionMode::SaltPepper: {
      if (!(spec.sp_ratio >= 0.0 && spec.sp_ratio <= 1.0))
        throw Error(ErrorKind::InvalidArgument, "corrupt: ratio must lie in [0, 1]");
      const std::size_t n = out.size();
      const auto k = static_cast<std::size_t>(std::floor(spec.sp_ratio * static_cast<double>(n)));
      std::vector<std::size_t> idx(n);
      for (std::size_t i = 0; i < n; ++i) idx[i] = i;
      std::bernoulli_distribution coin(0.5);
      // Partial Fisher-Yates: the first k entries become a uniform k-subset.
      for (std::size_t j = 0; j < k; ++j) {
        std::uniform_int_distribution<std::size_t> pick(j, n - 1);
        std::swap(idx[j], idx[pick(rng)]);
        out[idx[j]] = coin(rng) ? 255.0 : 0.0;
      }
      return out;
    }
    case CorruptionMode::Patches: {
      const GridShape& shape = out.shape();
      std::bernoulli_distribution coin(0.5);
      std::array<std::size_t, 3> side{1, 1, 1};
      for (int a = 0; a < shape.ndim(); ++a)
        side[static_cast<std::size_t>(a)] = std::min(spec.patch_size, shape.extent(a));
      for (std::size_t p = 0; p < spec.patch_count; ++p) {
        std::array<std::size_t, 3> origin{0, 0, 0};
        for (int a = 0; a < shape.ndim(); ++a) {
          const auto ax = static_cast<std::size_t>(a);
          std::uniform_int_distribution<std::size_t> pos(0, shape.extent(a) - side[ax]);
          origin[ax] = pos(rng);
        }
        const double value = coin(rng) ? 255.0 : 0.0;
        for (std::size_t r = 0; r < side[0]; ++r)
          for (std::size_t c = 0; c < side[1]; ++c)
            for (std::size_t s = 0; s < side[2]; ++s)
              out.at(origin[0] + r, origin[1] + c, origin[2] + s) = value;
      }
      return out;
    }
  }
  return out;
}

struct KMeansOptions {
  int max_rounds = 100;
  double tolerance = 1e-6;
  /// Absolute floor on the pooled within-cluster standard deviation.
  double min_spread = 1e-6;
  /// Floor on the spread as a fraction of the centroid separation. Keeps the
  /// feature of a noise-free two-level image at +-32 instead of saturating.
  double relative_min_spread = 0.125;
};

struct KMeansResult {
  ScalarField feature;
  BinaryMask foreground;
  std::vector<double> fg_centroid;
  std::vector<double> bg_centroid;
  double spread = 0.0;
  int rounds = 0;
};

namespace detail {

inline double percentile(std::vector<double> v, double p) {
  const auto k = static_cast<std::size_t>(std::floor(p * static_cast<double>(v.size() - 1)));
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  return v[k];
}

inline double sq_dist(const std::vector<ScalarField>& ch, std::size_t i,
                      const std::vector<double>& c) {
  double acc = 0.0;
  for (std::size_t k = 0; k < ch.size(); ++k) {
    const double d = ch[k][i] - c[k];
    acc += d * d;
  }
  return acc;
}

}  // namespace detail

/// Two-cluster Lloyd iteration over per-pixel intensity vectors, turned into a
/// real-valued feature o = (d_bg^2 - d_fg^2) / (2 s^2) that is positive on the
/// brighter cluster. `s` is the pooled within-cluster standard deviation.
///
/// Initial centroids sit at the 25th and 75th percentiles of each channel
/// (min and max if those coincide), so the result does not depend on `seed`.
inline KMeansResult kmeans_clusters(const std::vector<ScalarField>& channels, int k,
                                    std::uint64_t seed, const KMeansOptions& opts = {}) {
  (void)seed;
  if (k != 2) throw Error(ErrorKind::InvalidArgument, "kmeans_features supports k = 2 only");
  if (channels.empty()) throw Error(ErrorKind::InvalidArgument, "kmeans_features: no channels");
  const GridShape& shape = channels.front().shape();
  for (const auto& ch : channels) require_same_shape(shape, ch.shape(), "kmeans_features");
  const std::size_t n = shape.size();
  const std::size_t nc = channels.size();

  std::vector<double> c0(nc), c1(nc);
  double init_gap = 0.0;
  for (std::size_t k2 = 0; k2 < nc; ++k2) {
    std::vector<double> v(channels[k2].begin(), channels[k2].end());
    c0[k2] = detail::percentile(v, 0.25);
    c1[k2] = detail::percentile(v, 0.75);
    init_gap += std::abs(c1[k2] - c0[k2]);
  }
  if (init_gap == 0.0) {
    for (std::size_t k2 = 0; k2 < nc; ++k2) {
      const auto [lo, hi] = std::minmax_element(channels[k2].begin(), channels[k2].end());
      c0[k2] = *lo;
      c1[k2] = *hi;
      init_gap += *hi - *lo;
    }
  }
  if (init_gap == 0.0)
    throw Error(ErrorKind::DegenerateInput, "kmeans_features: image is constant");

  std::vector<std::uint8_t> label(n, 0);
  int rounds = 0;
  while (rounds < opts.max_rounds) {
    ++rounds;
    std::vector<double> s0(nc, 0.0), s1(nc, 0.0);
    std::size_t n0 = 0, n1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      label[i] = detail::sq_dist(channels, i, c1) < detail::sq_dist(channels, i, c0) ? 1 : 0;
      auto& acc = label[i] ? s1 : s0;
      for (std::size_t k2 = 0; k2 < nc; ++k2) acc[k2] += channels[k2][i];
      (label[i] ? n1 : n0)++;
    }
    double move = 0.0;
    for (std::size_t k2 = 0; k2 < nc; ++k2) {
      if (n0) {
        const double m = s0[k2] / static_cast<double>(n0);
        move = std::max(move, std::abs(m - c0[k2]));
        c0[k2] = m;
      }
      if (n1) {
        const double m = s1[k2] / static_cast<double>(n1);
        move = std::max(move, std::abs(m - c1[k2]));
        c1[k2] = m;
      }
    }
    if (move < opts.tolerance) break;
  }

  std::size_t n1 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    label[i] = detail::sq_dist(channels, i, c1) < detail::sq_dist(channels, i, c0) ? 1 : 0;
    n1 += label[i];
  }
  if (n1 == 0 || n1 == n)
    throw Error(ErrorKind::DegenerateInput, "kmeans_features: only one cluster found");

  double b0 = 0.0, b1 = 0.0;
  for (std::size_t k2 = 0; k2 < nc; ++k2) {
    b0 += c0[k2];
    b1 += c1[k2];
  }
  const bool one_is_fg = b1 >= b0;
  const std::vector<double>& fg = one_is_fg ? c1 : c0;
  const std::vector<double>& bg = one_is_fg ? c0 : c1;

  double within = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    within += detail::sq_dist(channels, i, label[i] ? c1 : c0);
  double spread = std::sqrt(within / static_cast<double>(n * nc));
  double separation2 = 0.0;
  for (std::size_t k2 = 0; k2 < nc; ++k2) separation2 += (fg[k2] - bg[k2]) * (fg[k2] - bg[k2]);
  spread = std::max({spread, opts.min_spread, opts.relative_min_spread * std::sqrt(separation2)});

  KMeansResult out{ScalarField(shape), BinaryMask(shape), fg, bg, spread, rounds};
  const double scale = 1.0 / (2.0 * spread * spread);
  for (std::size_t i = 0; i < n; ++i) {
    const double dfg = detail::sq_dist(channels, i, fg);
    const double dbg = detail::sq_dist(channels, i, bg);
    out.feature[i] = (dbg - dfg) * scale;
    out.foreground[i] = (label[i] == 1) == one_is_fg ? 1 : 0;
  }
  return out;
}

inline ScalarField kmeans_features(const std::vector<ScalarField>& channels, int k,
                                   std::uint64_t seed, const KMeansOptions& opts = {}) {
  return kmeans_clusters(channels, k, seed, opts).feature;
}

inline ScalarField kmeans_features(const ScalarField& image, int k, std::uint64_t seed,
                                   const KMeansOptions& opts = {}) {
  return kmeans_clusters(std::vector<ScalarField>{image}, k, seed, opts).feature;
}

}  // namespace cflow

#endif  // CFLOW_SYNTH_HPP
