// Test-only reference implementations. These are deliberately naive and share
// no code with the library paths they check.
#ifndef CFLOW_TESTS_ORACLES_HPP
#define CFLOW_TESTS_ORACLES_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "cflow/fields.hpp"

namespace oracle {

using cflow::BinaryMask;
using cflow::GridShape;
using cflow::ScalarField;
using cflow::VectorField;

inline BinaryMask random_mask(const GridShape& shape, double density, std::mt19937_64& rng) {
  std::bernoulli_distribution on(density);
  BinaryMask m(shape);
  for (auto& v : m) v = on(rng) ? 1 : 0;
  return m;
}

inline ScalarField random_field(const GridShape& shape, std::mt19937_64& rng, double lo = -1.0,
                                double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  ScalarField f(shape);
  for (auto& v : f) v = dist(rng);
  return f;
}

inline VectorField random_vector_field(const GridShape& shape, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  VectorField f(shape);
  for (auto& v : f.values()) v = dist(rng);
  return f;
}

// Neighbour scan written against explicit (r, c, s) coordinates.
inline bool is_boundary(const BinaryMask& g, long r, long c, long s) {
  const GridShape& sh = g.shape();
  const long R = static_cast<long>(sh.rows()), C = static_cast<long>(sh.cols()),
             S = static_cast<long>(sh.slices());
  if (!g.at(r, c, s)) return false;
  const long offs[6][3] = {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}};
  const int n = sh.ndim() == 3 ? 6 : 4;
  for (int k = 0; k < n; ++k) {
    const long rr = r + offs[k][0], cc = c + offs[k][1], ss = s + offs[k][2];
    if (rr < 0 || cc < 0 || ss < 0 || rr >= R || cc >= C || ss >= S) return true;
    if (!g.at(rr, cc, ss)) return true;
  }
  return false;
}

inline BinaryMask boundary(const BinaryMask& g) {
  const GridShape& sh = g.shape();
  BinaryMask out(sh);
  for (std::size_t r = 0; r < sh.rows(); ++r)
    for (std::size_t c = 0; c < sh.cols(); ++c)
      for (std::size_t s = 0; s < sh.slices(); ++s)
        out.at(r, c, s) = is_boundary(g, static_cast<long>(r), static_cast<long>(c),
                                      static_cast<long>(s));
  return out;
}

struct Point {
  long r, c, s;
};

inline std::vector<Point> points_of(const BinaryMask& m) {
  std::vector<Point> pts;
  const GridShape& sh = m.shape();
  for (std::size_t r = 0; r < sh.rows(); ++r)
    for (std::size_t c = 0; c < sh.cols(); ++c)
      for (std::size_t s = 0; s < sh.slices(); ++s)
        if (m.at(r, c, s))
          pts.push_back({static_cast<long>(r), static_cast<long>(c), static_cast<long>(s)});
  return pts;
}

// Minimum integer squared distance to a point set.
inline long min_sq_dist(const std::vector<Point>& pts, long r, long c, long s) {
  long best = std::numeric_limits<long>::max();
  for (const Point& p : pts) {
    const long d = (p.r - r) * (p.r - r) + (p.c - c) * (p.c - c) + (p.s - s) * (p.s - s);
    if (d < best) best = d;
  }
  return best;
}

// O(N * |boundary|) signed distance.
inline ScalarField signed_distance(const BinaryMask& g) {
  const BinaryMask edge = boundary(g);
  const auto pts = points_of(edge);
  const GridShape& sh = g.shape();
  ScalarField phi(sh);
  for (std::size_t r = 0; r < sh.rows(); ++r)
    for (std::size_t c = 0; c < sh.cols(); ++c)
      for (std::size_t s = 0; s < sh.slices(); ++s) {
        const double d = std::sqrt(static_cast<double>(
            min_sq_dist(pts, static_cast<long>(r), static_cast<long>(c), static_cast<long>(s))));
        if (edge.at(r, c, s))
          phi.at(r, c, s) = 0.0;
        else
          phi.at(r, c, s) = g.at(r, c, s) ? d : -d;
      }
  return phi;
}

inline double dice_percent(const BinaryMask& a, const BinaryMask& b) {
  long inter = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && b[i]) ++inter;
    if (a[i]) ++na;
    if (b[i]) ++nb;
  }
  if (na + nb == 0) return 100.0;
  return 2.0 * static_cast<double>(inter) / static_cast<double>(na + nb) * 100.0;
}

struct BdPair {
  double bd, bdsd;
};

// Quadratic pred-boundary x gt-boundary scan.
inline BdPair boundary_distance(const BinaryMask& pred, const BinaryMask& gt) {
  const auto p = points_of(boundary(pred));
  const auto g = points_of(boundary(gt));
  std::vector<double> d;
  for (const Point& q : p) d.push_back(std::sqrt(static_cast<double>(min_sq_dist(g, q.r, q.c, q.s))));
  double mean = 0.0;
  for (double x : d) mean += x;
  mean /= static_cast<double>(d.size());
  double var = 0.0;
  for (double x : d) var += (x - mean) * (x - mean);
  return {mean, std::sqrt(var / static_cast<double>(d.size()))};
}

// Dense forward-difference matrix: rows are (pixel, channel) pairs, columns pixels.
inline std::vector<std::vector<double>> grad_matrix(const GridShape& sh) {
  const std::size_t n = sh.size();
  const std::size_t nch = static_cast<std::size_t>(sh.ndim());
  std::vector<std::vector<double>> G(n * nch, std::vector<double>(n, 0.0));
  for (std::size_t r = 0; r < sh.rows(); ++r)
    for (std::size_t c = 0; c < sh.cols(); ++c)
      for (std::size_t s = 0; s < sh.slices(); ++s) {
        const std::size_t i = sh.index(r, c, s);
        // channel 0: x = columns, channel 1: y = rows, channel 2: z = slices
        if (c + 1 < sh.cols()) {
          G[i * nch + 0][sh.index(r, c + 1, s)] += 1.0;
          G[i * nch + 0][i] -= 1.0;
        }
        if (r + 1 < sh.rows()) {
          G[i * nch + 1][sh.index(r + 1, c, s)] += 1.0;
          G[i * nch + 1][i] -= 1.0;
        }
        if (nch == 3 && s + 1 < sh.slices()) {
          G[i * nch + 2][sh.index(r, c, s + 1)] += 1.0;
          G[i * nch + 2][i] -= 1.0;
        }
      }
  return G;
}

// -G^T v
inline ScalarField neg_transpose_apply(const std::vector<std::vector<double>>& G,
                                       const VectorField& v) {
  ScalarField out(v.shape());
  const auto vals = v.values();
  for (std::size_t j = 0; j < out.size(); ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < G.size(); ++k) acc += G[k][j] * vals[k];
    out[j] = -acc;
  }
  return out;
}

}  // namespace oracle

#endif  // CFLOW_TESTS_ORACLES_HPP
