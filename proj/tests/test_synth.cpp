#include <gtest/gtest.h>

#include <cmath>
#include <queue>

#include "cflow/distance.hpp"
#include "cflow/synth.hpp"

namespace cflow {
namespace {

std::size_t components(const BinaryMask& m) {
  const GridShape& s = m.shape();
  std::vector<char> seen(m.size(), 0);
  std::size_t count = 0;
  for (std::size_t start = 0; start < m.size(); ++start) {
    if (!m[start] || seen[start]) continue;
    ++count;
    std::queue<std::size_t> todo;
    todo.push(start);
    seen[start] = 1;
    while (!todo.empty()) {
      const auto [r, c, z] = s.coords(todo.front());
      todo.pop();
      const long dr[4] = {-1, 1, 0, 0}, dc[4] = {0, 0, -1, 1};
      for (int k = 0; k < 4; ++k) {
        const long rr = static_cast<long>(r) + dr[k], cc = static_cast<long>(c) + dc[k];
        if (rr < 0 || cc < 0 || rr >= static_cast<long>(s.rows()) || cc >= static_cast<long>(s.cols()))
          continue;
        const std::size_t j = s.index(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc));
        if (m[j] && !seen[j]) {
          seen[j] = 1;
          todo.push(j);
        }
      }
    }
  }
  return count;
}

TEST(Synthesize, DiskMatchesPixelCount) {
  SynthSpec spec;
  spec.rows = 64;
  spec.cols = 80;
  spec.radius = 20.0;
  const SynthResult s = synthesize(spec);
  std::size_t expected = 0;
  for (int r = 0; r < 64; ++r)
    for (int c = 0; c < 80; ++c) {
      const double dr = r - 31.5, dc = c - 39.5;
      expected += dr * dr + dc * dc <= 400.0;
    }
  EXPECT_EQ(count_ones(s.gt), expected);
  for (std::size_t i = 0; i < s.gt.size(); ++i) EXPECT_EQ(s.image[i], s.gt[i] ? 255.0 : 0.0);
}

TEST(Synthesize, SquareAndBlobs) {
  SynthSpec spec;
  spec.kind = ShapeKind::Square;
  spec.rows = spec.cols = 41;
  spec.radius = 5.0;
  EXPECT_EQ(count_ones(synthesize(spec).gt), 121u);
  spec.kind = ShapeKind::TwoBlobs;
  spec.rows = spec.cols = 128;
  spec.radius = 30.0;
  EXPECT_EQ(components(synthesize(spec).gt), 2u);
}

TEST(Synthesize, LetterCIsOneOpenComponent) {
  SynthSpec spec;
  spec.kind = ShapeKind::LetterC;
  const SynthResult s = synthesize(spec);
  EXPECT_EQ(components(s.gt), 1u);
  EXPECT_EQ(s.gt.at(64, 64 + 25), 0);  // inside the gap
  EXPECT_EQ(s.gt.at(64, 64 - 25), 1);  // on the ring
  EXPECT_EQ(s.gt.at(64, 64), 0);       // the hole
}

TEST(Synthesize, DegenerateShapesRejected) {
  SynthSpec spec;
  spec.radius = 500.0;
  EXPECT_THROW(synthesize(spec), Error);
  spec.radius = 0.1;
  spec.rows = spec.cols = 4;
  EXPECT_THROW(synthesize(spec), Error);
}

TEST(Corrupt, ZeroSigmaIsIdentity) {
  const SynthResult s = synthesize({});
  CorruptionSpec spec;
  spec.sigma = 0.0;
  EXPECT_EQ(corrupt(s.image, spec), s.image);
}

TEST(Corrupt, GaussianIsSeededAndUnbiasedAtMidGray) {
  const ScalarField gray(GridShape(128, 128), 128.0);
  CorruptionSpec spec;
  const ScalarField a = corrupt(gray, spec), b = corrupt(gray, spec);
  EXPECT_EQ(a, b);
  spec.seed = 43;
  EXPECT_FALSE(a == corrupt(gray, spec));
  double mean = 0.0;
  for (double v : a) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 255.0);
    mean += v;
  }
  mean /= static_cast<double>(a.size());
  // standard error of the mean is 20 / 128
  EXPECT_NEAR(mean, 128.0, 4.0 * 20.0 / 128.0);
}

TEST(Corrupt, SaltAndPepperCount) {
  const ScalarField gray(GridShape(128, 128), 128.0);
  CorruptionSpec spec;
  spec.mode = CorruptionMode::SaltPepper;
  const ScalarField out = corrupt(gray, spec);
  std::size_t changed = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] != 128.0) {
      ++changed;
      EXPECT_TRUE(out[i] == 0.0 || out[i] == 255.0);
    }
  }
  EXPECT_EQ(changed, 327u);
}

TEST(Corrupt, PatchesAreSolidSquares) {
  const ScalarField gray(GridShape(64, 64), 128.0);
  CorruptionSpec spec;
  spec.mode = CorruptionMode::Patches;
  spec.patch_count = 1;
  spec.patch_size = 10;
  const ScalarField out = corrupt(gray, spec);
  std::size_t changed = 0;
  for (double v : out) changed += v != 128.0;
  EXPECT_EQ(changed, 100u);
  EXPECT_EQ(out, corrupt(gray, spec));
}

TEST(KMeans, CleanImageReproducesGroundTruth) {
  SynthSpec spec;
  spec.kind = ShapeKind::LetterC;
  const SynthResult s = synthesize(spec);
  const KMeansResult k = kmeans_clusters({s.image}, 2, 0);
  EXPECT_EQ(k.foreground, s.gt);
  EXPECT_DOUBLE_EQ(k.fg_centroid[0], 255.0);
  EXPECT_DOUBLE_EQ(k.bg_centroid[0], 0.0);
  for (std::size_t i = 0; i < s.gt.size(); ++i) EXPECT_EQ(k.feature[i] > 0.0, s.gt[i] == 1);
}

TEST(KMeans, FeatureSignFollowsBrightCluster) {
  SynthSpec spec;
  spec.fg_value = 40.0;
  spec.bg_value = 200.0;
  const SynthResult s = synthesize(spec);
  CorruptionSpec noise;
  noise.sigma = 10.0;
  const KMeansResult k = kmeans_clusters({corrupt(s.image, noise)}, 2, 0);
  // The brighter background is the positive side.
  EXPECT_GT(k.fg_centroid[0], k.bg_centroid[0]);
  std::size_t agree = 0;
  for (std::size_t i = 0; i < s.gt.size(); ++i) agree += (k.feature[i] > 0.0) == (s.gt[i] == 0);
  EXPECT_EQ(agree, s.gt.size());
}

TEST(KMeans, FeatureFormula) {
  const GridShape g(1, 4);
  ScalarField img(g);
  img[0] = 0.0;
  img[1] = 2.0;
  img[2] = 10.0;
  img[3] = 12.0;
  KMeansOptions opts;
  opts.relative_min_spread = 0.0;
  const KMeansResult k = kmeans_clusters({img}, 2, 0, opts);
  EXPECT_DOUBLE_EQ(k.spread, 1.0);
  // (d_bg^2 - d_fg^2) / 2 at x = 0: (1 - 121) / 2
  EXPECT_DOUBLE_EQ(k.feature[0], -60.0);
  EXPECT_DOUBLE_EQ(k.feature[3], 60.0);
}

TEST(KMeans, Errors) {
  const ScalarField flat(GridShape(8, 8), 3.0);
  EXPECT_THROW(kmeans_features(flat, 2, 0), Error);
  ScalarField img(GridShape(8, 8));
  img[5] = 1.0;
  EXPECT_THROW(kmeans_features(img, 3, 0), Error);
}

}  // namespace
}  // namespace cflow
