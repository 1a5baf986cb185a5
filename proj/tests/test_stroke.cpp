#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "sgpaint/check.hpp"
#include "sgpaint/stroke.hpp"

using namespace sgpaint;

namespace {

StrokeParams point_stroke() {
  return StrokeParams({0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 1.0, 1.0, 0.5, 0.5, 0.2, 0.4, 0.6});
}

}  // namespace

TEST(Bezier, EndpointsAreExact) {
  const Point p0{0.1, 0.9}, p1{0.7, 0.2}, p2{0.3, 0.4};
  EXPECT_EQ(bezier_point(p0, p1, p2, 0.0), p0);
  EXPECT_EQ(bezier_point(p0, p1, p2, 1.0), p2);
}

TEST(StrokeParams, RejectsOutOfRange) {
  std::array<double, 13> v{};
  v.fill(0.5);
  v[3] = 1.5;
  EXPECT_THROW(StrokeParams{v}, std::invalid_argument);
  v[3] = -0.1;
  EXPECT_THROW(StrokeParams{v}, std::invalid_argument);
  std::vector<double> short_v(12, 0.5);
  EXPECT_THROW(StrokeParams::from_span(short_v), std::invalid_argument);
}

TEST(StrokeParams, ClippedHandlesNan) {
  std::vector<double> v(13, 2.0);
  v[0] = std::nan("");
  v[1] = -3.0;
  const auto s = StrokeParams::clipped(v);
  EXPECT_EQ(s[0], 0.0);
  EXPECT_EQ(s[1], 0.0);
  EXPECT_EQ(s[2], 1.0);
}

TEST(Rasterize, ZeroOpacityIsEmpty) {
  auto a = point_stroke().with(StrokeParams::Z0, 0.0).with(StrokeParams::Z2, 0.0);
  const auto d = rasterize_density(a, CanvasDims(64, 64));
  for (double v : d.values()) EXPECT_EQ(v, 0.0);
}

TEST(Rasterize, PointStrokeExample) {
  const CanvasDims dims(64, 64);
  const auto d = rasterize_density(point_stroke(), dims);
  // Oracle: disc of radius 0.5 * 8 = 4 at (32, 32), smoothstep band of 1 px.
  const auto s = oracle::disc_at(point_stroke(), dims, 0.5);
  EXPECT_DOUBLE_EQ(oracle::disc_value(s, 32.5, 32.5), 1.0);
  EXPECT_DOUBLE_EQ(oracle::disc_value(s, 0.5, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(d.at(32, 32), 1.0);
  EXPECT_DOUBLE_EQ(d.at(0, 0), 0.0);
}

TEST(Rasterize, PointStrokeMatchesDiscFormula) {
  const CanvasDims dims(32, 32);
  const auto d = rasterize_density(point_stroke(), dims);
  const auto o = oracle::disc_sweep(point_stroke(), dims, 100);
  EXPECT_LE(oracle::max_abs_diff(d.values(), o), 1e-6);
}

TEST(Rasterize, MatchesDiscSweepLimit) {
  std::mt19937_64 rng(21);
  const CanvasDims dims(32, 32);
  for (int k = 0; k < 10; ++k) {
    const auto a = random_stroke(rng);
    const auto d = rasterize_density(a, dims);
    EXPECT_LE(oracle::max_abs_diff(d.values(), oracle::disc_sweep_limit(a, dims, 400)), 1e-2) << k;
  }
}

TEST(Rasterize, NeverBelowItsOwnSamples) {
  // The sample discs are part of the sweep, so the literal sample maximum is a
  // lower bound up to single-precision rounding.
  std::mt19937_64 rng(22);
  const CanvasDims dims(32, 32);
  for (int k = 0; k < 10; ++k) {
    const auto a = random_stroke(rng);
    const auto d = rasterize_density(a, dims);
    const auto o = oracle::disc_sweep(a, dims, 100);
    for (std::size_t i = 0; i < o.size(); ++i) EXPECT_GE(d.values()[i], o[i] - 1e-5);
  }
}

TEST(Rasterize, RangeAndDims) {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 50; ++k) {
    const CanvasDims dims(16 + 8 * (k % 4), 24);
    const auto d = rasterize_density(random_stroke(rng), dims);
    EXPECT_EQ(d.dims(), dims);
    EXPECT_TRUE(d.in_unit_range());
  }
}

TEST(Rasterize, ReversalIsBitIdentical) {
  std::mt19937_64 rng(2);
  const CanvasDims dims(48, 40);
  for (int k = 0; k < 50; ++k) {
    const auto a = random_stroke(rng);
    EXPECT_EQ(rasterize_density(a, dims), rasterize_density(a.reversed(), dims)) << k;
  }
}

TEST(Rasterize, OpacityMonotone) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const CanvasDims dims(32, 32);
  for (int k = 0; k < 50; ++k) {
    const auto a = random_stroke(rng);
    const auto b = a.with(StrokeParams::Z0, a[StrokeParams::Z0] + (1.0 - a[StrokeParams::Z0]) * u(rng))
                       .with(StrokeParams::Z2, a[StrokeParams::Z2] + (1.0 - a[StrokeParams::Z2]) * u(rng));
    const auto da = rasterize_density(a, dims);
    const auto db = rasterize_density(b, dims);
    for (std::size_t i = 0; i < da.values().size(); ++i) ASSERT_GE(db.values()[i], da.values()[i]);
  }
}

TEST(Rasterize, Continuity) {
  std::mt19937_64 rng(4);
  const CanvasDims dims(64, 64);
  for (int k = 0; k < 10; ++k) {
    const auto a = random_stroke(rng, 0.01, 0.99);
    const auto base = rasterize_density(a, dims);
    for (std::size_t p = 0; p < StrokeParams::shape_size; ++p) {
      const auto moved = rasterize_density(a.with(p, a[p] + 1e-4), dims);
      EXPECT_LE(oracle::max_abs_diff(base.values(), moved.values()), 0.05) << "param " << p;
    }
  }
}

TEST(Rasterize, ColorDoesNotAffectDensity) {
  const auto a = point_stroke();
  const auto b = a.with(StrokeParams::R, 0.9).with(StrokeParams::G, 0.0).with(StrokeParams::B, 1.0);
  EXPECT_EQ(rasterize_density(a, CanvasDims(16, 16)), rasterize_density(b, CanvasDims(16, 16)));
}

TEST(Rasterize, SamplingConvergence) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 20; ++k) EXPECT_LE(sampling_gap(random_stroke(rng), CanvasDims(64, 64)), 1e-2);
}

TEST(RenderConfig, Validation) {
  RenderConfig c;
  c.curve_samples = 1;
  EXPECT_THROW(rasterize_density(point_stroke(), CanvasDims(8, 8), c), std::invalid_argument);
  EXPECT_THROW(CanvasDims(4, 64), DimensionError);
}

TEST(Colorize, Examples) {
  DensityMap d(CanvasDims(8, 8), 1.0);
  const auto red = colorize(d, {1.0, 0.0, 0.0});
  EXPECT_EQ(red.at(3, 3, 0), 1.0);
  EXPECT_EQ(red.at(3, 3, 1), 0.0);
  EXPECT_EQ(red.at(3, 3, 2), 0.0);

  DensityMap half(CanvasDims(8, 8), 0.0);
  half.at(2, 5) = 0.5;
  const auto c = colorize(half, {0.4, 0.8, 1.0});
  EXPECT_DOUBLE_EQ(c.at(2, 5, 0), 0.2);
  EXPECT_DOUBLE_EQ(c.at(2, 5, 1), 0.4);
  EXPECT_DOUBLE_EQ(c.at(2, 5, 2), 0.5);
  EXPECT_EQ(c.at(0, 0, 0), 0.0);
  EXPECT_THROW(colorize(d, {1.2, 0.0, 0.0}), std::invalid_argument);
}

// A point stroke is a degenerate curve: nudging a control point in either
// direction lengthens it, so only opacity and width are expected to be smooth.
TEST(Smoothness, PointStrokeOpacityAndWidthUnflagged) {
  const auto a = point_stroke().with(StrokeParams::Z0, 0.99).with(StrokeParams::Z2, 0.99);
  const auto r = smoothness_report(a, CanvasDims(64, 64), 1e-3);
  for (std::size_t i = StrokeParams::Z0; i < StrokeParams::shape_size; ++i) {
    EXPECT_FALSE(r.entries[i].flagged) << "parameter " << i;
    EXPECT_GT(std::abs(r.entries[i].fine), 1.0);
  }
}

TEST(Smoothness, ZeroOpacityAllZero) {
  const auto empty = StrokeParams({0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.0, 0.0, 0.5, 0.5, 0, 0, 0});
  const auto r = smoothness_report(empty, CanvasDims(32, 32), 1e-3);
  EXPECT_EQ(r.flagged_count(), 0u);
  for (const auto& e : r.entries) {
    EXPECT_EQ(e.coarse, 0.0);
    EXPECT_EQ(e.fine, 0.0);
  }
}

TEST(Smoothness, RejectsNonInteriorStroke) {
  EXPECT_THROW(smoothness_report(point_stroke(), CanvasDims(32, 32), 1e-3), std::invalid_argument);
}

TEST(Smoothness, RejectsBadEps) {
  const auto a = point_stroke().with(StrokeParams::Z0, 0.9).with(StrokeParams::Z2, 0.9);
  EXPECT_THROW(smoothness_report(a, CanvasDims(32, 32), 0.1), std::invalid_argument);
  EXPECT_THROW(smoothness_report(a, CanvasDims(32, 32), 0.0), std::invalid_argument);
  EXPECT_NO_THROW(smoothness_report(a, CanvasDims(32, 32), 0.05));
}
