#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "sgpaint/align.hpp"
#include "sgpaint/check.hpp"

using namespace sgpaint;

namespace {

void expect_matrix(const AffineMatrix& m, std::array<double, 6> want) {
  EXPECT_NEAR(m(0, 0), want[0], 1e-12);
  EXPECT_NEAR(m(0, 1), want[1], 1e-12);
  EXPECT_NEAR(m(0, 2), want[2], 1e-12);
  EXPECT_NEAR(m(1, 0), want[3], 1e-12);
  EXPECT_NEAR(m(1, 1), want[4], 1e-12);
  EXPECT_NEAR(m(1, 2), want[5], 1e-12);
}

Canvas gradient(const CanvasDims& dims) {
  Canvas g(dims);
  for (int i = 0; i < dims.height; ++i) {
    for (int j = 0; j < dims.width; ++j) {
      g.at(i, j, 0) = double(j) / (dims.width - 1);
      g.at(i, j, 1) = double(i) / (dims.height - 1);
      g.at(i, j, 2) = 0.5 * (g.at(i, j, 0) + g.at(i, j, 1));
    }
  }
  return g;
}

}  // namespace

TEST(PixelAffine, Examples) {
  const CanvasDims dims(64, 64);
  expect_matrix(pixel_affine(BBox::full(dims), dims), {1, 0, 0, 0, 1, 0});
  expect_matrix(pixel_affine({16, 16, 32, 32}, dims), {2, 0, -32, 0, 2, -32});
  EXPECT_THROW(pixel_affine({0, 0, 0, 10}, dims), std::invalid_argument);
}

TEST(PixelAffine, MapsBoxCornersToRaster) {
  const CanvasDims dims(48, 80);
  const BBox b{10, 6, 20, 12};
  const auto A = pixel_affine(b, dims);
  const Point tl = A.apply(b.x, b.y);
  const Point br = A.apply(b.x + b.w, b.y + b.h);
  EXPECT_NEAR(tl.x, 0.0, 1e-12);
  EXPECT_NEAR(tl.y, 0.0, 1e-12);
  EXPECT_NEAR(br.x, 80.0, 1e-12);
  EXPECT_NEAR(br.y, 48.0, 1e-12);
}

TEST(NormalizedAffine, Examples) {
  expect_matrix(normalized_affine({0, 0, 1, 1}), {1, 0, 0, 0, 1, 0});
  expect_matrix(normalized_affine({0.25, 0.25, 0.5, 0.5}), {0.5, 0, 0, 0, 0.5, 0});
  expect_matrix(normalized_affine({0.5, 0.5, 0.75, 0.1}), {0.75, 0, 0.75, 0, 0.1, 0.1});
  EXPECT_THROW(normalized_affine({0, 0, 0, 0.5}), std::invalid_argument);
  EXPECT_THROW(normalized_affine({-0.1, 0, 0.5, 0.5}), std::invalid_argument);
}

TEST(NormalizedAffine, OddBoxAgreesWithPixelZoom) {
  // x = 0.5, w = 0.75 reaches past the right border; both conventions read zeros there.
  const CanvasDims dims(40, 40);
  std::mt19937_64 rng(3);
  const Canvas img = oracle::random_canvas(rng, dims);
  const NormBBox nb{0.5, 0.5, 0.75, 0.1};
  const auto n = zoom_normalized(img, nb, dims);
  // Brute force: output (i, j) samples input pixel coords x = 20 + (j + 0.5) * 30 / 40.
  for (int i = 0; i < dims.height; ++i) {
    for (int j = 0; j < dims.width; ++j) {
      const double sx = 20.0 + (j + 0.5) * 30.0 / 40.0 - 0.5;
      const double sy = 20.0 + (i + 0.5) * 4.0 / 40.0 - 0.5;
      const int x0 = int(std::floor(sx)), y0 = int(std::floor(sy));
      const double fx = sx - x0, fy = sy - y0;
      auto rd = [&](int r, int c) { return (r < 0 || c < 0 || r >= 40 || c >= 40) ? 0.0 : img.at(r, c, 1); };
      const double want = (1 - fy) * ((1 - fx) * rd(y0, x0) + fx * rd(y0, x0 + 1)) +
                          fy * ((1 - fx) * rd(y0 + 1, x0) + fx * rd(y0 + 1, x0 + 1));
      ASSERT_NEAR(n.at(i, j, 1), want, 1e-12) << i << "," << j;
    }
  }
}

TEST(Zoom, FullBoxIsIdentity) {
  std::mt19937_64 rng(1);
  const CanvasDims dims(37, 53);
  const Canvas img = oracle::random_canvas(rng, dims);
  EXPECT_EQ(zoom(img, BBox::full(dims)), img);
  const ScalarMap m = oracle::random_map(rng, dims);
  EXPECT_EQ(zoom(m, BBox::full(dims)), m);
}

TEST(Zoom, ConstantImageInterior) {
  const CanvasDims dims(32, 32);
  const ScalarMap c(dims, 0.7);
  const auto z = zoom(c, {8, 4, 12, 20});
  for (int i = 2; i < 30; ++i) {
    for (int j = 2; j < 30; ++j) EXPECT_NEAR(z.at(i, j), 0.7, 1e-12);
  }
}

TEST(Zoom, GradientMatchesCropResizeOracle) {
  const CanvasDims dims(64, 64);
  const Canvas g = gradient(dims);
  const auto z = zoom(g, {16, 16, 32, 32}, dims);
  const auto o = oracle::crop_resize(g, 16, 16, 32, 32, dims);
  EXPECT_LE(oracle::max_abs_diff(z.values(), o.values()), 1e-5);
}

TEST(Zoom, RandomBoxesMatchOracle) {
  std::mt19937_64 rng(2);
  const CanvasDims dims(40, 56);
  const Canvas img = oracle::random_canvas(rng, dims);
  for (int k = 0; k < 30; ++k) {
    const BBox b = random_bbox(rng, dims);
    const CanvasDims out(24 + k % 3 * 8, 32);
    const auto z = zoom(img, b, out);
    const auto o = oracle::crop_resize(img, int(b.x), int(b.y), int(b.w), int(b.h), out);
    EXPECT_LE(oracle::max_abs_diff(z.values(), o.values()), 1e-9) << k;
  }
}

TEST(Zoom, ConventionsAgree) {
  std::mt19937_64 rng(4);
  const CanvasDims dims(48, 48);
  const Canvas img = oracle::random_canvas(rng, dims);
  for (int k = 0; k < 50; ++k) {
    const BBox b = random_bbox(rng, dims);
    const auto p = zoom(img, b, dims);
    const auto n = zoom_normalized(img, NormBBox::from(b, dims), dims);
    EXPECT_LE(oracle::max_abs_diff(p.values(), n.values()), 1e-5);
  }
}

TEST(Zoom, RangeAndDeterminism) {
  std::mt19937_64 rng(5);
  const CanvasDims dims(32, 32);
  const Canvas img = oracle::random_canvas(rng, dims);
  const BBox b{3, 5, 17, 9};
  const auto z1 = zoom(img, b);
  EXPECT_TRUE(z1.in_unit_range());
  EXPECT_EQ(z1, zoom(img, b));
}

TEST(Zoom, RejectsBadBoxes) {
  const ScalarMap m(CanvasDims(16, 16), 0.5);
  EXPECT_THROW(zoom(m, {0, 0, 0, 4}), std::invalid_argument);
  EXPECT_THROW(zoom(m, {10, 0, 8, 4}), std::invalid_argument);
}

TEST(BboxFromMask, Examples) {
  SegMap s(CanvasDims(64, 64), 0.0);
  for (int i = 10; i <= 20; ++i) {
    for (int j = 30; j <= 40; ++j) s.at(i, j) = 1.0;
  }
  EXPECT_EQ(bbox_from_mask(s, 0.5, 0.0), (BBox{30, 10, 11, 11}));
  EXPECT_EQ(bbox_from_mask(s, 0.5, 0.1), (BBox{29, 9, 13, 13}));
  EXPECT_THROW(bbox_from_mask(SegMap(CanvasDims(64, 64), 0.0), 0.5, 0.0), NoForegroundError);
}

TEST(BboxFromMask, ClipsToImage) {
  SegMap s(CanvasDims(16, 16), 0.0);
  for (int i = 0; i < 4; ++i) {
    for (int j = 12; j < 16; ++j) s.at(i, j) = 0.8;
  }
  const BBox b = bbox_from_mask(s, 0.5, 0.5);
  EXPECT_EQ(b, (BBox{11, 0, 5, 5}));
  EXPECT_NO_THROW(b.validate(s.dims()));
}
