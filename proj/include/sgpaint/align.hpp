#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sgpaint/image.hpp"

namespace sgpaint {

class NoForegroundError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Foreground bounding box in pixels: top-left corner plus extent.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  static BBox full(const CanvasDims& dims) { return {0.0, 0.0, double(dims.width), double(dims.height)}; }

  void validate(const CanvasDims& dims) const {
    if (!(w >= 1.0 && h >= 1.0)) {
      throw std::invalid_argument("degenerate bbox: extent must be at least 1 pixel");
    }
    if (!(x >= 0.0 && y >= 0.0 && x + w <= dims.width && y + h <= dims.height)) {
      throw std::invalid_argument("bbox exceeds the image bounds");
    }
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Bounding box in fractions of the image size.
struct NormBBox {
  double x = 0.0;
  double y = 0.0;
  double w = 1.0;
  double h = 1.0;

  static NormBBox from(const BBox& b, const CanvasDims& dims) {
    return {b.x / dims.width, b.y / dims.height, b.w / dims.width, b.h / dims.height};
  }
};

/// 2x3 affine map (the transpose of the 3x2 layout): x' = m[0]·(x, y, 1), y' = m[1]·(x, y, 1).
struct AffineMatrix {
  std::array<std::array<double, 3>, 2> m{};

  double operator()(int r, int c) const { return m[r][c]; }
  Point apply(double x, double y) const {
    return {m[0][0] * x + m[0][1] * y + m[0][2], m[1][0] * x + m[1][1] * y + m[1][2]};
  }
};

/// Maps input pixel coordinates inside the box onto the full W x H raster.
inline AffineMatrix pixel_affine(const BBox& box, const CanvasDims& dims) {
  if (!(box.w >= 1.0 && box.h >= 1.0)) throw std::invalid_argument("pixel_affine: degenerate bbox");
  const double W = dims.width;
  const double H = dims.height;
  return {{{{W / box.w, 0.0, -W * box.x / box.w}, {0.0, H / box.h, -H * box.y / box.h}}}};
}

/// Output-to-input map in [-1,1]-normalized coordinates (grid-sampler convention).
inline AffineMatrix normalized_affine(const NormBBox& b) {
  if (!(b.w > 0.0 && b.h > 0.0)) throw std::invalid_argument("normalized_affine: degenerate extent");
  if (b.x < 0.0 || b.y < 0.0 || b.x > 1.0 || b.y > 1.0 || b.w > 1.0 || b.h > 1.0) {
    throw std::invalid_argument("normalized_affine: coordinates outside [0,1]");
  }
  return {{{{b.w, 0.0, 2.0 * b.x + b.w - 1.0}, {0.0, b.h, 2.0 * b.y + b.h - 1.0}}}};
}

namespace detail {

// Bilinear read at index coordinates (sx, sy); taps outside the image are 0.
template <int C>
double bilinear_tap(const Image<C>& img, double sx, double sy, int ch) {
  const double fx0 = std::floor(sx);
  const double fy0 = std::floor(sy);
  const int x0 = static_cast<int>(fx0);
  const int y0 = static_cast<int>(fy0);
  const double tx = sx - fx0;
  const double ty = sy - fy0;
  auto read = [&](int r, int c) {
    if (r < 0 || c < 0 || r >= img.height() || c >= img.width()) return 0.0;
    return img.at(r, c, ch);
  };
  const double top = (1.0 - tx) * read(y0, x0) + tx * read(y0, x0 + 1);
  const double bot = (1.0 - tx) * read(y0 + 1, x0) + tx * read(y0 + 1, x0 + 1);
  return (1.0 - ty) * top + ty * bot;
}

}  // namespace detail

namespace detail {

// One axis of an axis-aligned bilinear resampling: the two source taps and
// their weights for each output index. Out-of-range taps carry weight 0.
struct AxisTaps {
  std::vector<int> lo, hi;
  std::vector<double> w_lo, w_hi;

  AxisTaps(int out_n, int in_n, auto&& source_of) : lo(out_n), hi(out_n), w_lo(out_n), w_hi(out_n) {
    for (int k = 0; k < out_n; ++k) {
      const double s = source_of(k);
      const double f = std::floor(s);
      const double t = s - f;
      const int a = static_cast<int>(f);
      const int b = a + 1;
      const bool a_in = a >= 0 && a < in_n;
      const bool b_in = b >= 0 && b < in_n;
      lo[k] = a_in ? a : 0;
      hi[k] = b_in ? b : 0;
      w_lo[k] = a_in ? 1.0 - t : 0.0;
      w_hi[k] = b_in ? t : 0.0;
    }
  }
};

}  // namespace detail

/// Crops the box region and rescales it to `out_dims` with bilinear sampling.
/// Uses the pixel-convention matrix; output pixel centers are mapped back
/// through its inverse. Samples outside the input read as 0.
template <int C>
Image<C> zoom(const Image<C>& img, const BBox& box, const CanvasDims& out_dims) {
  box.validate(img.dims());
  const AffineMatrix A = pixel_affine(box, img.dims());
  // Output raster coordinates are expressed on the W x H raster A targets.
  const double sx_out = double(img.width()) / out_dims.width;
  const double sy_out = double(img.height()) / out_dims.height;
  const detail::AxisTaps xs(out_dims.width, img.width(), [&](int j) {
    return ((j + 0.5) * sx_out - A(0, 2)) / A(0, 0) - 0.5;
  });
  const detail::AxisTaps ys(out_dims.height, img.height(), [&](int i) {
    return ((i + 0.5) * sy_out - A(1, 2)) / A(1, 1) - 0.5;
  });
  Image<C> out(out_dims);
  for (int i = 0; i < out_dims.height; ++i) {
    const double* top = img.row(ys.lo[i]);
    const double* bot = img.row(ys.hi[i]);
    const double wt = ys.w_lo[i];
    const double wb = ys.w_hi[i];
    double* dst = out.row(i);
    for (int j = 0; j < out_dims.width; ++j) {
      const int l = xs.lo[j] * C;
      const int r = xs.hi[j] * C;
      const double wl = xs.w_lo[j];
      const double wr = xs.w_hi[j];
      for (int c = 0; c < C; ++c) {
        const double t = wl * top[l + c] + wr * top[r + c];
        const double b = wl * bot[l + c] + wr * bot[r + c];
        dst[j * C + c] = wt * t + wb * b;
      }
    }
  }
  return out;
}

template <int C>
Image<C> zoom(const Image<C>& img, const BBox& box) {
  return zoom(img, box, img.dims());
}

/// Same geometric map as zoom(), driven by the normalized matrix.
template <int C>
Image<C> zoom_normalized(const Image<C>& img, const NormBBox& box, const CanvasDims& out_dims) {
  const AffineMatrix A = normalized_affine(box);
  Image<C> out(out_dims);
  for (int i = 0; i < out_dims.height; ++i) {
    const double yn = 2.0 * (i + 0.5) / out_dims.height - 1.0;
    for (int j = 0; j < out_dims.width; ++j) {
      const double xn = 2.0 * (j + 0.5) / out_dims.width - 1.0;
      const Point src = A.apply(xn, yn);
      const double sx = (src.x + 1.0) * img.width() / 2.0 - 0.5;
      const double sy = (src.y + 1.0) * img.height() / 2.0 - 0.5;
      for (int c = 0; c < C; ++c) out.at(i, j, c) = detail::bilinear_tap(img, sx, sy, c);
    }
  }
  return out;
}

/// Tight box over {S >= threshold}, padded by ceil(pad_frac * extent) per axis
/// (split across both sides) and clipped to the image.
inline BBox bbox_from_mask(const SegMap& seg, double threshold, double pad_frac) {
  if (pad_frac < 0.0) throw std::invalid_argument("bbox_from_mask: negative padding");
  int r0 = seg.height(), r1 = -1, c0 = seg.width(), c1 = -1;
  for (int i = 0; i < seg.height(); ++i) {
    for (int j = 0; j < seg.width(); ++j) {
      if (seg.at(i, j) >= threshold) {
        r0 = std::min(r0, i);
        r1 = std::max(r1, i);
        c0 = std::min(c0, j);
        c1 = std::max(c1, j);
      }
    }
  }
  if (r1 < 0) throw NoForegroundError("no foreground: mask has no pixel >= threshold");

  auto pad_axis = [pad_frac](int lo, int hi, int limit) {
    const int extent = hi - lo + 1;
    // Guard against products like 0.05 * 20 landing a hair above an integer.
    const int total = static_cast<int>(std::ceil(pad_frac * extent - 1e-9));
    const int before = total / 2;
    const int after = total - before;
    const int a = std::max(0, lo - before);
    const int b = std::min(limit - 1, hi + after);
    return std::pair{a, b - a + 1};
  };
  const auto [x, w] = pad_axis(c0, c1, seg.width());
  const auto [y, h] = pad_axis(r0, r1, seg.height());
  return {double(x), double(y), double(w), double(h)};
}

}  // namespace sgpaint
