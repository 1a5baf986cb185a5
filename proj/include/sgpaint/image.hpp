#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sgpaint {

/// Raised on inconsistent image dimensions or malformed image data.
class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

struct CanvasDims {
  int height = 0;
  int width = 0;

  CanvasDims() = default;
  CanvasDims(int h, int w) : height(h), width(w) {
    if (h < 8 || w < 8) {
      throw DimensionError("canvas dimensions must be at least 8x8, got " +
                           std::to_string(h) + "x" + std::to_string(w));
    }
  }

  std::size_t pixels() const { return static_cast<std::size_t>(height) * width; }
  int min_side() const { return std::min(height, width); }

  friend bool operator==(const CanvasDims&, const CanvasDims&) = default;
};

inline std::string to_string(const CanvasDims& d) {
  return std::to_string(d.height) + "x" + std::to_string(d.width);
}

// Row-major planar image with a fixed channel count. Values are expected to
// lie in [0,1]; the container itself does not enforce it, the operations do.
template <int Channels>
class Image {
public:
  static constexpr int channels = Channels;

  Image() = default;
  explicit Image(CanvasDims dims, double fill = 0.0)
      : dims_(dims), data_(dims.pixels() * Channels, fill) {}

  const CanvasDims& dims() const { return dims_; }
  int height() const { return dims_.height; }
  int width() const { return dims_.width; }

  double& at(int row, int col, int ch = 0) {
    return data_[(static_cast<std::size_t>(row) * dims_.width + col) * Channels + ch];
  }
  double at(int row, int col, int ch = 0) const {
    return data_[(static_cast<std::size_t>(row) * dims_.width + col) * Channels + ch];
  }

  double* row(int r) { return data_.data() + static_cast<std::size_t>(r) * dims_.width * Channels; }
  const double* row(int r) const {
    return data_.data() + static_cast<std::size_t>(r) * dims_.width * Channels;
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool in_unit_range() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](double v) { return v >= 0.0 && v <= 1.0; });
  }

  friend bool operator==(const Image&, const Image&) = default;

private:
  CanvasDims dims_;
  std::vector<double> data_;
};

/// H x W x 3 RGB image; houses both the target and the evolving canvas.
using Canvas = Image<3>;
/// H x W single-channel map: stroke density, segmentation, GBP importance.
using ScalarMap = Image<1>;
using DensityMap = ScalarMap;
using SegMap = ScalarMap;
using GbpMap = ScalarMap;

inline void require_same_dims(const CanvasDims& a, const CanvasDims& b, const char* what) {
  if (!(a == b)) {
    throw DimensionError(std::string(what) + ": dimension mismatch " + to_string(a) +
                         " vs " + to_string(b));
  }
}

/// Multiplies every channel of `img` by the single-channel `mask`.
inline Canvas masked(const Canvas& img, const ScalarMap& mask) {
  require_same_dims(img.dims(), mask.dims(), "masked");
  Canvas out(img.dims());
  auto src = img.values();
  auto m = mask.values();
  auto dst = out.values();
  for (std::size_t p = 0; p < m.size(); ++p) {
    for (int c = 0; c < 3; ++c) dst[p * 3 + c] = src[p * 3 + c] * m[p];
  }
  return out;
}

/// Mean over pixels and channels of the squared difference.
template <int C>
double mean_squared_error(const Image<C>& a, const Image<C>& b) {
  require_same_dims(a.dims(), b.dims(), "mean_squared_error");
  auto x = a.values();
  auto y = b.values();
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return acc / static_cast<double>(x.size());
}

}  // namespace sgpaint
