#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sgpaint/image.hpp"

namespace sgpaint {

/// Quadratic Bezier evaluation B(u) = (1-u)^2 p0 + 2u(1-u) p1 + u^2 p2.
inline Point bezier_point(Point p0, Point p1, Point p2, double u) {
  const double v = 1.0 - u;
  return {v * v * p0.x + 2.0 * u * v * p1.x + u * u * p2.x,
          v * v * p0.y + 2.0 * u * v * p1.y + u * u * p2.y};
}

/// One brush stroke. Layout: x0 y0 x1 y1 x2 y2 z0 z2 w0 w2 r g b, all in [0,1].
///
/// Positions are fractions of canvas width (x) and height (y); z0/z2 are the
/// endpoint opacities and w0/w2 the endpoint widths as a fraction of the
/// maximum brush radius. Both are interpolated linearly along the curve.
class StrokeParams {
public:
  static constexpr std::size_t size = 13;
  enum Index : std::size_t { X0, Y0, X1, Y1, X2, Y2, Z0, Z2, W0, W2, R, G, B };
  /// Parameters that shape the density map (everything except color).
  static constexpr std::size_t shape_size = 10;

  StrokeParams() = default;

  explicit StrokeParams(const std::array<double, size>& v) : v_(v) {
    for (std::size_t i = 0; i < size; ++i) {
      if (!(v_[i] >= 0.0 && v_[i] <= 1.0)) {
        throw std::invalid_argument("stroke parameter " + std::to_string(i) +
                                    " outside [0,1]: " + std::to_string(v_[i]));
      }
    }
  }

  static StrokeParams from_span(std::span<const double> v) {
    if (v.size() != size) {
      throw std::invalid_argument("stroke needs 13 parameters, got " + std::to_string(v.size()));
    }
    std::array<double, size> a{};
    std::copy(v.begin(), v.end(), a.begin());
    return StrokeParams(a);
  }

  /// Clamps each component into [0,1]; NaN maps to 0.
  static StrokeParams clipped(std::span<const double> v) {
    std::array<double, size> a{};
    for (std::size_t i = 0; i < size && i < v.size(); ++i) {
      a[i] = std::isnan(v[i]) ? 0.0 : clamp01(v[i]);
    }
    return StrokeParams(a);
  }

  double operator[](std::size_t i) const { return v_[i]; }
  const std::array<double, size>& values() const { return v_; }

  Point p0() const { return {v_[X0], v_[Y0]}; }
  Point p1() const { return {v_[X1], v_[Y1]}; }
  Point p2() const { return {v_[X2], v_[Y2]}; }
  std::array<double, 3> color() const { return {v_[R], v_[G], v_[B]}; }

  StrokeParams with(std::size_t i, double value) const {
    auto a = v_;
    a[i] = value;
    return StrokeParams(a);
  }

  /// Same stroke traversed in the opposite direction.
  StrokeParams reversed() const {
    auto a = v_;
    std::swap(a[X0], a[X2]);
    std::swap(a[Y0], a[Y2]);
    std::swap(a[Z0], a[Z2]);
    std::swap(a[W0], a[W2]);
    return StrokeParams(a);
  }

  friend bool operator==(const StrokeParams&, const StrokeParams&) = default;

private:
  std::array<double, size> v_{};
};

struct RenderConfig {
  int curve_samples = 100;
  double max_radius_frac = 0.125;  // of min(H, W)
  double min_radius_px = 0.5;
  double aa_half_band_px = 1.0;

  void validate() const {
    if (curve_samples < 2) throw std::invalid_argument("curve_samples must be >= 2");
    if (!(max_radius_frac > 0.0)) throw std::invalid_argument("max_radius_frac must be > 0");
    if (!(min_radius_px > 0.0)) throw std::invalid_argument("min_radius_px must be > 0");
    if (!(aa_half_band_px > 0.0)) throw std::invalid_argument("aa_half_band_px must be > 0");
  }
};

namespace detail {

// Cubic smoothstep falloff: 1 inside radius - band, 0 outside radius + band.
inline double disc_coverage(double dist, double radius, double band) {
  const double t = (radius + band - dist) / (2.0 * band);
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * (3.0 - 2.0 * t);
}

}  // namespace detail

namespace detail {

// Sample of the swept disc: center in pixels, opacity, radius.
struct SweepNode {
  double x, y, alpha, radius;
  double raw_radius;  // before the minimum-radius floor

  friend bool operator<(const SweepNode& a, const SweepNode& b) {
    if (a.x != b.x) return a.x < b.x;
    if (a.y != b.y) return a.y < b.y;
    if (a.alpha != b.alpha) return a.alpha < b.alpha;
    if (a.radius != b.radius) return a.radius < b.radius;
    return a.raw_radius < b.raw_radius;
  }
};

struct PixelWindow {
  int r0, r1, c0, c1;
};

inline PixelWindow window(double xmin, double xmax, double ymin, double ymax, const CanvasDims& dims) {
  return {std::max(0, static_cast<int>(std::floor(ymin - 0.5))),
          std::min(dims.height - 1, static_cast<int>(std::ceil(ymax - 0.5))),
          std::max(0, static_cast<int>(std::floor(xmin - 0.5))),
          std::min(dims.width - 1, static_cast<int>(std::ceil(xmax - 0.5)))};
}

template <typename T>
inline T unit_clamp(T x) {
  const T lo = x > T(0) ? x : T(0);
  return lo < T(1) ? lo : T(1);
}

inline double disc_value(double dist_sq, double alpha, double radius, double band) {
  const double reach = radius + band;
  if (dist_sq >= reach * reach) return 0.0;
  const double inner = radius - band;
  if (inner > 0.0 && dist_sq <= inner * inner) return alpha;
  return alpha * disc_coverage(std::sqrt(dist_sq), radius, band);
}

}  // namespace detail

/// Sweeps an anti-aliased disc along the curve and keeps the per-pixel max of
/// opacity times coverage. Pixel (i, j) has its center at (j + 0.5, i + 0.5).
///
/// The curve is sampled at u_k = k/(N-1). Each sample contributes its own
/// disc, and each chord between consecutive samples contributes the disc at
/// the chord point of largest clearance for the pixel, with opacity and
/// radius interpolated along the chord. The chord term removes the scalloping
/// a bare point sweep shows when samples are sparser than a pixel.
inline DensityMap rasterize_density(const StrokeParams& a, const CanvasDims& dims,
                                    const RenderConfig& cfg = {}) {
  cfg.validate();
  DensityMap out(dims, 0.0);
  if (a[StrokeParams::Z0] <= 0.0 && a[StrokeParams::Z2] <= 0.0) return out;
  const int n = cfg.curve_samples;
  const double max_radius = cfg.max_radius_frac * dims.min_side();
  const double band = cfg.aa_half_band_px;
  const double W = dims.width;
  const double H = dims.height;

  std::vector<detail::SweepNode> nodes(n);
  for (int k = 0; k < n; ++k) {
    // Weights written so that reversing the stroke reproduces every sample
    // bit-for-bit: (wb, wa) for sample n-1-k is (wa, wb) for sample k.
    const double wb = static_cast<double>(k) / (n - 1);
    const double wa = static_cast<double>(n - 1 - k) / (n - 1);
    const double cx =
        (wa * wa * a[StrokeParams::X0] + wb * wb * a[StrokeParams::X2]) + 2.0 * wa * wb * a[StrokeParams::X1];
    const double cy =
        (wa * wa * a[StrokeParams::Y0] + wb * wb * a[StrokeParams::Y2]) + 2.0 * wa * wb * a[StrokeParams::Y1];
    const double width = wa * a[StrokeParams::W0] + wb * a[StrokeParams::W2];
    nodes[k] = {cx * W, cy * H, wa * a[StrokeParams::Z0] + wb * a[StrokeParams::Z2],
                std::max(cfg.min_radius_px, width * max_radius), width * max_radius};
  }

  // Single precision accumulation buffer; the row loop below vectorizes.
  std::vector<float> acc(dims.pixels(), 0.0f);
  for (int k = 0; k + 1 < n; ++k) {
    // Canonical endpoint order keeps the result independent of the stroke's
    // direction.
    detail::SweepNode p = nodes[k];
    detail::SweepNode q = nodes[k + 1];
    if (q < p) std::swap(p, q);
    if (p.alpha <= 0.0 && q.alpha <= 0.0) continue;
    const double ex = q.x - p.x;
    const double ey = q.y - p.y;
    const double len_sq = ex * ex + ey * ey;
    const double len = std::sqrt(len_sq);
    const double d_radius = q.radius - p.radius;
    // The chord point evaluated for a pixel is the one of largest clearance
    // radius(t) - dist(t): the projection shifted toward the wider end by
    // `shift` chord units per pixel of perpendicular distance. When the
    // radius grows faster than the chord is long, the wide end wins outright.
    const bool cone = std::abs(d_radius) < len;
    const float shift = cone ? static_cast<float>(d_radius / (len * std::sqrt(len_sq - d_radius * d_radius))) : 0.0f;
    const float wide_end = d_radius >= 0.0 ? 1.0f : 0.0f;
    const float cone_mix = cone ? 1.0f : 0.0f;
    const float inv_len_sq = len_sq > 0.0 ? static_cast<float>(1.0 / len_sq) : 0.0f;
    const float inv_len = len > 0.0 ? static_cast<float>(1.0 / len) : 0.0f;
    const float fex = static_cast<float>(ex), fey = static_cast<float>(ey);
    const float a0 = static_cast<float>(p.alpha), da = static_cast<float>(q.alpha - p.alpha);
    // The floor is applied per pixel so the radius stays max(floor, linear).
    const float r0 = static_cast<float>(p.raw_radius), dr = static_cast<float>(q.raw_radius - p.raw_radius);
    const float rmin = static_cast<float>(cfg.min_radius_px);
    const float fband = static_cast<float>(band);
    const float inv_band2 = static_cast<float>(1.0 / (2.0 * band));
    const float pr = static_cast<float>(p.radius), qr = static_cast<float>(q.radius);
    const float qa = static_cast<float>(q.alpha);
    const double reach = std::max(p.radius, q.radius) + band;
    const auto win = detail::window(std::min(p.x, q.x) - reach, std::max(p.x, q.x) + reach,
                                    std::min(p.y, q.y) - reach, std::max(p.y, q.y) + reach, dims);
    for (int i = win.r0; i <= win.r1; ++i) {
      const double py = (i + 0.5) - p.y;
      // Columns whose distance to the chord can be below `reach` on this row.
      double t_lo = 0.0, t_hi = 1.0;
      if (ey != 0.0) {
        const double ta = (py - reach) / ey;
        const double tb = (py + reach) / ey;
        t_lo = std::max(0.0, std::min(ta, tb));
        t_hi = std::min(1.0, std::max(ta, tb));
        if (t_lo > t_hi) continue;
      } else if (std::abs(py) >= reach) {
        continue;
      }
      const double xa = p.x + t_lo * ex;
      const double xb = p.x + t_hi * ex;
      const int c0 = std::max(win.c0, static_cast<int>(std::floor(std::min(xa, xb) - reach - 0.5)));
      const int c1 = std::min(win.c1, static_cast<int>(std::ceil(std::max(xa, xb) + reach - 0.5)));
      float* row = acc.data() + static_cast<std::size_t>(i) * dims.width;
      const float fpy = static_cast<float>(py);
      const float px0 = static_cast<float>(0.5 - p.x);
      for (int j = c0; j <= c1; ++j) {
        const float px = static_cast<float>(j) + px0;
        const float proj = (px * fex + fpy * fey) * inv_len_sq;
        const float perp = std::fabs(px * fey - fpy * fex) * inv_len;
        const float t = cone_mix * detail::unit_clamp(proj + shift * perp) + (1.0f - cone_mix) * wide_end;
        const float dx = px - t * fex;
        const float dy = fpy - t * fey;
        const float dist = std::sqrt(dx * dx + dy * dy);
        const float rt = r0 + t * dr;
        const float u = detail::unit_clamp(((rt > rmin ? rt : rmin) + fband - dist) * inv_band2);
        const float v = (a0 + t * da) * (u * u * (3.0f - 2.0f * u));
        // Where coverage saturates, the clearance point need not carry the
        // chord's highest opacity, so both endpoint discs are read as well.
        const float qdx = px - fex;
        const float qdy = fpy - fey;
        const float pu = detail::unit_clamp((pr + fband - std::sqrt(px * px + fpy * fpy)) * inv_band2);
        const float qu = detail::unit_clamp((qr + fband - std::sqrt(qdx * qdx + qdy * qdy)) * inv_band2);
        const float vp = a0 * (pu * pu * (3.0f - 2.0f * pu));
        const float vq = qa * (qu * qu * (3.0f - 2.0f * qu));
        const float ends = vp > vq ? vp : vq;
        const float best = v > ends ? v : ends;
        const float cur = row[j];
        row[j] = cur > best ? cur : best;
      }
    }
  }
  auto dst = out.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = clamp01(static_cast<double>(acc[i]));
  return out;
}

/// Colored rendering: density times color on an empty canvas.
inline Canvas colorize(const DensityMap& d, const std::array<double, 3>& color) {
  for (double c : color) {
    if (!(c >= 0.0 && c <= 1.0)) throw std::invalid_argument("color component outside [0,1]");
  }
  Canvas out(d.dims());
  auto src = d.values();
  auto dst = out.values();
  for (std::size_t p = 0; p < src.size(); ++p) {
    for (int c = 0; c < 3; ++c) dst[p * 3 + c] = src[p] * color[c];
  }
  return out;
}

inline double total_density(const DensityMap& d) {
  double s = 0.0;
  for (double v : d.values()) s += v;
  return s;
}

struct DerivativeEstimate {
  std::size_t parameter = 0;
  double coarse = 0.0;  // central difference at step eps
  double fine = 0.0;    // central difference at step eps / 10
  bool flagged = false;
};

struct SmoothnessReport {
  std::array<DerivativeEstimate, StrokeParams::shape_size> entries{};

  std::size_t flagged_count() const {
    std::size_t n = 0;
    for (const auto& e : entries) n += e.flagged ? 1 : 0;
    return n;
  }
};

/// Finite-difference check that the summed density responds smoothly to each
/// of the ten shape/opacity/width parameters.
inline SmoothnessReport smoothness_report(const StrokeParams& a, const CanvasDims& dims, double eps,
                                          const RenderConfig& cfg = {}) {
  if (!(eps > 0.0 && eps <= 0.05)) {
    throw std::invalid_argument("smoothness_report: eps must lie in (0, 0.05], got " +
                                std::to_string(eps));
  }
  SmoothnessReport report;
  for (std::size_t i = 0; i < StrokeParams::shape_size; ++i) report.entries[i].parameter = i;
  // A fully transparent stroke renders nothing; its report is all zeros.
  if (a[StrokeParams::Z0] == 0.0 && a[StrokeParams::Z2] == 0.0) return report;
  for (std::size_t i = 0; i < StrokeParams::shape_size; ++i) {
    if (a[i] < eps || a[i] > 1.0 - eps) {
      throw std::invalid_argument("smoothness_report: parameter " + std::to_string(i) +
                                  " not interior to [eps, 1-eps]");
    }
  }
  auto central = [&](std::size_t i, double h) {
    const double up = total_density(rasterize_density(a.with(i, a[i] + h), dims, cfg));
    const double dn = total_density(rasterize_density(a.with(i, a[i] - h), dims, cfg));
    return (up - dn) / (2.0 * h);
  };

  for (std::size_t i = 0; i < StrokeParams::shape_size; ++i) {
    auto& e = report.entries[i];
    e.coarse = central(i, eps);
    e.fine = central(i, eps / 10.0);
    const double big = std::max(std::abs(e.coarse), std::abs(e.fine));
    const bool significant = std::abs(e.coarse) > 1e-6 && std::abs(e.fine) > 1e-6;
    e.flagged = significant && std::abs(e.coarse - e.fine) > 0.25 * big;
  }
  return report;
}

}  // namespace sgpaint
