#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "sgpaint/image.hpp"
#include "sgpaint/stroke.hpp"

namespace sgpaint {

enum class StrokeRole { background, foreground };

inline const char* to_string(StrokeRole r) {
  return r == StrokeRole::background ? "background" : "foreground";
}

struct CompositeConfig {
  RenderConfig render;
  // When set, the (1 - d) attenuation is restricted to the stroke's own region
  // instead of applying to the whole canvas.
  bool masked_attenuation = false;
};

/// Strokes for one timestep, split into background and foreground sub-lists.
struct ActionBundle {
  std::vector<StrokeParams> background;
  std::vector<StrokeParams> foreground;

  std::size_t size() const { return background.size() + foreground.size(); }

  /// Splits a flat vector of 13 * (n_bg + n_fg) values, background first.
  /// Values are clipped into [0,1].
  static ActionBundle from_flat(std::span<const double> flat, std::size_t n_bg, std::size_t n_fg) {
    if (n_bg + n_fg == 0) throw std::invalid_argument("bundle must contain at least one stroke");
    if (flat.size() != StrokeParams::size * (n_bg + n_fg)) {
      throw std::invalid_argument("bundle vector has " + std::to_string(flat.size()) +
                                  " values, expected " +
                                  std::to_string(StrokeParams::size * (n_bg + n_fg)));
    }
    ActionBundle b;
    for (std::size_t k = 0; k < n_bg + n_fg; ++k) {
      auto s = StrokeParams::clipped(flat.subspan(k * StrokeParams::size, StrokeParams::size));
      (k < n_bg ? b.background : b.foreground).push_back(s);
    }
    return b;
  }

  /// A bundle of the given shape whose strokes all have zero opacity.
  static ActionBundle noop(std::size_t n_bg, std::size_t n_fg) {
    std::array<double, StrokeParams::size> v{};
    v.fill(0.5);
    v[StrokeParams::Z0] = 0.0;
    v[StrokeParams::Z2] = 0.0;
    ActionBundle b;
    b.background.assign(n_bg, StrokeParams(v));
    b.foreground.assign(n_fg, StrokeParams(v));
    return b;
  }
};

/// out = (1 - d) * C + d * color * region, with region = S (foreground) or
/// 1 - S (background). Pixels with zero density are left untouched.
inline void apply_stroke_inplace(Canvas& canvas, const StrokeParams& a, const SegMap& seg,
                                 StrokeRole role, const CompositeConfig& cfg = {}) {
  require_same_dims(canvas.dims(), seg.dims(), "apply_stroke");
  const DensityMap d = rasterize_density(a, canvas.dims(), cfg.render);
  const auto color = a.color();
  auto dens = d.values();
  auto mask = seg.values();
  auto px = canvas.values();
  for (std::size_t p = 0; p < dens.size(); ++p) {
    const double dp = dens[p];
    if (dp == 0.0) continue;
    const double region = role == StrokeRole::foreground ? mask[p] : 1.0 - mask[p];
    const double keep = cfg.masked_attenuation ? 1.0 - dp * region : 1.0 - dp;
    for (int c = 0; c < 3; ++c) {
      double& v = px[p * 3 + c];
      v = clamp01(keep * v + dp * color[c] * region);
    }
  }
}

inline Canvas apply_background_stroke(const Canvas& canvas, const StrokeParams& a, const SegMap& seg,
                                      const CompositeConfig& cfg = {}) {
  Canvas out = canvas;
  apply_stroke_inplace(out, a, seg, StrokeRole::background, cfg);
  return out;
}

inline Canvas apply_foreground_stroke(const Canvas& canvas, const StrokeParams& a, const SegMap& seg,
                                      const CompositeConfig& cfg = {}) {
  Canvas out = canvas;
  apply_stroke_inplace(out, a, seg, StrokeRole::foreground, cfg);
  return out;
}

/// All background strokes in order, then all foreground strokes in order.
inline Canvas apply_bundle(const Canvas& canvas, const ActionBundle& bundle, const SegMap& seg,
                           const CompositeConfig& cfg = {}) {
  if (bundle.size() == 0) throw std::invalid_argument("apply_bundle: empty bundle");
  Canvas out = canvas;
  for (const auto& a : bundle.background) apply_stroke_inplace(out, a, seg, StrokeRole::background, cfg);
  for (const auto& a : bundle.foreground) apply_stroke_inplace(out, a, seg, StrokeRole::foreground, cfg);
  return out;
}

}  // namespace sgpaint
