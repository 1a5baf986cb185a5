#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sgpaint/align.hpp"
#include "sgpaint/stroke.hpp"

namespace sgpaint {

/// Self-diagnostics run by `sgpaint check`.
struct CheckResult {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool pass = false;
};

/// Uniform random stroke with the shape parameters drawn from [lo, hi].
template <typename Rng>
StrokeParams random_stroke(Rng& rng, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> shape(lo, hi);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::array<double, StrokeParams::size> v{};
  for (std::size_t i = 0; i < StrokeParams::size; ++i) {
    v[i] = i < StrokeParams::shape_size ? shape(rng) : unit(rng);
  }
  return StrokeParams(v);
}

template <typename Rng>
BBox random_bbox(Rng& rng, const CanvasDims& dims) {
  std::uniform_int_distribution<int> wd(1, dims.width);
  std::uniform_int_distribution<int> hd(1, dims.height);
  const int w = wd(rng);
  const int h = hd(rng);
  std::uniform_int_distribution<int> xd(0, dims.width - w);
  std::uniform_int_distribution<int> yd(0, dims.height - h);
  return {double(xd(rng)), double(yd(rng)), double(w), double(h)};
}

/// Maximum per-pixel gap between the production curve sampling and a 10x
/// denser sampling of the same stroke.
inline double sampling_gap(const StrokeParams& a, const CanvasDims& dims, const RenderConfig& cfg = {}) {
  RenderConfig dense = cfg;
  dense.curve_samples = cfg.curve_samples * 10;
  const auto coarse = rasterize_density(a, dims, cfg);
  const auto fine = rasterize_density(a, dims, dense);
  double gap = 0.0;
  for (std::size_t i = 0; i < coarse.values().size(); ++i) {
    gap = std::max(gap, std::abs(coarse.values()[i] - fine.values()[i]));
  }
  return gap;
}

inline std::vector<CheckResult> run_self_checks(int count = 50, std::uint64_t seed = 7) {
  std::mt19937_64 rng(seed);
  const CanvasDims dims(64, 64);
  std::vector<CheckResult> out;

  double worst_gap = 0.0;
  for (int k = 0; k < count; ++k) worst_gap = std::max(worst_gap, sampling_gap(random_stroke(rng), dims));
  out.push_back({"rasterizer sampling convergence (max abs diff)", worst_gap, 1e-2, worst_gap <= 1e-2});

  double flagged = 0.0;
  for (int k = 0; k < count; ++k) {
    flagged += static_cast<double>(smoothness_report(random_stroke(rng, 0.1, 0.9), dims, 1e-3).flagged_count());
  }
  out.push_back({"smoothness (flagged parameters)", flagged, 0.0, flagged == 0.0});

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Canvas img(dims);
  for (double& v : img.values()) v = unit(rng);
  double convention_gap = 0.0;
  for (int k = 0; k < count; ++k) {
    const BBox b = random_bbox(rng, dims);
    const auto p = zoom(img, b, dims);
    const auto n = zoom_normalized(img, NormBBox::from(b, dims), dims);
    for (std::size_t i = 0; i < p.values().size(); ++i) {
      convention_gap = std::max(convention_gap, std::abs(p.values()[i] - n.values()[i]));
    }
  }
  out.push_back({"pixel vs normalized affine (max abs diff)", convention_gap, 1e-5, convention_gap <= 1e-5});

  const auto same = zoom(img, BBox::full(dims), dims);
  double identity_gap = 0.0;
  for (std::size_t i = 0; i < img.values().size(); ++i) {
    identity_gap = std::max(identity_gap, std::abs(same.values()[i] - img.values()[i]));
  }
  out.push_back({"full-box zoom identity (max abs diff)", identity_gap, 1e-6, identity_gap <= 1e-6});
  return out;
}

}  // namespace sgpaint
