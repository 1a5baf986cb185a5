#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

#include "sgpaint/align.hpp"
#include "sgpaint/image.hpp"

namespace sgpaint {

/// Canvas-similarity critic. Higher means `candidate` is closer to `reference`.
/// Implementations must be deterministic and safe to call concurrently.
class SimilarityScorer {
public:
  virtual ~SimilarityScorer() = default;
  virtual double score(const Canvas& reference, const Canvas& candidate) const = 0;
  virtual std::string name() const = 0;
};

/// Negative mean squared difference, in [-1, 0].
inline double neg_l2_score(const Canvas& reference, const Canvas& candidate) {
  require_same_dims(reference.dims(), candidate.dims(), "neg_l2_score");
  return -mean_squared_error(reference, candidate);
}

class NegL2Scorer final : public SimilarityScorer {
public:
  double score(const Canvas& reference, const Canvas& candidate) const override {
    return neg_l2_score(reference, candidate);
  }
  std::string name() const override { return "neg_l2"; }
};

/// Negative mean absolute difference after 4x box downsampling.
class DownsampledL1Scorer final : public SimilarityScorer {
public:
  double score(const Canvas& reference, const Canvas& candidate) const override {
    require_same_dims(reference.dims(), candidate.dims(), "downsampled_l1");
    constexpr int f = 4;
    const int h = reference.height() / f;
    const int w = reference.width() / f;
    double acc = 0.0;
    for (int i = 0; i < h; ++i) {
      for (int j = 0; j < w; ++j) {
        for (int c = 0; c < 3; ++c) {
          double d = 0.0;
          for (int di = 0; di < f; ++di) {
            for (int dj = 0; dj < f; ++dj) {
              d += reference.at(i * f + di, j * f + dj, c) - candidate.at(i * f + di, j * f + dj, c);
            }
          }
          acc += std::abs(d) / (f * f);
        }
      }
    }
    return -acc / (static_cast<double>(h) * w * 3);
  }
  std::string name() const override { return "downsampled_l1"; }
};

inline std::unique_ptr<SimilarityScorer> make_scorer(const std::string& name) {
  if (name == "neg_l2") return std::make_unique<NegL2Scorer>();
  if (name == "downsampled_l1") return std::make_unique<DownsampledL1Scorer>();
  throw std::invalid_argument("unknown scorer: " + name);
}

inline double background_reward(const SimilarityScorer& scorer, const Canvas& target,
                                 const Canvas& before, const Canvas& after) {
  require_same_dims(before.dims(), after.dims(), "background_reward");
  return scorer.score(target, after) - scorer.score(target, before);
}

inline double foreground_reward_unaligned(const SimilarityScorer& scorer, const Canvas& target,
                                          const Canvas& before, const Canvas& after, const SegMap& seg) {
  const Canvas ref = masked(target, seg);
  return scorer.score(ref, masked(after, seg)) - scorer.score(ref, masked(before, seg));
}

/// Foreground reward on views zoomed to the bounding box, each masked by the
/// zoomed segmentation.
inline double foreground_reward_aligned(const SimilarityScorer& scorer, const Canvas& target,
                                        const Canvas& before, const Canvas& after, const SegMap& seg,
                                        const BBox& box) {
  require_same_dims(before.dims(), after.dims(), "foreground_reward_aligned");
  const SegMap zs = zoom(seg, box);
  const Canvas ref = masked(zoom(target, box), zs);
  return scorer.score(ref, masked(zoom(after, box), zs)) -
         scorer.score(ref, masked(zoom(before, box), zs));
}

enum class GbpNorm { frobenius, count };

/// Importance-weighted squared difference ||G . (I - C)||_F^2 divided by
/// ||G||_F (or by the count of non-zero entries of G). G broadcasts over RGB.
inline double gbp_distance(const GbpMap& gbp, const Canvas& target, const Canvas& canvas,
                           GbpNorm norm = GbpNorm::frobenius) {
  require_same_dims(gbp.dims(), target.dims(), "gbp_distance");
  require_same_dims(gbp.dims(), canvas.dims(), "gbp_distance");
  auto g = gbp.values();
  auto t = target.values();
  auto c = canvas.values();
  double num = 0.0;
  double sq = 0.0;
  std::size_t nonzero = 0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    sq += g[p] * g[p];
    nonzero += g[p] != 0.0 ? 1 : 0;
    for (int ch = 0; ch < 3; ++ch) {
      const double d = g[p] * (t[p * 3 + ch] - c[p * 3 + ch]);
      num += d * d;
    }
  }
  if (nonzero == 0) throw std::invalid_argument("gbp_distance: GBP map is identically zero");
  return norm == GbpNorm::frobenius ? num / std::sqrt(sq) : num / static_cast<double>(nonzero);
}

inline double focus_reward(double distance_before, double distance_after) {
  return distance_before - distance_after;
}

struct RewardWeights {
  double eta = 2.0;    // foreground
  double nu = 10.0;    // focus
  double kappa = 0.0;  // focus weight in the single-critic ablation

  void validate() const {
    if (!std::isfinite(eta) || !std::isfinite(nu) || !std::isfinite(kappa)) {
      throw std::invalid_argument("reward weights must be finite");
    }
  }
};

enum class RewardMode {
  bilevel,   // r^b + eta r^f + nu r^focus
  ablation,  // r^wgan + kappa r^focus, r^wgan being the unmasked difference
};

struct RewardBreakdown {
  double background = 0.0;
  double foreground = 0.0;
  double focus = 0.0;
  double total = 0.0;
};

/// Combines component rewards under the active weights. In ablation mode
/// `background` carries the unmasked critic difference.
inline RewardBreakdown total_reward(double background, double foreground, double focus,
                                    const RewardWeights& w, RewardMode mode = RewardMode::bilevel) {
  RewardBreakdown r{background, foreground, focus, 0.0};
  r.total = mode == RewardMode::bilevel ? background + w.eta * foreground + w.nu * focus
                                        : background + w.kappa * focus;
  return r;
}

struct RewardConfig {
  RewardWeights weights;
  RewardMode mode = RewardMode::bilevel;
  bool aligned = true;
  GbpNorm gbp_norm = GbpNorm::frobenius;
  // Zoom output resolution; zero means "same as the input".
  int zoom_height = 0;
  int zoom_width = 0;
};

/// Per-canvas quantities whose successive differences form the rewards.
struct CanvasScores {
  double global = 0.0;      // D(I, C)
  double foreground = 0.0;  // D on the (zoomed) masked views
  double gbp = 0.0;         // GBP distance on the zoomed views
};

/// Holds the target-side views of one episode state (zoomed target, mask and
/// GBP map) so candidate canvases are scored without recomputing them.
class RewardModel {
public:
  RewardModel(const SimilarityScorer& scorer, const Canvas& target, const SegMap& seg,
              const GbpMap& gbp, const BBox& box, RewardConfig cfg)
      : scorer_(&scorer), target_(&target), box_(box), cfg_(cfg) {
    require_same_dims(target.dims(), seg.dims(), "RewardModel(seg)");
    require_same_dims(target.dims(), gbp.dims(), "RewardModel(gbp)");
    cfg_.weights.validate();
    box_.validate(target.dims());
    out_dims_ = cfg_.zoom_height > 0 ? CanvasDims(cfg_.zoom_height, cfg_.zoom_width) : target.dims();
    zoom_target_ = zoom(target, box_, out_dims_);
    zoom_gbp_ = zoom(gbp, box_, out_dims_);
    fg_seg_ = cfg_.aligned ? zoom(seg, box_, out_dims_) : seg;
    fg_ref_ = masked(cfg_.aligned ? zoom_target_ : target, fg_seg_);
    const auto g = zoom_gbp_.values();
    focus_active_ = std::any_of(g.begin(), g.end(), [](double v) { return v != 0.0; });
  }

  CanvasScores scores(const Canvas& canvas) const {
    const Canvas zc = zoom(canvas, box_, out_dims_);
    CanvasScores s;
    s.global = scorer_->score(*target_, canvas);
    s.foreground = scorer_->score(fg_ref_, masked(cfg_.aligned ? zc : canvas, fg_seg_));
    // A box holding no GBP mass contributes no focus signal.
    s.gbp = focus_active_ ? gbp_distance(zoom_gbp_, zoom_target_, zc, cfg_.gbp_norm) : 0.0;
    return s;
  }

  RewardBreakdown reward(const CanvasScores& before, const CanvasScores& after) const {
    return total_reward(after.global - before.global, after.foreground - before.foreground,
                        focus_reward(before.gbp, after.gbp), cfg_.weights, cfg_.mode);
  }

  RewardBreakdown reward(const Canvas& before, const Canvas& after) const {
    return reward(scores(before), scores(after));
  }

  const RewardConfig& config() const { return cfg_; }
  const BBox& bbox() const { return box_; }

private:
  const SimilarityScorer* scorer_;
  const Canvas* target_;
  BBox box_;
  RewardConfig cfg_;
  CanvasDims out_dims_;
  SegMap fg_seg_;
  Canvas zoom_target_;
  Canvas fg_ref_;
  GbpMap zoom_gbp_;
  bool focus_active_ = false;
};

}  // namespace sgpaint
