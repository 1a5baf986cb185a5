#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "sgpaint/align.hpp"
#include "sgpaint/compositor.hpp"
#include "sgpaint/image.hpp"
#include "sgpaint/rewards.hpp"
#include "sgpaint/stroke.hpp"

namespace sgpaint {

/// Index of the instance mask whose region differs most from the target,
/// argmax_i ||S_i . (I - C)||_F. Ties go to the lowest index.
inline std::size_t select_instance(const Canvas& target, const Canvas& canvas,
                                   const std::vector<SegMap>& masks) {
  if (masks.empty()) throw std::invalid_argument("select_instance: no instance masks");
  require_same_dims(target.dims(), canvas.dims(), "select_instance");
  auto t = target.values();
  auto c = canvas.values();
  std::size_t best = 0;
  double best_sq = -1.0;
  for (std::size_t i = 0; i < masks.size(); ++i) {
    require_same_dims(target.dims(), masks[i].dims(), "select_instance");
    auto m = masks[i].values();
    double sq = 0.0;
    for (std::size_t p = 0; p < m.size(); ++p) {
      for (int ch = 0; ch < 3; ++ch) {
        const double d = m[p] * (t[p * 3 + ch] - c[p * 3 + ch]);
        sq += d * d;
      }
    }
    // Comparing squared norms preserves the argmax.
    if (sq > best_sq) {
      best_sq = sq;
      best = i;
    }
  }
  return best;
}

struct OptimizerConfig {
  int population = 64;
  double elite_frac = 0.125;
  int generations = 30;
  double init_sigma = 0.25;
  double min_sigma = 0.01;
  std::uint64_t seed = 0;
  int episode_length = 40;  // bundles
  int n_background = 2;
  int n_foreground = 3;
  int threads = 1;

  int elite_count() const {
    return std::max(1, static_cast<int>(std::lround(elite_frac * population)));
  }
  std::size_t bundle_size() const { return static_cast<std::size_t>(n_background + n_foreground); }

  void validate() const {
    if (population < 4) throw std::invalid_argument("population must be >= 4");
    if (!(elite_frac > 0.0 && elite_frac < 1.0)) throw std::invalid_argument("elite_frac must lie in (0,1)");
    if (generations < 1) throw std::invalid_argument("generations must be >= 1");
    if (!(init_sigma > 0.0)) throw std::invalid_argument("init_sigma must be > 0");
    if (min_sigma < 0.0) throw std::invalid_argument("min_sigma must be >= 0");
    if (episode_length < 0) throw std::invalid_argument("episode_length must be >= 0");
    if (n_background < 0 || n_foreground < 0 || n_background + n_foreground < 1) {
      throw std::invalid_argument("bundle must hold at least one stroke");
    }
    if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  }
};

struct PainterConfig {
  OptimizerConfig optimizer;
  CompositeConfig composite;
  RewardConfig reward;
  double initial_canvas = 0.0;  // constant fill of C_0
  std::string scorer = "neg_l2";
};

/// The MDP state (C_t, I, S_I, G_I, t) plus instance masks and the active box.
struct EpisodeState {
  Canvas canvas;
  Canvas target;
  SegMap seg;
  GbpMap gbp;
  int step = 0;
  std::vector<SegMap> instance_masks;
  BBox bbox;
  RewardWeights weights;

  void validate() const {
    require_same_dims(target.dims(), canvas.dims(), "EpisodeState(canvas)");
    require_same_dims(target.dims(), seg.dims(), "EpisodeState(seg)");
    require_same_dims(target.dims(), gbp.dims(), "EpisodeState(gbp)");
    for (const auto& m : instance_masks) require_same_dims(target.dims(), m.dims(), "EpisodeState(instance)");
    bbox.validate(target.dims());
    if (step < 0) throw std::invalid_argument("EpisodeState: negative step");
  }
};

struct BundleResult {
  ActionBundle bundle;
  RewardBreakdown reward;
  Canvas canvas;  // canvas after applying the bundle
  bool noop = false;
};

namespace detail {

template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, n);
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
}

}  // namespace detail

/// Cross-entropy search over the flattened 13K-dimensional bundle vector.
///
/// Candidates are ranked by (keeps the global score from dropping, total
/// reward). The best admissible candidate over all generations is returned;
/// if none has total >= 0 and background >= 0 a zero-opacity bundle with zero
/// reward is returned instead.
inline BundleResult optimize_bundle(const EpisodeState& state, const RewardModel& model,
                                    const OptimizerConfig& cfg, const CompositeConfig& composite = {}) {
  cfg.validate();
  const std::size_t n_bg = cfg.n_background;
  const std::size_t n_fg = cfg.n_foreground;
  const std::size_t dim = StrokeParams::size * cfg.bundle_size();
  const std::size_t pop = cfg.population;
  const int elites = cfg.elite_count();

  // Distinct deterministic stream per timestep.
  std::mt19937_64 rng(cfg.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(state.step) + 1);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<double> mean(dim, 0.5);
  std::vector<double> sigma(dim, cfg.init_sigma);
  const CanvasScores before = model.scores(state.canvas);

  struct Candidate {
    std::vector<double> x;
    RewardBreakdown reward;
    bool admissible = false;
  };
  std::vector<Candidate> cands(pop);
  std::optional<Candidate> best;
  std::optional<Canvas> best_canvas;

  auto better = [](const Candidate& a, const Candidate& b) {
    if (a.admissible != b.admissible) return a.admissible;
    return a.reward.total > b.reward.total;
  };

  std::vector<Canvas> canvases(pop);
  for (int g = 0; g < cfg.generations; ++g) {
    for (auto& c : cands) {
      c.x.resize(dim);
      for (std::size_t d = 0; d < dim; ++d) c.x[d] = clamp01(mean[d] + sigma[d] * normal(rng));
    }
    detail::parallel_for(pop, cfg.threads, [&](std::size_t i) {
      auto& c = cands[i];
      const ActionBundle b = ActionBundle::from_flat(c.x, n_bg, n_fg);
      canvases[i] = apply_bundle(state.canvas, b, state.seg, composite);
      c.reward = model.reward(before, model.scores(canvases[i]));
      c.admissible = c.reward.total >= 0.0 && c.reward.background >= 0.0;
    });

    std::vector<std::size_t> order(pop);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return better(cands[a], cands[b]); });

    if (!best || better(cands[order[0]], *best)) {
      best = cands[order[0]];
      best_canvas = canvases[order[0]];
    }

    for (std::size_t d = 0; d < dim; ++d) {
      double m = 0.0;
      for (int e = 0; e < elites; ++e) m += cands[order[e]].x[d];
      m /= elites;
      double v = 0.0;
      for (int e = 0; e < elites; ++e) {
        const double diff = cands[order[e]].x[d] - m;
        v += diff * diff;
      }
      mean[d] = m;
      sigma[d] = std::max(cfg.min_sigma, std::sqrt(v / elites));
    }
  }

  if (!best->admissible) {
    return {ActionBundle::noop(n_bg, n_fg), RewardBreakdown{}, state.canvas, true};
  }
  return {ActionBundle::from_flat(best->x, n_bg, n_fg), best->reward, std::move(*best_canvas), false};
}

struct StrokeRecord {
  int step = 0;
  StrokeRole role = StrokeRole::background;
  std::size_t instance = 0;
  StrokeParams params;
  RewardBreakdown reward;  // of the bundle this stroke belongs to
};

struct StepRecord {
  int step = 0;
  std::size_t instance = 0;
  RewardBreakdown reward;
  CanvasScores scores;  // of the canvas after the step
  bool noop = false;
};

/// Replays a stroke log onto a constant canvas. Stroke `instance` selects the
/// mask from `masks`; single-instance logs use index 0.
inline Canvas replay(const std::vector<StrokeRecord>& strokes, const CanvasDims& dims,
                     const std::vector<SegMap>& masks, const CompositeConfig& composite = {},
                     double initial = 0.0) {
  Canvas canvas(dims, initial);
  for (const auto& s : strokes) {
    if (s.instance >= masks.size()) {
      throw std::invalid_argument("replay: stroke refers to instance " + std::to_string(s.instance) +
                                  " but only " + std::to_string(masks.size()) + " masks given");
    }
    apply_stroke_inplace(canvas, s.params, masks[s.instance], s.role, composite);
  }
  return canvas;
}

/// Inputs of one painting episode. Without instance masks the episode paints a
/// single foreground described by `seg` and `bbox`.
struct Scene {
  Canvas target;
  SegMap seg;
  GbpMap gbp;
  BBox bbox;
  std::vector<SegMap> instance_masks;
};

/// Drives one episode step by step. Used directly by the environment protocol
/// and by run_episode.
class Episode {
public:
  Episode(Scene scene, PainterConfig cfg) : scene_(std::move(scene)), cfg_(std::move(cfg)) {
    cfg_.optimizer.validate();
    cfg_.reward.weights.validate();
    scorer_ = make_scorer(cfg_.scorer);
    state_.canvas = Canvas(scene_.target.dims(), cfg_.initial_canvas);
    state_.target = scene_.target;
    state_.seg = scene_.seg;
    state_.gbp = scene_.gbp;
    state_.bbox = scene_.bbox;
    state_.instance_masks = scene_.instance_masks;
    state_.weights = cfg_.reward.weights;
    state_.validate();
  }

  const EpisodeState& state() const { return state_; }
  const PainterConfig& config() const { return cfg_; }
  const SimilarityScorer& scorer() const { return *scorer_; }
  bool done() const { return state_.step >= cfg_.optimizer.episode_length; }
  bool multi_instance() const { return !scene_.instance_masks.empty(); }

  /// Masks indexed as StrokeRecord::instance expects.
  std::vector<SegMap> replay_masks() const {
    return multi_instance() ? scene_.instance_masks : std::vector<SegMap>{scene_.seg};
  }

  /// Picks the instance for the coming bundle and makes its mask and box active.
  std::size_t prepare_step() {
    if (!multi_instance()) return 0;
    const std::size_t u = select_instance(state_.target, state_.canvas, scene_.instance_masks);
    state_.seg = scene_.instance_masks[u];
    try {
      state_.bbox = bbox_from_mask(state_.seg, 0.5, 0.05);
    } catch (const NoForegroundError&) {
      state_.bbox = BBox::full(state_.target.dims());
    }
    return u;
  }

  RewardModel reward_model() const {
    return RewardModel(*scorer_, state_.target, state_.seg, state_.gbp, state_.bbox, cfg_.reward);
  }

  /// Applies an externally chosen bundle and returns its reward.
  StepRecord step(const ActionBundle& bundle) {
    const std::size_t u = prepare_step();
    const RewardModel model = reward_model();
    Canvas next = apply_bundle(state_.canvas, bundle, state_.seg, cfg_.composite);
    const CanvasScores after = model.scores(next);
    const RewardBreakdown r = model.reward(model.scores(state_.canvas), after);
    return commit(bundle, r, std::move(next), u, after, false);
  }

  /// Searches for the next bundle with the cross-entropy optimizer and applies it.
  StepRecord step_optimized() {
    const std::size_t u = prepare_step();
    const RewardModel model = reward_model();
    BundleResult res = optimize_bundle(state_, model, cfg_.optimizer, cfg_.composite);
    const CanvasScores after = model.scores(res.canvas);
    return commit(res.bundle, res.reward, std::move(res.canvas), u, after, res.noop);
  }

  const std::vector<StrokeRecord>& strokes() const { return strokes_; }
  const std::vector<StepRecord>& trace() const { return trace_; }

private:
  StepRecord commit(const ActionBundle& bundle, const RewardBreakdown& r, Canvas next, std::size_t u,
                    const CanvasScores& after, bool noop) {
    for (const auto& a : bundle.background) strokes_.push_back({state_.step, StrokeRole::background, u, a, r});
    for (const auto& a : bundle.foreground) strokes_.push_back({state_.step, StrokeRole::foreground, u, a, r});
    StepRecord rec{state_.step, u, r, after, noop};
    trace_.push_back(rec);
    state_.canvas = std::move(next);
    ++state_.step;
    return rec;
  }

  Scene scene_;
  PainterConfig cfg_;
  std::unique_ptr<SimilarityScorer> scorer_;
  EpisodeState state_;
  std::vector<StrokeRecord> strokes_;
  std::vector<StepRecord> trace_;
};

struct EpisodeResult {
  Canvas initial;
  Canvas final_canvas;
  std::vector<StrokeRecord> strokes;
  std::vector<StepRecord> trace;
};

/// Paints `episode_length` optimized bundles. `on_step` (optional) observes
/// each committed step.
template <typename OnStep>
EpisodeResult run_episode(Scene scene, const PainterConfig& cfg, OnStep&& on_step) {
  Episode ep(std::move(scene), cfg);
  EpisodeResult out;
  out.initial = ep.state().canvas;
  while (!ep.done()) {
    const StepRecord rec = ep.step_optimized();
    on_step(rec, ep.state());
  }
  out.final_canvas = ep.state().canvas;
  out.strokes = ep.strokes();
  out.trace = ep.trace();
  return out;
}

inline EpisodeResult run_episode(Scene scene, const PainterConfig& cfg) {
  return run_episode(std::move(scene), cfg, [](const StepRecord&, const EpisodeState&) {});
}

}  // namespace sgpaint
