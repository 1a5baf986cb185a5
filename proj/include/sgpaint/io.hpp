#pragma once

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgpaint/align.hpp"
#include "sgpaint/painter.hpp"
#include "sgpaint/png_io.hpp"

namespace sgpaint {

// ---------------------------------------------------------------------------
// Configuration: flat `key = value` text, '#' starts a comment.

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw std::invalid_argument("config " + key + ": not a number: " + v);
  return d;
}

inline long long parse_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long n = 0;
  try {
    n = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw std::invalid_argument("config " + key + ": not an integer: " + v);
  return n;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config " + key + ": not a boolean: " + v);
}

}  // namespace detail

/// Applies one configuration entry. Unknown keys are rejected.
inline void apply_config_value(PainterConfig& cfg, const std::string& key, const std::string& value) {
  using namespace detail;
  auto& o = cfg.optimizer;
  auto& r = cfg.composite.render;
  auto& w = cfg.reward.weights;
  if (key == "population") o.population = static_cast<int>(parse_int(key, value));
  else if (key == "elite_frac") o.elite_frac = parse_double(key, value);
  else if (key == "generations") o.generations = static_cast<int>(parse_int(key, value));
  else if (key == "init_sigma") o.init_sigma = parse_double(key, value);
  else if (key == "min_sigma") o.min_sigma = parse_double(key, value);
  else if (key == "seed") o.seed = static_cast<std::uint64_t>(parse_int(key, value));
  else if (key == "episode_length") o.episode_length = static_cast<int>(parse_int(key, value));
  else if (key == "n_background") o.n_background = static_cast<int>(parse_int(key, value));
  else if (key == "n_foreground") o.n_foreground = static_cast<int>(parse_int(key, value));
  else if (key == "threads") o.threads = static_cast<int>(parse_int(key, value));
  else if (key == "curve_samples") r.curve_samples = static_cast<int>(parse_int(key, value));
  else if (key == "max_radius_frac") r.max_radius_frac = parse_double(key, value);
  else if (key == "min_radius_px") r.min_radius_px = parse_double(key, value);
  else if (key == "aa_half_band_px") r.aa_half_band_px = parse_double(key, value);
  else if (key == "masked_attenuation") cfg.composite.masked_attenuation = parse_bool(key, value);
  else if (key == "eta") w.eta = parse_double(key, value);
  else if (key == "nu") w.nu = parse_double(key, value);
  else if (key == "kappa") w.kappa = parse_double(key, value);
  else if (key == "aligned") cfg.reward.aligned = parse_bool(key, value);
  else if (key == "zoom_height") cfg.reward.zoom_height = static_cast<int>(parse_int(key, value));
  else if (key == "zoom_width") cfg.reward.zoom_width = static_cast<int>(parse_int(key, value));
  else if (key == "initial_canvas") cfg.initial_canvas = parse_double(key, value);
  else if (key == "scorer") cfg.scorer = value;
  else if (key == "reward_mode") {
    if (value == "bilevel") cfg.reward.mode = RewardMode::bilevel;
    else if (value == "ablation") cfg.reward.mode = RewardMode::ablation;
    else throw std::invalid_argument("config reward_mode: expected bilevel or ablation, got " + value);
  } else if (key == "gbp_norm") {
    if (value == "frobenius") cfg.reward.gbp_norm = GbpNorm::frobenius;
    else if (value == "count") cfg.reward.gbp_norm = GbpNorm::count;
    else throw std::invalid_argument("config gbp_norm: expected frobenius or count, got " + value);
  } else {
    throw std::invalid_argument("unknown config key: " + key);
  }
}

inline void parse_config(std::istream& in, PainterConfig& cfg) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    }
    apply_config_value(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
}

inline PainterConfig load_config(const std::string& path, PainterConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  parse_config(in, base);
  return base;
}

// ---------------------------------------------------------------------------
// Scene ingestion.

struct SceneAnnotation {
  std::string target;
  std::optional<std::string> mask;
  std::optional<BBox> bbox;
  std::optional<std::string> gbp;
  std::vector<std::string> instances;
};

/// Parses "x,y,w,h" pixel integers.
inline BBox parse_bbox(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(static_cast<double>(detail::parse_int("bbox", detail::trim(item))));
  if (v.size() != 4) throw std::invalid_argument("bbox must be x,y,w,h");
  return {v[0], v[1], v[2], v[3]};
}

/// Rescales a map so its maximum is 1. Binary maps pass through unchanged.
inline GbpMap normalize_gbp(GbpMap g) {
  double mx = 0.0;
  for (double v : g.values()) mx = std::max(mx, v);
  if (mx <= 0.0) throw std::invalid_argument("GBP map is identically zero");
  for (double& v : g.values()) v /= mx;
  return g;
}

inline Scene load_scene(const SceneAnnotation& ann, std::ostream& warn = std::cerr) {
  Scene s;
  s.target = load_rgb(ann.target);
  const CanvasDims dims = s.target.dims();
  auto load_mask = [&](const std::string& path) {
    SegMap m = load_gray(path);
    require_same_dims(dims, m.dims(), ("mask " + path).c_str());
    return m;
  };
  if (ann.mask) {
    s.seg = load_mask(*ann.mask);
  } else {
    if (ann.instances.empty()) warn << "warning: no mask given, painting with a single level (S = 1)\n";
    s.seg = SegMap(dims, 1.0);
  }
  for (const auto& p : ann.instances) s.instance_masks.push_back(load_mask(p));
  if (ann.bbox) {
    s.bbox = *ann.bbox;
  } else if (ann.mask) {
    s.bbox = bbox_from_mask(s.seg, 0.5, 0.05);
  } else {
    s.bbox = BBox::full(dims);
  }
  s.bbox.validate(dims);
  if (ann.gbp) {
    GbpMap g = load_gray(*ann.gbp);
    require_same_dims(dims, g.dims(), "gbp map");
    s.gbp = normalize_gbp(std::move(g));
  } else {
    s.gbp = GbpMap(dims, 1.0);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Stroke logs and reward traces, one JSON object per line.

inline nlohmann::json to_json(const RewardBreakdown& r) {
  return {{"background", r.background}, {"foreground", r.foreground}, {"focus", r.focus}, {"total", r.total}};
}

inline RewardBreakdown reward_from_json(const nlohmann::json& j) {
  return {j.at("background").get<double>(), j.at("foreground").get<double>(), j.at("focus").get<double>(),
          j.at("total").get<double>()};
}

inline nlohmann::json to_json(const StrokeRecord& s) {
  return {{"step", s.step},
          {"role", to_string(s.role)},
          {"instance", s.instance},
          {"params", s.params.values()},
          {"reward", to_json(s.reward)}};
}

inline StrokeRecord stroke_from_json(const nlohmann::json& j) {
  StrokeRecord s;
  s.step = j.at("step").get<int>();
  const auto role = j.at("role").get<std::string>();
  if (role == "background") s.role = StrokeRole::background;
  else if (role == "foreground") s.role = StrokeRole::foreground;
  else throw std::invalid_argument("unknown stroke role: " + role);
  s.instance = j.value("instance", std::size_t{0});
  s.params = StrokeParams::from_span(j.at("params").get<std::vector<double>>());
  if (j.contains("reward")) s.reward = reward_from_json(j.at("reward"));
  return s;
}

inline nlohmann::json to_json(const StepRecord& r) {
  nlohmann::json j = to_json(r.reward);
  j["step"] = r.step;
  j["instance"] = r.instance;
  j["noop"] = r.noop;
  j["score"] = r.scores.global;
  j["gbp_distance"] = r.scores.gbp;
  return j;
}

inline void write_strokes(std::ostream& out, const std::vector<StrokeRecord>& strokes) {
  for (const auto& s : strokes) out << to_json(s).dump() << '\n';
}

inline std::vector<StrokeRecord> read_strokes(std::istream& in) {
  std::vector<StrokeRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    try {
      out.push_back(stroke_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw IoError("strokes line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

inline std::vector<StrokeRecord> read_strokes_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_strokes(in);
}

inline void write_trace(std::ostream& out, const std::vector<StepRecord>& trace) {
  for (const auto& r : trace) out << to_json(r).dump() << '\n';
}

/// Parses "HxW".
inline CanvasDims parse_dims(const std::string& text) {
  const auto x = text.find_first_of("xX");
  if (x == std::string::npos) throw std::invalid_argument("dims must be HxW");
  return CanvasDims(static_cast<int>(detail::parse_int("dims", text.substr(0, x))),
                    static_cast<int>(detail::parse_int("dims", text.substr(x + 1))));
}

}  // namespace sgpaint
