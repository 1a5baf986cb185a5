#pragma once

#include <cmath>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "sgpaint/io.hpp"
#include "sgpaint/painter.hpp"

namespace sgpaint {

/// Line-oriented environment for external agents. Every request line yields
/// exactly one response line.
///
///   {"cmd":"reset","target":P,"mask":P,"gbp":P,"bbox":[x,y,w,h],"instances":[P...],
///    "config":{key:value...}}            -> {"ok":true,"dims":[H,W],...}
///   {"cmd":"step","bundle":[13K reals]}  -> {"ok":true,"reward":{...},"step":t,"done":b}
///   {"cmd":"observe"}                    -> {"ok":true,"step":t,"png":base64}
///
/// Failures answer {"ok":false,"error":message} and leave the episode as it was.
class EnvSession {
public:
  explicit EnvSession(PainterConfig base = {}) : base_(std::move(base)) {}

  std::string handle_line(const std::string& line) {
    nlohmann::json resp;
    try {
      const auto req = nlohmann::json::parse(line);
      if (!req.is_object() || !req.contains("cmd") || !req["cmd"].is_string()) {
        throw std::invalid_argument("request must be an object with a string \"cmd\"");
      }
      const auto cmd = req["cmd"].get<std::string>();
      if (cmd == "reset") resp = reset(req);
      else if (cmd == "step") resp = step(req);
      else if (cmd == "observe") resp = observe();
      else throw std::invalid_argument("unknown cmd: " + cmd);
    } catch (const std::exception& e) {
      resp = {{"ok", false}, {"error", e.what()}};
    }
    return resp.dump();
  }

  void serve(std::istream& in, std::ostream& out) {
    std::string line;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      out << handle_line(line) << '\n';
      out.flush();
    }
  }

  const Episode* episode() const { return episode_.get(); }

private:
  nlohmann::json reset(const nlohmann::json& req) {
    SceneAnnotation ann;
    ann.target = req.at("target").get<std::string>();
    if (req.contains("mask")) ann.mask = req["mask"].get<std::string>();
    if (req.contains("gbp")) ann.gbp = req["gbp"].get<std::string>();
    if (req.contains("bbox")) {
      const auto v = req["bbox"].get<std::vector<double>>();
      if (v.size() != 4) throw std::invalid_argument("bbox must have 4 entries");
      ann.bbox = BBox{v[0], v[1], v[2], v[3]};
    }
    if (req.contains("instances")) ann.instances = req["instances"].get<std::vector<std::string>>();

    PainterConfig cfg = base_;
    if (req.contains("config")) {
      for (const auto& [key, value] : req["config"].items()) {
        apply_config_value(cfg, key, value.is_string() ? value.get<std::string>() : value.dump());
      }
    }
    std::ostringstream warnings;
    auto ep = std::make_unique<Episode>(load_scene(ann, warnings), cfg);
    episode_ = std::move(ep);
    const auto& st = episode_->state();
    return {{"ok", true},
            {"dims", {st.target.height(), st.target.width()}},
            {"n_background", cfg.optimizer.n_background},
            {"n_foreground", cfg.optimizer.n_foreground},
            {"bundle_size", cfg.optimizer.bundle_size() * StrokeParams::size},
            {"episode_length", cfg.optimizer.episode_length}};
  }

  nlohmann::json step(const nlohmann::json& req) {
    if (!episode_) throw std::invalid_argument("step before reset");
    if (episode_->done()) throw std::invalid_argument("episode is done; send reset");
    const auto flat = req.at("bundle").get<std::vector<double>>();
    for (double v : flat) {
      if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("bundle values must lie in [0,1]");
    }
    const auto& o = episode_->config().optimizer;
    const ActionBundle bundle = ActionBundle::from_flat(flat, o.n_background, o.n_foreground);
    const StepRecord rec = episode_->step(bundle);
    return {{"ok", true},
            {"reward", to_json(rec.reward)},
            {"step", episode_->state().step},
            {"done", episode_->done()}};
  }

  nlohmann::json observe() const {
    if (!episode_) throw std::invalid_argument("observe before reset");
    return {{"ok", true},
            {"step", episode_->state().step},
            {"png", base64_encode(encode_png(to_raw(episode_->state().canvas)))}};
  }

  PainterConfig base_;
  std::unique_ptr<Episode> episode_;
};

}  // namespace sgpaint
