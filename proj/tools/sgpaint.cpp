#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "sgpaint/check.hpp"
#include "sgpaint/env.hpp"
#include "sgpaint/io.hpp"
#include "sgpaint/painter.hpp"

namespace fs = std::filesystem;
using namespace sgpaint;

namespace {

// Stroke counts at which `paint` saves the intermediate canvas.
const std::set<std::size_t> kCheckpoints = {10, 20, 30, 50, 100, 200};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<SegMap> load_masks(const std::vector<std::string>& paths, const CanvasDims& dims) {
  std::vector<SegMap> out;
  for (const auto& p : paths) {
    SegMap m = load_gray(p);
    require_same_dims(dims, m.dims(), ("mask " + p).c_str());
    out.push_back(std::move(m));
  }
  return out;
}

struct PaintArgs {
  std::string target, mask, gbp, bbox, instances, config, out;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

int run_paint(const PaintArgs& a) {
  PainterConfig cfg = a.config.empty() ? PainterConfig{} : load_config(a.config);
  if (a.seed) cfg.optimizer.seed = *a.seed;

  SceneAnnotation ann;
  ann.target = a.target;
  if (!a.mask.empty()) ann.mask = a.mask;
  if (!a.gbp.empty()) ann.gbp = a.gbp;
  if (!a.bbox.empty()) ann.bbox = parse_bbox(a.bbox);
  ann.instances = split_list(a.instances);
  Scene scene = load_scene(ann);
  const std::vector<SegMap> masks =
      scene.instance_masks.empty() ? std::vector<SegMap>{scene.seg} : scene.instance_masks;
  const CanvasDims dims = scene.target.dims();
  const Canvas target = scene.target;

  fs::create_directories(a.out);
  const EpisodeResult res = run_episode(std::move(scene), cfg, [&](const StepRecord& rec, const EpisodeState& st) {
    if (a.quiet) return;
    std::cerr << "bundle " << std::setw(3) << rec.step + 1 << "/" << cfg.optimizer.episode_length
              << "  total " << std::setprecision(6) << rec.reward.total << "  mse "
              << mean_squared_error(st.canvas, target) << (rec.noop ? "  (no-op)" : "") << '\n';
  });

  save_png(res.final_canvas, (fs::path(a.out) / "final.png").string());
  {
    std::ofstream s(fs::path(a.out) / "strokes.jsonl");
    write_strokes(s, res.strokes);
    std::ofstream r(fs::path(a.out) / "rewards.jsonl");
    write_trace(r, res.trace);
  }

  Canvas canvas(dims, cfg.initial_canvas);
  for (std::size_t k = 0; k < res.strokes.size(); ++k) {
    const auto& s = res.strokes[k];
    apply_stroke_inplace(canvas, s.params, masks.at(s.instance), s.role, cfg.composite);
    if (kCheckpoints.count(k + 1)) {
      std::ostringstream name;
      name << "canvas_" << std::setw(3) << std::setfill('0') << k + 1 << ".png";
      save_png(canvas, (fs::path(a.out) / name.str()).string());
    }
  }
  if (!a.quiet) {
    std::cerr << "mse " << mean_squared_error(res.initial, target) << " -> "
              << mean_squared_error(res.final_canvas, target) << ", wrote " << a.out << '\n';
  }
  return 0;
}

struct RenderArgs {
  std::string strokes, dims, mask, instances, config, out;
};

int run_render(const RenderArgs& a) {
  const PainterConfig cfg = a.config.empty() ? PainterConfig{} : load_config(a.config);
  const CanvasDims dims = parse_dims(a.dims);
  std::vector<SegMap> masks = load_masks(split_list(a.instances), dims);
  if (masks.empty()) {
    masks.push_back(a.mask.empty() ? SegMap(dims, 1.0) : load_masks({a.mask}, dims).front());
  }
  const auto strokes = read_strokes_file(a.strokes);
  save_png(replay(strokes, dims, masks, cfg.composite, cfg.initial_canvas), a.out);
  return 0;
}

int run_check() {
  bool ok = true;
  for (const auto& r : run_self_checks()) {
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.value << " (limit " << r.limit << ")\n";
    ok = ok && r.pass;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semantic-guided stroke painting"};
  app.require_subcommand(1);

  PaintArgs paint;
  auto* p = app.add_subcommand("paint", "Paint a target image with brush strokes");
  p->add_option("--target", paint.target, "Target RGB PNG")->required()->check(CLI::ExistingFile);
  p->add_option("--mask", paint.mask, "Foreground mask (grayscale PNG)")->check(CLI::ExistingFile);
  p->add_option("--gbp", paint.gbp, "Guided-backprop importance map (grayscale PNG)")->check(CLI::ExistingFile);
  p->add_option("--bbox", paint.bbox, "Foreground box x,y,w,h in pixels");
  p->add_option("--instances", paint.instances, "Comma-separated per-instance mask PNGs");
  p->add_option("--config", paint.config, "key=value config file")->check(CLI::ExistingFile);
  p->add_option("--seed", paint.seed, "Random seed");
  p->add_option("--out", paint.out, "Output directory")->required();
  p->add_flag("--quiet", paint.quiet, "No progress output");

  RenderArgs render;
  auto* r = app.add_subcommand("render", "Replay a stroke log onto a blank canvas");
  r->add_option("--strokes", render.strokes, "strokes.jsonl")->required()->check(CLI::ExistingFile);
  r->add_option("--dims", render.dims, "Canvas size HxW")->required();
  r->add_option("--mask", render.mask, "Foreground mask used while painting")->check(CLI::ExistingFile);
  r->add_option("--instances", render.instances, "Comma-separated per-instance mask PNGs");
  r->add_option("--config", render.config, "key=value config file")->check(CLI::ExistingFile);
  r->add_option("--out", render.out, "Output PNG")->required();

  std::string env_config;
  auto* e = app.add_subcommand("env", "JSON-lines environment on stdin/stdout");
  e->add_option("--config", env_config, "key=value config file")->check(CLI::ExistingFile);

  app.add_subcommand("check", "Run rasterizer, smoothness and alignment self-checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*p) return run_paint(paint);
    if (*r) return run_render(render);
    if (*e) {
      EnvSession session(env_config.empty() ? PainterConfig{} : load_config(env_config));
      session.serve(std::cin, std::cout);
      return 0;
    }
    return run_check();
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
}
