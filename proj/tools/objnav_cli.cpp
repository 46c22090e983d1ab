// Command-line front end: scene and episode generation, suite runs, reports and exports.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "objnav/eval/bench.hpp"
#include "objnav/eval/export.hpp"
#include "objnav/eval/runner.hpp"
#include "objnav/rng.hpp"
#include "objnav/sim/scene.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string scene_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "scene-%03zu", i);
  return buf;
}

std::vector<objnav::sim::Scene> scenes_in(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<objnav::sim::Scene> scenes;
  for (const fs::path& f : files) scenes.push_back(objnav::sim::load_scene(f));
  if (scenes.empty()) throw objnav::sim::SceneError(dir.string() + ": no scene files");
  return scenes;
}

std::vector<objnav::eval::EpisodeResult> read_results(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open");
  std::vector<objnav::eval::EpisodeResult> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(objnav::eval::result_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

struct RunOptions {
  std::string scenes;
  std::string episodes;
  std::string policy = "corner-heuristic";
  std::string ident = "fixed:7";
  std::string noise = "none";
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  bool trace = false;
  double confusion_diag = -1.0;
  double kappa = 60.0;
  unsigned jobs = 1;
  std::string policy_table;

  void add_to(CLI::App* cmd, bool with_io = true) {
    if (with_io) {
      cmd->add_option("--scenes", scenes, "Directory of <scene_id>.json files")->required();
      cmd->add_option("--episodes", episodes, "Episode JSON lines file")->required();
    }
    cmd->add_option("--policy", policy, "Exploration policy")
        ->check(CLI::IsMember({"corner-learned-stub", "corner-heuristic", "round-robin"}));
    cmd->add_option("--ident", ident, "Identification policy: fixed:<s> or dynamic-stub");
    cmd->add_option("--noise", noise, "Sensor noise")->check(CLI::IsMember({"none", "gaussian", "gaussian+pose"}));
    cmd->add_option("--seed", seed, "Run seed");
    cmd->add_option("--out-dir", out_dir, "Output directory");
    cmd->add_flag("--trace", trace, "Write per-step traces");
    cmd->add_option("--confusion-diag", confusion_diag, "Predictor confusion diagonal; omit for oracle semantics");
    cmd->add_option("--kappa", kappa, "Predictor concentration");
    cmd->add_option("--jobs", jobs, "Episodes run in parallel")->check(CLI::PositiveNumber);
    cmd->add_option("--policy-table", policy_table, "Weights JSON for corner-learned-stub");
  }

  objnav::eval::RunConfig config() const {
    objnav::eval::RunConfig c;
    c.policy = policy;
    c.ident = ident;
    c.noise = objnav::eval::noise_mode_from_string(noise);
    c.seed = seed;
    if (confusion_diag >= 0.0) c.confusion_diag = confusion_diag;
    c.kappa = kappa;
    if (!policy_table.empty()) c.policy_table = policy_table;
    c.trace = trace;
    c.jobs = jobs;
    return c;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Object-goal navigation with fused 3D point semantics"};
  app.require_subcommand(1);

  objnav::sim::SceneParams scene_params;
  std::size_t scene_count = 20;
  std::uint64_t scene_seed = 0;
  std::string scene_out = "scenes";
  auto* gen_scenes = app.add_subcommand("generate-scenes", "Write procedural scenes as JSON");
  gen_scenes->add_option("--count", scene_count, "Number of scenes");
  gen_scenes->add_option("--seed", scene_seed, "Base seed");
  gen_scenes->add_option("--out-dir", scene_out, "Destination directory");
  gen_scenes->add_option("--rooms", scene_params.rooms, "Rooms per scene")->check(CLI::Range(1, 8));
  gen_scenes->add_option("--categories", scene_params.num_categories, "Semantic categories M")->check(CLI::Range(3, 16));
  gen_scenes->add_option("--width", scene_params.width, "Floor width (m)");
  gen_scenes->add_option("--depth", scene_params.depth, "Floor depth (m)");

  std::string ep_scenes;
  std::string ep_out = "episodes.jsonl";
  std::size_t per_scene = 1;
  std::uint64_t ep_seed = 0;
  auto* gen_eps = app.add_subcommand("generate-episodes", "Write episodes for every scene in a directory");
  gen_eps->add_option("--scenes", ep_scenes, "Directory of scene files")->required();
  gen_eps->add_option("--episodes", ep_out, "Output JSON lines file");
  gen_eps->add_option("--per-scene", per_scene, "Episodes per scene");
  gen_eps->add_option("--seed", ep_seed, "Base seed");

  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "Run an episode suite");
  run_opts.add_to(run);

  std::string report_in;
  auto* report = app.add_subcommand("report", "Summarize an episodes.jsonl file or run directory");
  report->add_option("input", report_in, "episodes.jsonl or a run output directory")->required();

  RunOptions export_opts;
  std::size_t export_index = 0;
  auto* export_cmd = app.add_subcommand("export-ply", "Run one episode and export its point map and 2D grids");
  export_opts.add_to(export_cmd);
  export_cmd->add_option("--episode-index", export_index, "Zero-based line in the episodes file");

  std::size_t bench_frames = 500;
  std::size_t bench_points = 512;
  std::uint64_t bench_seed = 0;
  auto* bench = app.add_subcommand("bench-fusion", "Time point fusion on a recorded walk");
  bench->add_option("--frames", bench_frames, "Frames to fuse");
  bench->add_option("--points", bench_points, "Points per frame");
  bench->add_option("--seed", bench_seed, "Scene and walk seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen_scenes) {
      fs::create_directories(scene_out);
      for (std::size_t i = 0; i < scene_count; ++i) {
        const std::string id = scene_name(i);
        const auto scene = objnav::sim::generate_scene(scene_params, objnav::mix_seed(scene_seed, i), id);
        objnav::sim::save_scene(scene, fs::path(scene_out) / (id + ".json"));
      }
      std::cout << "wrote " << scene_count << " scenes to " << scene_out << '\n';
    } else if (*gen_eps) {
      std::vector<objnav::sim::EpisodeSpec> all;
      std::size_t i = 0;
      for (const auto& scene : scenes_in(ep_scenes)) {
        auto eps = objnav::sim::generate_episodes(scene, per_scene, objnav::mix_seed(ep_seed, i++));
        all.insert(all.end(), eps.begin(), eps.end());
      }
      objnav::sim::save_episodes(all, ep_out);
      std::cout << "wrote " << all.size() << " episodes to " << ep_out << '\n';
    } else if (*run) {
      const auto result = objnav::eval::run_suite(run_opts.scenes, run_opts.episodes, run_opts.config(), run_opts.out_dir);
      json summary = result.aggregate();
      summary["fusion_fps"] = result.fusion_fps();
      std::cout << summary.dump(2) << '\n';
    } else if (*report) {
      fs::path in = report_in;
      if (fs::is_directory(in)) in /= "episodes.jsonl";
      const auto results = read_results(in);
      if (results.empty()) throw std::runtime_error(in.string() + ": no episode results");
      json summary = objnav::eval::summarize(results);
      const fs::path timing = in.parent_path() / "timing.json";
      if (fs::exists(timing)) {
        std::ifstream t(timing);
        summary["timing"] = json::parse(t);
      }
      std::cout << summary.dump(2) << '\n';
    } else if (*export_cmd) {
      const auto episodes = objnav::sim::load_episodes(export_opts.episodes);
      if (export_index >= episodes.size()) throw std::runtime_error("--episode-index beyond the episodes file");
      const auto& episode = episodes[export_index];
      const auto scene = objnav::sim::load_scene(fs::path(export_opts.scenes) / (episode.scene_id + ".json"));
      const fs::path out = export_opts.out_dir;
      fs::create_directories(out);
      const auto result = objnav::eval::run_episode(
          scene, episode, export_opts.config(), [&](const objnav::Navigator& nav, const objnav::sim::AgentState& state) {
            objnav::eval::write_ply(nav.state().store, out / "points.ply");
            const objnav::Grid2D grid = nav.project_map(state.pose);
            objnav::eval::write_occupancy_pgm(grid, out / "occupancy.pgm");
            objnav::eval::write_category_pgm(grid, episode.target_category, out / "target.pgm");
          });
      std::cout << objnav::eval::to_json(result.result).dump(2) << '\n';
    } else if (*bench) {
      objnav::sim::SceneParams params;
      const auto scene = objnav::sim::generate_scene(params, bench_seed, "bench");
      const auto episodes = objnav::sim::generate_episodes(scene, 1, bench_seed);
      const auto noise = objnav::sim::SemanticNoiseModel::diagonal(params.num_categories, 0.8, 60.0, bench_seed);
      const auto frames = objnav::eval::record_walk(scene, episodes.front().start, bench_frames, {}, noise,
                                                    bench_points, bench_seed);
      const auto r = objnav::eval::bench_fusion(frames, params.num_categories);
      json checkpoints = json::array();
      for (const auto& c : r.checkpoints) {
        checkpoints.push_back({{"frame", c.frame}, {"points", c.points}, {"memory_bytes", c.memory_bytes}});
      }
      std::cout << json{{"frames", r.frames}, {"seconds", r.seconds}, {"fps", r.fps()}, {"memory_r2", r.memory_r2},
                        {"checkpoints", checkpoints}}
                       .dump(2)
                << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
