#include "objnav/eval/runner.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "objnav/policies.hpp"
#include "objnav/rng.hpp"
#include "objnav/sim/judge.hpp"

namespace objnav::eval {

using nlohmann::json;

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

json pose_json(const Pose2& p) { return {{"x", p.x}, {"y", p.y}, {"heading", p.heading}}; }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

NoiseMode noise_mode_from_string(std::string_view s) {
  if (s == "none") return NoiseMode::None;
  if (s == "gaussian") return NoiseMode::Gaussian;
  if (s == "gaussian+pose") return NoiseMode::GaussianPose;
  throw std::invalid_argument("unknown noise mode: " + std::string(s));
}

std::string_view to_string(NoiseMode m) {
  switch (m) {
    case NoiseMode::None: return "none";
    case NoiseMode::Gaussian: return "gaussian";
    case NoiseMode::GaussianPose: return "gaussian+pose";
  }
  return "none";
}

PolicyInterface make_policies(const RunConfig& config) {
  PolicyInterface p;
  if (config.policy == "corner-heuristic") {
    p.exploration = heuristic_exploration;
  } else if (config.policy == "round-robin") {
    p.exploration = make_round_robin_policy();
  } else if (config.policy == "corner-learned-stub") {
    const CornerScoreTable table =
        config.policy_table ? CornerScoreTable::from_json(read_file(*config.policy_table)) : CornerScoreTable{};
    p.exploration = make_table_exploration_policy(table);
  } else {
    throw std::invalid_argument("unknown policy: " + config.policy);
  }
  if (config.ident == "dynamic-stub") {
    p.identification = make_alternating_identification();
  } else if (config.ident.rfind("fixed:", 0) == 0) {
    const std::string digits = config.ident.substr(6);
    if (digits.size() != 1 || digits[0] < '0' || digits[0] > '9') {
      throw std::invalid_argument("fixed identification needs a digit 0-9: " + config.ident);
    }
    p.identification = make_fixed_identification(digits[0] - '0');
  } else {
    throw std::invalid_argument("unknown identification policy: " + config.ident);
  }
  return p;
}

EpisodeRun run_episode(const sim::Scene& scene, const sim::EpisodeSpec& episode, const RunConfig& config,
                       const EpisodeInspector& inspect) {
  if (episode.scene_id != scene.id) throw std::invalid_argument("run_episode: episode names another scene");
  if (!scene.has_category(episode.target_category)) {
    throw std::invalid_argument("run_episode: target category absent from scene " + scene.id);
  }
  const std::uint64_t seed = mix_seed(config.seed, fnv1a(episode.episode_id));
  const std::size_t m = scene.num_categories;
  const sim::SemanticNoiseModel semantics =
      config.confusion_diag ? sim::SemanticNoiseModel::diagonal(m, *config.confusion_diag, config.kappa, mix_seed(seed, 1))
                            : sim::SemanticNoiseModel::oracle(m, mix_seed(seed, 1));
  sim::SemanticNoiseModel noise = semantics;
  noise.wrong_kappa_scale = config.wrong_kappa_scale;
  std::optional<sim::DepthNoise> depth_noise;
  std::optional<sim::ActuationNoise> actuation;
  if (config.noise != NoiseMode::None) depth_noise = sim::DepthNoise{0.005, 0.01, mix_seed(seed, 2)};
  if (config.noise == NoiseMode::GaussianPose) actuation = sim::ActuationNoise{};

  const sim::GroundTruthMap truth(scene, episode.target_category, episode.success_radius, config.nav.motion.agent_radius);
  NavConfig nav_config = config.nav;
  nav_config.budget = episode.budget;
  nav_config.seed = mix_seed(seed, 4);
  Navigator nav(m, episode.target_category, make_policies(config), nav_config);
  sim::Kinematics kinematics(scene, nav_config.motion, actuation, mix_seed(seed, 3));

  EpisodeRun run;
  sim::AgentState state{episode.start};
  StopReason last_reason = StopReason::None;
  std::mt19937_64 pose_rng(mix_seed(seed, 6));
  auto read_pose = [&](const Pose2& truth) { return actuation ? sim::noisy_pose_reading(truth, *actuation, pose_rng) : truth; };
  Pose2 belief = read_pose(episode.start);
  for (int t = 0; t < episode.budget && !state.stopped; ++t) {
    const std::vector<Sample> frame = sim::observe(scene, state.pose, belief, config.camera, noise, depth_noise,
                                                   config.frame_points, mix_seed(seed, 5, static_cast<std::uint64_t>(t)));
    StepRecord rec = nav.step(frame, belief);
    run.fusion_seconds += rec.fusion_seconds;
    ++run.frames;
    const sim::AgentState next = kinematics.apply(state, rec.action);
    state = next;
    belief = read_pose(state.pose);
    last_reason = rec.stop_reason;
    if (config.trace) run.trace.push_back(std::move(rec));
  }

  const sim::Judgement verdict = sim::judge(truth, state.pose, state.stopped);
  EpisodeResult& r = run.result;
  r.episode_id = episode.episode_id;
  r.scene_id = episode.scene_id;
  r.target_category = episode.target_category;
  r.success = verdict.success;
  r.stop_called = state.stopped;
  r.stop_reason = std::string(to_string(last_reason));
  r.l_agent = state.path_length;
  r.d_init = truth.geodesic_to_success(episode.start.x, episode.start.y);
  r.l_oracle = r.d_init;
  r.d_final = verdict.d_final;
  r.steps = static_cast<int>(run.frames);
  r.collisions = state.collisions;
  r.peak_points = nav.state().store.size();
  r.reward = nav.state().cumulative.total();
  if (inspect) inspect(nav, state);
  return run;
}

json trace_line(const StepRecord& rec) {
  json j = {{"step", rec.step},
            {"pose", pose_json(rec.pose)},
            {"action", std::string(to_string(rec.action))},
            {"goal_kind", std::string(to_string(rec.goal_kind))},
            {"corner", std::string(to_string(rec.corner))},
            {"tau", rec.tau},
            {"candidate_count", rec.candidate_count},
            {"reward", json::array({rec.reward.success, rec.reward.slack, rec.reward.explore})},
            {"new_points", rec.new_points},
            {"merged_points", rec.merged_points},
            {"policy_invoked", rec.policy_invoked},
            {"replanned", rec.replanned},
            {"stop_reason", std::string(to_string(rec.stop_reason))}};
  j["identified_goal"] = rec.identified_goal
                             ? json::array({rec.identified_goal->x, rec.identified_goal->y, rec.identified_goal->z})
                             : json(nullptr);
  return j;
}

json summarize(const std::vector<EpisodeResult>& results) {
  double steps = 0.0;
  std::size_t peak = 0;
  for (const EpisodeResult& r : results) {
    steps += r.steps;
    peak = std::max(peak, r.peak_points);
  }
  return {{"episodes", results.size()},
          {"success", 100.0 * success_rate(results)},
          {"spl", spl(results)},
          {"soft_spl", soft_spl(results)},
          {"dts", dts(results)},
          {"mean_steps", steps / static_cast<double>(results.size())},
          {"peak_points", peak}};
}

json SuiteReport::aggregate() const { return summarize(results); }

std::vector<sim::Scene> load_scenes_for(const std::filesystem::path& scenes_dir,
                                        const std::vector<sim::EpisodeSpec>& episodes) {
  std::map<std::string, sim::Scene> loaded;
  for (const sim::EpisodeSpec& e : episodes) {
    if (loaded.count(e.scene_id)) continue;
    sim::Scene s = sim::load_scene(scenes_dir / (e.scene_id + ".json"));
    if (s.id != e.scene_id) throw sim::SceneError((scenes_dir / (e.scene_id + ".json")).string() + ": scene id mismatch");
    loaded.emplace(e.scene_id, std::move(s));
  }
  std::vector<sim::Scene> out;
  for (auto& [id, s] : loaded) out.push_back(std::move(s));
  return out;
}

SuiteReport run_episodes(const std::vector<sim::Scene>& scenes, const std::vector<sim::EpisodeSpec>& episodes,
                         const RunConfig& config, const std::optional<std::filesystem::path>& trace_dir) {
  std::map<std::string, const sim::Scene*> by_id;
  for (const sim::Scene& s : scenes) by_id[s.id] = &s;
  for (const sim::EpisodeSpec& e : episodes) {
    if (!by_id.count(e.scene_id)) throw std::invalid_argument("no scene loaded for episode " + e.episode_id);
  }
  const auto start = std::chrono::steady_clock::now();
  std::vector<EpisodeRun> runs(episodes.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < episodes.size(); i = next++) {
      try {
        runs[i] = run_episode(*by_id.at(episodes[i].scene_id), episodes[i], config);
        if (trace_dir && config.trace) {
          std::ofstream out(*trace_dir / (episodes[i].episode_id + ".jsonl"), std::ios::binary);
          for (const StepRecord& rec : runs[i].trace) out << trace_line(rec).dump() << '\n';
        }
        runs[i].trace.clear();
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(config.jobs, static_cast<unsigned>(episodes.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  SuiteReport report;
  for (EpisodeRun& run : runs) {
    report.results.push_back(std::move(run.result));
    report.fusion_seconds += run.fusion_seconds;
    report.frames += run.frames;
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

SuiteReport run_suite(const std::filesystem::path& scenes_dir, const std::filesystem::path& episodes_path,
                      const RunConfig& config, const std::filesystem::path& out_dir) {
  const std::vector<sim::EpisodeSpec> episodes = sim::load_episodes(episodes_path);
  if (episodes.empty()) throw sim::SceneError(episodes_path.string() + ": no episodes");
  const std::vector<sim::Scene> scenes = load_scenes_for(scenes_dir, episodes);
  std::filesystem::create_directories(out_dir);
  std::optional<std::filesystem::path> trace_dir;
  if (config.trace) {
    trace_dir = out_dir / "traces";
    std::filesystem::create_directories(*trace_dir);
  }
  SuiteReport report = run_episodes(scenes, episodes, config, trace_dir);

  std::ostringstream lines;
  for (const EpisodeResult& r : report.results) lines << to_json(r).dump() << '\n';
  write_text(out_dir / "episodes.jsonl", lines.str());

  json aggregate = report.aggregate();
  aggregate["config"] = {{"policy", config.policy},
                         {"ident", config.ident},
                         {"noise", std::string(to_string(config.noise))},
                         {"seed", config.seed},
                         {"confusion_diag", config.confusion_diag ? json(*config.confusion_diag) : json(nullptr)},
                         {"kappa", config.kappa}};
  write_text(out_dir / "aggregate.json", aggregate.dump(2) + "\n");
  const json timing = {{"fusion_fps", report.fusion_fps()},
                       {"fusion_seconds", report.fusion_seconds},
                       {"frames", report.frames},
                       {"wall_seconds", report.wall_seconds}};
  write_text(out_dir / "timing.json", timing.dump(2) + "\n");
  return report;
}

}  // namespace objnav::eval
