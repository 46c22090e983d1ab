#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "objnav/eval/metrics.hpp"
#include "objnav/navigator.hpp"
#include "objnav/sim/kinematics.hpp"
#include "objnav/sim/scene.hpp"
#include "objnav/sim/sensor.hpp"

namespace objnav::eval {

enum class NoiseMode { None, Gaussian, GaussianPose };

/// Accepts "none", "gaussian" and "gaussian+pose". Throws std::invalid_argument otherwise.
NoiseMode noise_mode_from_string(std::string_view s);
std::string_view to_string(NoiseMode m);

struct RunConfig {
  /// corner-learned-stub, corner-heuristic or round-robin.
  std::string policy = "corner-heuristic";
  /// fixed:<s> or dynamic-stub.
  std::string ident = "fixed:7";
  NoiseMode noise = NoiseMode::None;
  std::uint64_t seed = 0;
  /// Confusion diagonal of the synthetic predictor; absent means oracle semantics.
  std::optional<double> confusion_diag;
  double kappa = 60.0;
  double wrong_kappa_scale = 0.5;
  /// Weights file for corner-learned-stub.
  std::optional<std::filesystem::path> policy_table;
  std::size_t frame_points = 512;
  sim::CameraModel camera;
  NavConfig nav;
  bool trace = false;
  unsigned jobs = 1;
};

/// Builds the policy pair named by the config. Throws std::invalid_argument on unknown names.
PolicyInterface make_policies(const RunConfig& config);

struct EpisodeRun {
  EpisodeResult result;
  std::vector<StepRecord> trace;
  /// Seconds spent in insert_batch plus consistency updates, and the frames processed.
  double fusion_seconds = 0.0;
  std::size_t frames = 0;
};

using EpisodeInspector = std::function<void(const Navigator&, const sim::AgentState&)>;

/// Runs one episode to its stop or budget. `inspect` sees the final navigator and true state.
EpisodeRun run_episode(const sim::Scene& scene, const sim::EpisodeSpec& episode, const RunConfig& config,
                       const EpisodeInspector& inspect = {});

nlohmann::json trace_line(const StepRecord& rec);

struct SuiteReport {
  std::vector<EpisodeResult> results;
  /// Deterministic summary written to aggregate.json.
  nlohmann::json aggregate() const;
  double fusion_seconds = 0.0;
  std::size_t frames = 0;
  double wall_seconds = 0.0;
  double fusion_fps() const { return fusion_seconds > 0.0 ? static_cast<double>(frames) / fusion_seconds : 0.0; }
};

/// Summary statistics for a result set. Throws std::invalid_argument when empty.
nlohmann::json summarize(const std::vector<EpisodeResult>& results);

/// Loads scenes named by the episodes from `scenes_dir`/<scene_id>.json.
std::vector<sim::Scene> load_scenes_for(const std::filesystem::path& scenes_dir,
                                        const std::vector<sim::EpisodeSpec>& episodes);

/// Runs every episode, in parallel when config.jobs > 1; results keep the episode order.
SuiteReport run_episodes(const std::vector<sim::Scene>& scenes, const std::vector<sim::EpisodeSpec>& episodes,
                         const RunConfig& config, const std::optional<std::filesystem::path>& trace_dir = {});

/// File-level driver: writes episodes.jsonl, aggregate.json, timing.json and optional
/// traces/<episode_id>.jsonl under out_dir.
SuiteReport run_suite(const std::filesystem::path& scenes_dir, const std::filesystem::path& episodes_path,
                      const RunConfig& config, const std::filesystem::path& out_dir);

}  // namespace objnav::eval
