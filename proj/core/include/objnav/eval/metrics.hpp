#pragma once

#include <cstddef>
#include <span>
#include <string>

#include <nlohmann/json_fwd.hpp>

namespace objnav::eval {

struct EpisodeResult {
  std::string episode_id;
  std::string scene_id;
  std::size_t target_category = 0;
  bool success = false;
  bool stop_called = false;
  std::string stop_reason;
  /// Distance the agent actually travelled (m).
  double l_agent = 0.0;
  /// Ground-truth geodesic from the start to the nearest success boundary (m).
  double l_oracle = 0.0;
  double d_init = 0.0;
  /// Geodesic from the final position to the success boundary (m), 0 on success.
  double d_final = 0.0;
  int steps = 0;
  int collisions = 0;
  std::size_t peak_points = 0;
  double reward = 0.0;
};

nlohmann::json to_json(const EpisodeResult& r);
/// Throws std::runtime_error on missing fields.
EpisodeResult result_from_json(const nlohmann::json& doc);

/// Mean of S_i * l_oracle / max(l_agent, l_oracle). Throws std::invalid_argument when empty.
double spl(std::span<const EpisodeResult> results);
/// Mean of clamp(1 - d_final / d_init, 0, 1) * l_oracle / max(l_agent, l_oracle).
/// Throws std::invalid_argument when empty or when some d_init <= 0.
double soft_spl(std::span<const EpisodeResult> results);
/// Mean of max(0, d_final).
double dts(std::span<const EpisodeResult> results);
/// Fraction of successful episodes in [0, 1].
double success_rate(std::span<const EpisodeResult> results);

}  // namespace objnav::eval
