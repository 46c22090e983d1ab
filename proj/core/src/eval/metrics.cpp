#include "objnav/eval/metrics.hpp"

#include <algorithm>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace objnav::eval {

namespace {

void require_nonempty(std::span<const EpisodeResult> results, const char* what) {
  if (results.empty()) throw std::invalid_argument(std::string(what) + ": no episodes");
}

double efficiency(const EpisodeResult& r) {
  const double denom = std::max(r.l_agent, r.l_oracle);
  return denom > 0.0 ? r.l_oracle / denom : 0.0;
}

}  // namespace

nlohmann::json to_json(const EpisodeResult& r) {
  return {{"episode_id", r.episode_id}, {"scene_id", r.scene_id},       {"target_category", r.target_category},
          {"success", r.success},       {"stop_called", r.stop_called}, {"stop_reason", r.stop_reason},
          {"l_agent", r.l_agent},       {"l_oracle", r.l_oracle},       {"d_init", r.d_init},
          {"d_final", r.d_final},       {"steps", r.steps},             {"collisions", r.collisions},
          {"peak_points", r.peak_points}, {"reward", r.reward}};
}

EpisodeResult result_from_json(const nlohmann::json& doc) {
  try {
    EpisodeResult r;
    r.episode_id = doc.at("episode_id").get<std::string>();
    r.scene_id = doc.at("scene_id").get<std::string>();
    r.target_category = doc.at("target_category").get<std::size_t>();
    r.success = doc.at("success").get<bool>();
    r.stop_called = doc.value("stop_called", false);
    r.stop_reason = doc.value("stop_reason", "");
    r.l_agent = doc.at("l_agent").get<double>();
    r.l_oracle = doc.at("l_oracle").get<double>();
    r.d_init = doc.at("d_init").get<double>();
    r.d_final = doc.at("d_final").get<double>();
    r.steps = doc.at("steps").get<int>();
    r.collisions = doc.value("collisions", 0);
    r.peak_points = doc.value("peak_points", std::size_t{0});
    r.reward = doc.value("reward", 0.0);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed episode result: ") + e.what());
  }
}

double spl(std::span<const EpisodeResult> results) {
  require_nonempty(results, "spl");
  double sum = 0.0;
  for (const EpisodeResult& r : results) sum += r.success ? efficiency(r) : 0.0;
  return sum / static_cast<double>(results.size());
}

double soft_spl(std::span<const EpisodeResult> results) {
  require_nonempty(results, "soft_spl");
  double sum = 0.0;
  for (const EpisodeResult& r : results) {
    if (!(r.d_init > 0.0)) throw std::invalid_argument("soft_spl: d_init must be positive");
    const double progress = std::clamp(1.0 - r.d_final / r.d_init, 0.0, 1.0);
    sum += progress * efficiency(r);
  }
  return sum / static_cast<double>(results.size());
}

double dts(std::span<const EpisodeResult> results) {
  require_nonempty(results, "dts");
  double sum = 0.0;
  for (const EpisodeResult& r : results) sum += std::max(0.0, r.d_final);
  return sum / static_cast<double>(results.size());
}

double success_rate(std::span<const EpisodeResult> results) {
  require_nonempty(results, "success_rate");
  const auto n = std::count_if(results.begin(), results.end(), [](const EpisodeResult& r) { return r.success; });
  return static_cast<double>(n) / static_cast<double>(results.size());
}

}  // namespace objnav::eval
