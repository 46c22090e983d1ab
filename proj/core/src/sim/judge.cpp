#include "objnav/sim/judge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "objnav/rng.hpp"

namespace objnav::sim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

DistanceField solve_field(const ReachabilityGrid& grid, const std::vector<Rect>& targets, double radius) {
  BinaryGrid traversable(grid.rows(), grid.cols(), 0);
  std::vector<Cell> sources;
  for (int r = 0; r < grid.rows(); ++r) {
    for (int c = 0; c < grid.cols(); ++c) {
      if (!grid.free(r, c)) continue;
      traversable.set({r, c}, true);
      const double x = grid.cell_x(c);
      const double y = grid.cell_y(r);
      const bool inside = std::any_of(targets.begin(), targets.end(),
                                      [&](const Rect& t) { return t.distance(x, y) <= radius; });
      if (inside) sources.push_back({r, c});
    }
  }
  if (sources.empty()) {
    // No reachable success cell: every distance is infinite.
    return DistanceField(grid.rows(), grid.cols(), grid.cell_len(), {0, 0});
  }
  return fmm_field_multi(traversable, sources, grid.cell_len());
}

std::vector<Rect> target_footprints(const Scene& scene, std::size_t category) {
  std::vector<Rect> out;
  for (const Box& b : scene.boxes) {
    if (b.category == category) out.push_back(b.footprint());
  }
  return out;
}

}  // namespace

GroundTruthMap::GroundTruthMap(const Scene& scene, std::size_t target_category, double success_radius,
                               double agent_radius, double cell_len)
    : targets_(target_footprints(scene, target_category)),
      success_radius_(success_radius),
      grid_(scene, cell_len, agent_radius),
      field_(solve_field(grid_, targets_, success_radius)) {}

double GroundTruthMap::distance_to_target(double x, double y) const {
  double best = kInf;
  for (const Rect& t : targets_) best = std::min(best, t.distance(x, y));
  return best;
}

double GroundTruthMap::geodesic_to_success(double x, double y) const {
  if (distance_to_target(x, y) <= success_radius_) return 0.0;
  const auto cell = grid_.cell_of(x, y);
  if (!cell) return kInf;
  // Continue from the nearby solved cells with a straight final leg.
  double best = kInf;
  constexpr int kReach = 2;
  for (int dr = -kReach; dr <= kReach; ++dr) {
    for (int dc = -kReach; dc <= kReach; ++dc) {
      const Cell c{cell->first + dr, cell->second + dc};
      if (!field_.in_bounds(c) || !field_.finite(c)) continue;
      best = std::min(best, field_.at(c) + std::hypot(x - grid_.cell_x(c.col), y - grid_.cell_y(c.row)));
    }
  }
  return best;
}

Judgement judge(const GroundTruthMap& truth, const Pose2& final_pose, bool stop_called) {
  Judgement j;
  j.target_distance = truth.distance_to_target(final_pose.x, final_pose.y);
  j.success = stop_called && j.target_distance <= truth.success_radius();
  j.d_final = j.success ? 0.0 : std::max(0.0, truth.geodesic_to_success(final_pose.x, final_pose.y));
  return j;
}

std::vector<EpisodeSpec> generate_episodes(const Scene& scene, std::size_t count, std::uint64_t seed,
                                           double min_geodesic) {
  const std::vector<std::size_t> categories = scene.object_categories();
  if (categories.empty()) throw SceneError("generate_episodes: scene " + scene.id + " has no objects");
  std::vector<std::optional<GroundTruthMap>> truths(scene.num_categories);
  std::mt19937_64 rng(mix_seed(seed, 0xE915));
  std::vector<EpisodeSpec> out;
  for (std::size_t i = 0; i < count; ++i) {
    bool placed = false;
    for (int tries = 0; tries < 1000 && !placed; ++tries) {
      const std::size_t target = categories[std::uniform_int_distribution<std::size_t>(0, categories.size() - 1)(rng)];
      if (!truths[target]) truths[target].emplace(scene, target);
      const GroundTruthMap& truth = *truths[target];
      const ReachabilityGrid& grid = truth.grid();
      const int r = std::uniform_int_distribution<int>(0, grid.rows() - 1)(rng);
      const int c = std::uniform_int_distribution<int>(0, grid.cols() - 1)(rng);
      const double heading = std::uniform_int_distribution<int>(-5, 6)(rng) * deg_to_rad(30.0);
      if (grid.component(r, c) != grid.main_component()) continue;
      const double x = grid.cell_x(c);
      const double y = grid.cell_y(r);
      if (!scene.spawn.contains(x, y)) continue;
      const double d = truth.geodesic_to_success(x, y);
      if (!(d >= min_geodesic) || !std::isfinite(d)) continue;
      EpisodeSpec e;
      e.episode_id = scene.id + "-" + std::to_string(i);
      e.scene_id = scene.id;
      e.start = {x, y, wrap_angle(heading)};
      e.target_category = target;
      out.push_back(e);
      placed = true;
    }
    if (!placed) throw SceneError("generate_episodes: no valid start in scene " + scene.id);
  }
  return out;
}

}  // namespace objnav::sim
