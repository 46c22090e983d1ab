#pragma once

#include <cstddef>

#include "objnav/planner.hpp"
#include "objnav/sim/scene.hpp"

namespace objnav::sim {

inline constexpr double kGroundTruthCell = 0.05;

/// Fine-grid geodesic distance to the success region of one target category.
/// The success region is every agent-free cell within `success_radius` of a target box.
class GroundTruthMap {
 public:
  GroundTruthMap(const Scene& scene, std::size_t target_category, double success_radius = 1.0,
                 double agent_radius = 0.18, double cell_len = kGroundTruthCell);

  /// Planar distance from (x, y) to the closest target box; infinity without targets.
  double distance_to_target(double x, double y) const;
  /// Geodesic distance to the success region boundary, 0 inside it, infinity when cut off.
  double geodesic_to_success(double x, double y) const;

  const ReachabilityGrid& grid() const { return grid_; }
  double success_radius() const { return success_radius_; }

 private:
  std::vector<Rect> targets_;
  double success_radius_;
  ReachabilityGrid grid_;
  DistanceField field_;
};

struct Judgement {
  bool success = false;
  /// Planar distance from the final position to the nearest target box.
  double target_distance = 0.0;
  /// Geodesic distance to the success boundary; 0 on success.
  double d_final = 0.0;
};

Judgement judge(const GroundTruthMap& truth, const Pose2& final_pose, bool stop_called);

}  // namespace objnav::sim
