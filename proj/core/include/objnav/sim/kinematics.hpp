#pragma once

#include <optional>
#include <random>

#include "objnav/geometry.hpp"
#include "objnav/planner.hpp"
#include "objnav/sim/scene.hpp"

namespace objnav::sim {

struct ActuationNoise {
  double sigma_translation = 0.01;
  double sigma_rotation_deg = 1.0;
};

struct AgentState {
  Pose2 pose;
  bool stopped = false;
  /// Distance actually travelled.
  double path_length = 0.0;
  int collisions = 0;
};

/// Planar distance between a segment and a rectangle, zero when they touch.
double segment_rect_distance(double ax, double ay, double bx, double by, const Rect& rect);

/// Discrete-action motion with disc collision against box footprints.
class Kinematics {
 public:
  Kinematics(const Scene& scene, MotionParams motion = {}, std::optional<ActuationNoise> noise = std::nullopt,
             std::uint64_t seed = 0);

  /// Forward moves are cancelled when the swept disc would touch a box. Stop latches.
  /// Acting on a stopped state returns it unchanged.
  AgentState apply(const AgentState& state, Action action);

  const MotionParams& motion() const { return motion_; }

 private:
  const Scene* scene_;
  MotionParams motion_;
  std::optional<ActuationNoise> noise_;
  std::mt19937_64 rng_;
};

/// Pose sensor reading: the true pose with independent Gaussian error per reading.
Pose2 noisy_pose_reading(const Pose2& truth, const ActuationNoise& noise, std::mt19937_64& rng);


}  // namespace objnav::sim
