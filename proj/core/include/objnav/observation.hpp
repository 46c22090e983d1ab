#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "objnav/point_store.hpp"
#include "objnav/projection.hpp"
#include "objnav/semantic.hpp"

namespace objnav {

/// Channel value standing in for an absent consistency score.
inline constexpr float kAbsentConsistency = -1.0f;

/// Policy input assembled once per policy cycle.
struct Observation {
  std::vector<FusedPoint> points;
  bool synthetic_points = false;
  Grid2D grid;
  std::size_t target_category = 0;
  int step = 0;
  Pose2 pose;

  /// Row-major N x (3 + M + 1) matrix: position, distribution, consistency.
  std::vector<float> encode_points() const;
};

using ExplorationPolicy = std::function<CornerGoal(const Observation&)>;
using IdentificationPolicy = std::function<ThresholdAction(const Observation&)>;

/// The two decision functions driving the navigator. Both must always return a valid action.
struct PolicyInterface {
  ExplorationPolicy exploration;
  IdentificationPolicy identification;
};

}  // namespace objnav
