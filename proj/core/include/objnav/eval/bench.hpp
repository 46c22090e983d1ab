#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "objnav/point_store.hpp"
#include "objnav/sim/scene.hpp"
#include "objnav/sim/sensor.hpp"

namespace objnav::eval {

/// Frames captured along a seeded wandering walk through the scene: mostly forward,
/// turning at random and whenever a move is blocked.
std::vector<std::vector<Sample>> record_walk(const sim::Scene& scene, const Pose2& start, std::size_t frames,
                                             const sim::CameraModel& camera, const sim::SemanticNoiseModel& noise,
                                             std::size_t points_per_frame, std::uint64_t seed);

struct FusionCheckpoint {
  std::size_t frame = 0;
  std::size_t points = 0;
  std::size_t memory_bytes = 0;
};

struct FusionBenchResult {
  std::size_t frames = 0;
  double seconds = 0.0;
  std::vector<FusionCheckpoint> checkpoints;
  /// Coefficient of determination of memory against point count over the checkpoints.
  double memory_r2 = 0.0;

  double fps() const { return seconds > 0.0 ? static_cast<double>(frames) / seconds : 0.0; }
};

/// Times insert_batch plus the consistency update for each frame.
FusionBenchResult bench_fusion(const std::vector<std::vector<Sample>>& frames, std::size_t num_categories,
                               const StoreParams& params = {}, std::size_t checkpoint_every = 25);

/// R^2 of the least-squares line through (x, y); 1 for a perfect fit, 0 when y is constant.
double linear_r2(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace objnav::eval
