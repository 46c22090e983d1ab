#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

#include "objnav/observation.hpp"

namespace objnav {

/// Unexplored, non-obstacle cells within half_width cells of the segment from the grid
/// centre to the corner cell.
std::size_t corridor_unexplored_count(const Grid2D& grid, CornerGoal goal, int half_width = 3);

/// Corner whose corridor holds the most unexplored traversable cells; ties go to the
/// earlier corner in TL, TR, BL, BR order.
CornerGoal heuristic_exploration(const Observation& obs);

/// Cycles TL, TR, BL, BR starting from `first`, one corner per call.
ExplorationPolicy make_round_robin_policy(CornerGoal first = CornerGoal::TopLeft);

/// Linear scoring table standing in for a trained exploration network. Each corner is
/// scored as w . [corridor unexplored fraction, corridor obstacle fraction, corridor
/// target-channel mass fraction, 1] and the best score wins.
struct CornerScoreTable {
  std::array<double, 4> weights{1.0, -0.5, 2.0, 0.0};

  /// Reads {"weights": [w0, w1, w2, w3]}. Throws std::runtime_error on malformed input.
  static CornerScoreTable from_json(std::string_view text);
};

ExplorationPolicy make_table_exploration_policy(CornerScoreTable table = {});

/// Constant threshold action. s = 7 (tau = 0.85) is the default fixed baseline.
IdentificationPolicy make_fixed_identification(int s = 7);

/// Low threshold while no observed point is labelled with the target, high otherwise.
IdentificationPolicy make_alternating_identification(int exploring_s = 3, int confirming_s = 7);

}  // namespace objnav
