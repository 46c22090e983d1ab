#include "objnav/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace objnav {

namespace {

struct CorridorStats {
  std::size_t cells = 0;
  std::size_t unexplored_free = 0;
  std::size_t obstacles = 0;
  double target_mass = 0.0;
};

double segment_distance(double r, double c, double r0, double c0, double r1, double c1) {
  const double dr = r1 - r0;
  const double dc = c1 - c0;
  const double len2 = dr * dr + dc * dc;
  double t = len2 > 0.0 ? ((r - r0) * dr + (c - c0) * dc) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(r - (r0 + t * dr), c - (c0 + t * dc));
}

CorridorStats corridor_stats(const Grid2D& grid, CornerGoal goal, int half_width, std::size_t target) {
  const Cell from = grid.center_cell();
  const Cell to = corner_cell(grid, goal);
  CorridorStats s;
  const int r_lo = std::max(0, std::min(from.row, to.row) - half_width);
  const int r_hi = std::min(grid.size() - 1, std::max(from.row, to.row) + half_width);
  const int c_lo = std::max(0, std::min(from.col, to.col) - half_width);
  const int c_hi = std::min(grid.size() - 1, std::max(from.col, to.col) + half_width);
  const bool has_target = target < grid.num_categories();
  for (int r = r_lo; r <= r_hi; ++r) {
    for (int c = c_lo; c <= c_hi; ++c) {
      if (segment_distance(r, c, from.row, from.col, to.row, to.col) > half_width) continue;
      const Cell cell{r, c};
      ++s.cells;
      if (grid.obstacle(cell)) ++s.obstacles;
      else if (!grid.explored(cell)) ++s.unexplored_free;
      if (has_target) s.target_mass += grid.category(target, cell);
    }
  }
  return s;
}

}  // namespace

std::size_t corridor_unexplored_count(const Grid2D& grid, CornerGoal goal, int half_width) {
  return corridor_stats(grid, goal, half_width, grid.num_categories()).unexplored_free;
}

CornerGoal heuristic_exploration(const Observation& obs) {
  CornerGoal best = CornerGoal::TopLeft;
  std::size_t best_count = 0;
  bool first = true;
  for (CornerGoal g : kAllCorners) {
    const std::size_t n = corridor_unexplored_count(obs.grid, g);
    if (first || n > best_count) {
      best = g;
      best_count = n;
      first = false;
    }
  }
  return best;
}

ExplorationPolicy make_round_robin_policy(CornerGoal first) {
  auto next = std::make_shared<CornerGoal>(first);
  return [next](const Observation&) {
    const CornerGoal g = *next;
    *next = next_corner(g);
    return g;
  };
}

CornerScoreTable CornerScoreTable::from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("corner table: ") + e.what());
  }
  if (!j.contains("weights") || !j["weights"].is_array() || j["weights"].size() != 4) {
    throw std::runtime_error("corner table: expected \"weights\" array of 4 numbers");
  }
  CornerScoreTable t;
  for (std::size_t i = 0; i < 4; ++i) {
    if (!j["weights"][i].is_number()) throw std::runtime_error("corner table: non-numeric weight");
    t.weights[i] = j["weights"][i].get<double>();
  }
  return t;
}

ExplorationPolicy make_table_exploration_policy(CornerScoreTable table) {
  return [table](const Observation& obs) {
    CornerGoal best = CornerGoal::TopLeft;
    double best_score = -std::numeric_limits<double>::infinity();
    for (CornerGoal g : kAllCorners) {
      const CorridorStats s = corridor_stats(obs.grid, g, 3, obs.target_category);
      const double n = std::max<double>(1.0, static_cast<double>(s.cells));
      const double score = table.weights[0] * s.unexplored_free / n + table.weights[1] * s.obstacles / n +
                           table.weights[2] * s.target_mass / n + table.weights[3];
      if (score > best_score) {
        best = g;
        best_score = score;
      }
    }
    return best;
  };
}

IdentificationPolicy make_fixed_identification(int s) {
  const ThresholdAction action(s);
  return [action](const Observation&) { return action; };
}

IdentificationPolicy make_alternating_identification(int exploring_s, int confirming_s) {
  const ThresholdAction explore(exploring_s);
  const ThresholdAction confirm(confirming_s);
  return [explore, confirm](const Observation& obs) {
    if (obs.synthetic_points) return explore;
    const bool seen = std::any_of(obs.points.begin(), obs.points.end(), [&](const FusedPoint& p) {
      return p.sem.argmax() == obs.target_category;
    });
    return seen ? confirm : explore;
  };
}

}  // namespace objnav
