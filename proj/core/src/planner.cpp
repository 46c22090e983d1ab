#include "objnav/planner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <queue>

namespace objnav {

namespace {

constexpr std::array<std::pair<int, int>, 8> kRingSteps = {
    {{-1, 0}, {1, 0}, {0, -1}, {0, 1}, {-1, -1}, {-1, 1}, {1, -1}, {1, 1}}};

// Every cell touched by the segment between two cell centres is traversable.
bool line_of_sight(const BinaryGrid& traversable, Cell a, Cell b) {
  const double dr = b.row - a.row;
  const double dc = b.col - a.col;
  const int samples = static_cast<int>(std::ceil(std::max(std::abs(dr), std::abs(dc)) * 16.0));
  for (int i = 0; i <= samples; ++i) {
    const double t = samples == 0 ? 0.0 : static_cast<double>(i) / samples;
    const Cell c{static_cast<int>(std::floor(a.row + 0.5 + t * dr)), static_cast<int>(std::floor(a.col + 0.5 + t * dc))};
    if (!traversable.in_bounds(c) || !traversable.at(c)) return false;
  }
  return true;
}

}  // namespace

BinaryGrid dilate(const BinaryGrid& mask, int radius_cells) {
  if (radius_cells <= 0) return mask;
  BinaryGrid out(mask.rows, mask.cols, 0);
  const double reach = (radius_cells + 0.5) * (radius_cells + 0.5);
  std::vector<std::pair<int, int>> offsets;
  for (int dr = -radius_cells; dr <= radius_cells; ++dr) {
    for (int dc = -radius_cells; dc <= radius_cells; ++dc) {
      if (dr * dr + dc * dc <= reach) offsets.emplace_back(dr, dc);
    }
  }
  for (int r = 0; r < mask.rows; ++r) {
    for (int c = 0; c < mask.cols; ++c) {
      if (!mask.at({r, c})) continue;
      for (auto [dr, dc] : offsets) {
        const Cell n{r + dr, c + dc};
        if (out.in_bounds(n)) out.set(n, true);
      }
    }
  }
  return out;
}

int dilation_cells(double agent_radius, double cell_len) {
  return static_cast<int>(std::ceil(agent_radius / cell_len - 1e-12));
}

DistanceField::DistanceField(int rows, int cols, double cell_len, Cell goal)
    : rows_(rows),
      cols_(cols),
      cell_len_(cell_len),
      goal_(goal),
      values_(static_cast<std::size_t>(rows) * cols, kUnreachable),
      seeded_(static_cast<std::size_t>(rows) * cols, 0) {}

double eikonal_update(double horizontal, double vertical) {
  const double lo = std::min(horizontal, vertical);
  const double hi = std::max(horizontal, vertical);
  if (!(hi < kUnreachable) || hi - lo >= 1.0) return lo + 1.0;
  const double diff = hi - lo;
  return 0.5 * (lo + hi + std::sqrt(2.0 - diff * diff));
}

namespace {

// Same update on the 45-degree rotated stencil, whose neighbours sit sqrt(2) cells away.
double diagonal_eikonal_update(double first, double second) {
  const double lo = std::min(first, second);
  const double hi = std::max(first, second);
  if (!(lo < kUnreachable)) return kUnreachable;
  if (!(hi < kUnreachable) || hi - lo >= std::sqrt(2.0)) return lo + std::sqrt(2.0);
  const double diff = hi - lo;
  return 0.5 * (lo + hi + std::sqrt(4.0 - diff * diff));
}

}  // namespace

DistanceField fmm_solve(const BinaryGrid& traversable, std::span<const Cell> sources, double cell_len,
                        double seed_radius, std::optional<Cell> early_exit) {
  if (sources.empty()) throw std::invalid_argument("fmm: no source cells");
  DistanceField field(traversable.rows, traversable.cols, cell_len, sources.front());
  const std::size_t n = field.values_.size();
  std::vector<double> t(n, kUnreachable);
  std::vector<std::uint8_t> known(n, 0);

  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;

  for (Cell s : sources) {
    if (!traversable.in_bounds(s) || !traversable.at(s)) throw std::invalid_argument("fmm: source not traversable");
    const std::size_t i = traversable.index(s);
    t[i] = 0.0;
    field.seeded_[i] = 1;
    heap.emplace(0.0, i);
  }
  if (seed_radius > 0.0 && sources.size() == 1) {
    const Cell g = sources.front();
    const int reach = static_cast<int>(std::floor(seed_radius));
    for (int dr = -reach; dr <= reach; ++dr) {
      for (int dc = -reach; dc <= reach; ++dc) {
        const Cell c{g.row + dr, g.col + dc};
        const double d = std::hypot(dr, dc);
        if (d == 0.0 || d > seed_radius || !traversable.in_bounds(c) || !traversable.at(c)) continue;
        if (!line_of_sight(traversable, g, c)) continue;
        const std::size_t i = traversable.index(c);
        t[i] = d;
        field.seeded_[i] = 1;
        heap.emplace(d, i);
      }
    }
  }

  const int cols = traversable.cols;
  auto value_at = [&](int r, int c) {
    if (r < 0 || c < 0 || r >= traversable.rows || c >= cols) return kUnreachable;
    const std::size_t i = static_cast<std::size_t>(r) * cols + c;
    return known[i] ? t[i] : kUnreachable;
  };
  // Diagonal neighbour value, unusable when the step would cut a blocked corner.
  auto diagonal_at = [&](Cell from, int dr, int dc) {
    if (!traversable.in_bounds({from.row + dr, from.col}) || !traversable.at({from.row + dr, from.col}) ||
        !traversable.in_bounds({from.row, from.col + dc}) || !traversable.at({from.row, from.col + dc})) {
      return kUnreachable;
    }
    return value_at(from.row + dr, from.col + dc);
  };

  const std::size_t exit_index =
      early_exit && traversable.in_bounds(*early_exit) ? traversable.index(*early_exit) : n;
  double exit_value = kUnreachable;
  while (!heap.empty()) {
    const auto [value, i] = heap.top();
    heap.pop();
    if (known[i] || value > t[i]) continue;
    if (value > exit_value) break;
    known[i] = 1;
    if (i == exit_index) exit_value = value + 2.0;
    const int r = static_cast<int>(i / cols);
    const int c = static_cast<int>(i % cols);
    for (auto [dr, dc] : kRingSteps) {
      const Cell nb{r + dr, c + dc};
      if (!traversable.in_bounds(nb) || !traversable.at(nb)) continue;
      if (dr != 0 && dc != 0 && (!traversable.at({r + dr, c}) || !traversable.at({r, c + dc}))) continue;
      const std::size_t j = traversable.index(nb);
      if (known[j] || field.seeded_[j]) continue;
      const double h = std::min(value_at(nb.row, nb.col - 1), value_at(nb.row, nb.col + 1));
      const double v = std::min(value_at(nb.row - 1, nb.col), value_at(nb.row + 1, nb.col));
      const double d1 = std::min(diagonal_at(nb, -1, -1), diagonal_at(nb, 1, 1));
      const double d2 = std::min(diagonal_at(nb, -1, 1), diagonal_at(nb, 1, -1));
      const double candidate = std::min(eikonal_update(h, v), diagonal_eikonal_update(d1, d2));
      if (candidate < t[j]) {
        t[j] = candidate;
        heap.emplace(candidate, j);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) field.values_[i] = known[i] ? t[i] * cell_len : kUnreachable;
  return field;
}

DistanceField fmm_field(const BinaryGrid& traversable, Cell goal, double cell_len, const FmmOptions& options) {
  Cell snapped = goal;
  if (!traversable.in_bounds(goal) || !traversable.at(goal)) {
    std::optional<Cell> best;
    double best_d = kUnreachable;
    for (int dr = -options.snap_radius; dr <= options.snap_radius; ++dr) {
      for (int dc = -options.snap_radius; dc <= options.snap_radius; ++dc) {
        const Cell c{goal.row + dr, goal.col + dc};
        const double d = std::hypot(dr, dc);
        if (d > options.snap_radius || !traversable.in_bounds(c) || !traversable.at(c)) continue;
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
    }
    if (!best) throw PlanningError("unreachable goal");
    snapped = *best;
  }
  const std::array<Cell, 1> sources{snapped};
  return fmm_solve(traversable, sources, cell_len, options.seed_radius, options.early_exit);
}

DistanceField fmm_field_multi(const BinaryGrid& traversable, std::span<const Cell> sources, double cell_len) {
  return fmm_solve(traversable, sources, cell_len, 0.0);
}

std::vector<Cell> extract_path(const DistanceField& field, Cell start) {
  if (!field.in_bounds(start) || !field.finite(start)) throw PlanningError("agent disconnected from goal");
  std::vector<Cell> path{start};
  Cell cur = start;
  while (field.at(cur) > 0.0) {
    std::optional<Cell> best;
    double best_rate = 0.0;
    for (auto [dr, dc] : kRingSteps) {
      const Cell nb{cur.row + dr, cur.col + dc};
      if (!field.in_bounds(nb) || !field.finite(nb) || !(field.at(nb) < field.at(cur))) continue;
      const bool diagonal = dr != 0 && dc != 0;
      if (diagonal && (!field.finite({cur.row + dr, cur.col}) || !field.finite({cur.row, cur.col + dc}))) continue;
      const double rate = (field.at(cur) - field.at(nb)) / (diagonal ? std::sqrt(2.0) : 1.0);
      if (!best || rate > best_rate) {
        best = nb;
        best_rate = rate;
      }
    }
    if (!best) throw PlanningError("descent stalled before reaching the goal");
    cur = *best;
    path.push_back(cur);
  }
  return path;
}

double path_length(std::span<const Cell> path, double cell_len) {
  double len = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    len += std::hypot(path[i].row - path[i - 1].row, path[i].col - path[i - 1].col);
  }
  return len * cell_len;
}

Action next_action(const Pose2& pose, std::span<const Point3> waypoints, std::optional<double> stop_radius,
                   const MotionParams& motion) {
  if (waypoints.empty()) throw std::invalid_argument("next_action: empty path");
  if (stop_radius && planar_distance(pose, waypoints.back()) <= *stop_radius) return Action::Stop;
  const auto target = std::find_if(waypoints.begin(), waypoints.end(), [&](const Point3& w) {
    return planar_distance(pose, w) > motion.waypoint_tolerance;
  });
  if (target == waypoints.end()) return Action::TurnLeft;
  const double bearing = std::atan2(target->y - pose.y, target->x - pose.x);
  const double error = wrap_angle(bearing - pose.heading);
  // Headings move in turn_angle increments, so a tolerance of half a turn must be
  // inclusive or a bearing exactly between two headings would oscillate.
  if (std::abs(error) <= deg_to_rad(motion.heading_tolerance_deg) + 1e-9) return Action::MoveForward;
  return error > 0.0 ? Action::TurnLeft : Action::TurnRight;
}

}  // namespace objnav
