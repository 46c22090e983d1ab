#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "objnav/geometry.hpp"
#include "objnav/projection.hpp"

namespace objnav {

/// Actuation and path-following constants.
struct MotionParams {
  double forward_step = 0.25;
  double turn_angle_deg = 30.0;
  double agent_radius = 0.18;
  double waypoint_tolerance = 0.10;
  double heading_tolerance_deg = 15.0;
};

class PlanningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Row-major binary raster.
struct BinaryGrid {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> cells;

  BinaryGrid() = default;
  BinaryGrid(int r, int c, std::uint8_t fill = 0) : rows(r), cols(c), cells(static_cast<std::size_t>(r) * c, fill) {}

  bool in_bounds(Cell c) const { return c.row >= 0 && c.col >= 0 && c.row < rows && c.col < cols; }
  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.row) * cols + c.col; }
  bool at(Cell c) const { return cells[index(c)] != 0; }
  void set(Cell c, bool v) { cells[index(c)] = v ? 1 : 0; }
};

/// Cells whose centre lies within radius_cells + 0.5 of a set cell.
BinaryGrid dilate(const BinaryGrid& mask, int radius_cells);

/// Number of cells the obstacle mask is grown by for a disc agent.
int dilation_cells(double agent_radius, double cell_len);

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

/// Travel distance in meters from the goal over traversable cells.
class DistanceField {
 public:
  DistanceField(int rows, int cols, double cell_len, Cell goal);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double cell_len() const { return cell_len_; }
  Cell goal() const { return goal_; }

  bool in_bounds(Cell c) const { return c.row >= 0 && c.col >= 0 && c.row < rows_ && c.col < cols_; }
  double at(Cell c) const { return values_[index(c)]; }
  bool finite(Cell c) const { return at(c) < kUnreachable; }
  /// True for cells initialised with their exact straight-line distance.
  bool seeded(Cell c) const { return seeded_[index(c)] != 0; }

  std::span<const double> values() const { return values_; }

 private:
  friend DistanceField fmm_solve(const BinaryGrid&, std::span<const Cell>, double, double, std::optional<Cell>);

  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.row) * cols_ + c.col; }

  int rows_;
  int cols_;
  double cell_len_;
  Cell goal_;
  std::vector<double> values_;
  std::vector<std::uint8_t> seeded_;
};

struct FmmOptions {
  /// An untraversable goal snaps to the nearest traversable cell within this many cells.
  int snap_radius = 10;
  /// Cells within this many cells of the goal and in line of sight start from their
  /// exact Euclidean distance.
  double seed_radius = 8.0;
  /// Stop marching once every cell up to two cells beyond this one is final. Cells
  /// left unfinished read as unreachable; descent from `early_exit` is unaffected.
  std::optional<Cell> early_exit;
};

/// First-order fast marching solution of |grad T| = 1 on traversable cells. Each update
/// takes the smaller of the axis-aligned and the diagonal upwind stencils; diagonal
/// neighbours never cut a blocked corner. Throws PlanningError("unreachable goal") if the goal
/// cannot be snapped.
DistanceField fmm_field(const BinaryGrid& traversable, Cell goal, double cell_len, const FmmOptions& options = {});

/// Multi-source variant: every source cell starts at zero. No line-of-sight seeding.
DistanceField fmm_field_multi(const BinaryGrid& traversable, std::span<const Cell> sources, double cell_len);

/// Shared solver. `seed_radius` <= 0 disables exact seeding.
DistanceField fmm_solve(const BinaryGrid& traversable, std::span<const Cell> sources, double cell_len,
                        double seed_radius, std::optional<Cell> early_exit = std::nullopt);

/// Upwind quadratic update from the smaller horizontal and vertical neighbour values
/// (in cell units). Exposed for the eikonal residual check.
double eikonal_update(double horizontal, double vertical);

/// Steepest-descent walk over the 8-neighbourhood from `start` to the goal.
/// Throws PlanningError("agent disconnected from goal") when start is unreachable.
std::vector<Cell> extract_path(const DistanceField& field, Cell start);

/// Path length in meters, counting diagonal steps as sqrt(2) cells.
double path_length(std::span<const Cell> path, double cell_len);

/// Discrete action that follows `waypoints` from `pose`.
///
/// Stops when stop_radius is given and the terminal waypoint lies within it. Otherwise
/// steers toward the first waypoint farther than the waypoint tolerance, moving forward
/// once the heading error is within tolerance. With no such waypoint the agent turns left.
Action next_action(const Pose2& pose, std::span<const Point3> waypoints, std::optional<double> stop_radius,
                   const MotionParams& motion = {});

}  // namespace objnav
