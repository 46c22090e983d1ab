#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "objnav/identify.hpp"
#include "objnav/observation.hpp"
#include "objnav/planner.hpp"
#include "objnav/point_store.hpp"
#include "objnav/projection.hpp"

namespace objnav {

inline constexpr double kSuccessReward = 2.5;
/// Charged every step as a penalty.
inline constexpr double kSlackReward = 1e-2;
inline constexpr double kExploreRewardPerPoint = 1e-3;

struct Reward {
  double success = 0.0;
  double slack = 0.0;
  double explore = 0.0;

  double total() const { return success + slack + explore; }
  Reward& operator+=(const Reward& o) {
    success += o.success;
    slack += o.slack;
    explore += o.explore;
    return *this;
  }
};

struct Transition {
  bool terminal = false;
  bool success = false;
  std::size_t new_points = 0;
};

Reward compute_reward(const Transition& t);

enum class GoalKind : std::uint8_t { Explore, Identified };

std::string_view to_string(GoalKind k);

struct NavConfig {
  int policy_cycle = 25;
  int budget = 500;
  double stop_radius = 0.9;
  int replan_interval = 10;
  std::size_t observation_points = 4096;
  IdentifyParams identify;
  GridParams grid;
  MotionParams motion;
  StoreParams store;
  std::uint64_t seed = 0;
};

/// Per-episode navigator state.
struct NavState {
  PointStore store;
  CornerGoal corner_goal = CornerGoal::TopLeft;
  ThresholdAction threshold_action{7};
  std::optional<Point3> identified_goal;
  int step = 0;
  Reward cumulative;
  bool stopped = false;
};

enum class StopReason : std::uint8_t { None, TargetReached, BudgetExhausted, Disconnected };

std::string_view to_string(StopReason r);

/// What one navigator step did; serialised as a trace line.
struct StepRecord {
  int step = 0;
  Pose2 pose;
  Action action = Action::TurnLeft;
  GoalKind goal_kind = GoalKind::Explore;
  CornerGoal corner = CornerGoal::TopLeft;
  double tau = 0.0;
  std::size_t candidate_count = 0;
  std::optional<Point3> identified_goal;
  Reward reward;
  std::size_t new_points = 0;
  std::size_t merged_points = 0;
  bool policy_invoked = false;
  bool replanned = false;
  StopReason stop_reason = StopReason::None;
  double fusion_seconds = 0.0;
};

/// Runs the fusion, policy, identification and planning loop for one episode.
class Navigator {
 public:
  Navigator(std::size_t num_categories, std::size_t target_category, PolicyInterface policies, NavConfig config = {});

  /// Consumes one frame of back-projected samples taken at `pose` and returns the
  /// action for this step. Throws std::logic_error once the episode has stopped.
  StepRecord step(std::span<const Sample> frame, const Pose2& pose);

  const NavState& state() const { return state_; }
  const NavConfig& config() const { return config_; }
  std::size_t target_category() const { return target_; }

  /// Observation as the policies would see it at `pose`.
  Observation make_observation(const Pose2& pose) const;
  Grid2D project_map(const Pose2& pose) const;

  /// Remaining waypoints of the current plan.
  std::span<const Point3> current_path() const { return path_; }
  /// Cells learned as blocked from failed forward moves, on the world lattice.
  const std::set<std::pair<std::int64_t, std::int64_t>>& blocked_cells() const { return blocked_; }

 private:
  enum class PlanStatus { Ok, AtGoal, Failed };

  void refresh_pool(const InsertResult& ins);
  /// Plans to the identified goal if one exists and is reachable, else to the first
  /// unexhausted corner. Returns false when nothing is plannable.
  bool plan(const Pose2& pose);
  PlanStatus plan_to(const Grid2D& grid, bool dilated, GoalKind kind);
  void trim_path(const Pose2& pose);
  bool forward_is_safe(const Pose2& pose) const;
  std::pair<std::int64_t, std::int64_t> lattice_of(double x, double y) const;
  std::vector<Point3> visited_points() const;

  std::size_t target_;
  PolicyInterface policies_;
  NavConfig config_;
  NavState state_;

  std::vector<PointId> pool_;
  std::vector<std::uint8_t> in_pool_;
  std::set<std::pair<std::int64_t, std::int64_t>> visited_;
  std::set<std::pair<std::int64_t, std::int64_t>> blocked_;
  /// Corners already reached or found unplannable this episode.
  std::set<CornerGoal> exhausted_;

  std::vector<Point3> path_;
  std::optional<Grid2D> last_grid_;
  int steps_since_plan_ = 0;
  bool force_replan_ = true;
  GoalKind planned_kind_ = GoalKind::Explore;
  CornerGoal planned_corner_ = CornerGoal::TopLeft;
  std::optional<std::pair<std::int64_t, std::int64_t>> planned_target_cell_;
  std::optional<Action> last_action_;
  Pose2 last_pose_;
};

}  // namespace objnav
