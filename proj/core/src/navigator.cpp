#include "objnav/navigator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "objnav/consistency.hpp"
#include "objnav/rng.hpp"

namespace objnav {

namespace {
constexpr std::size_t kNumCorners = kAllCorners.size();
}  // namespace

Reward compute_reward(const Transition& t) {
  Reward r;
  r.success = t.terminal && t.success ? kSuccessReward : 0.0;
  r.slack = -kSlackReward;
  r.explore = static_cast<double>(t.new_points) * kExploreRewardPerPoint;
  return r;
}

std::string_view to_string(GoalKind k) { return k == GoalKind::Identified ? "identified" : "explore"; }

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::None: return "none";
    case StopReason::TargetReached: return "target_reached";
    case StopReason::BudgetExhausted: return "budget_exhausted";
    case StopReason::Disconnected: return "disconnected";
  }
  return "unknown";
}

Navigator::Navigator(std::size_t num_categories, std::size_t target_category, PolicyInterface policies,
                     NavConfig config)
    : target_(target_category),
      policies_(std::move(policies)),
      config_(config),
      state_{PointStore(num_categories, config.store), CornerGoal::TopLeft, ThresholdAction{7}, std::nullopt, 0, Reward{}, false} {
  if (target_category >= num_categories) throw std::invalid_argument("Navigator: target category out of range");
  if (!policies_.exploration || !policies_.identification) throw std::invalid_argument("Navigator: missing policy");
  if (config.policy_cycle <= 0 || config.budget <= 0 || config.replan_interval <= 0) {
    throw std::invalid_argument("Navigator: cadences must be positive");
  }
}

std::pair<std::int64_t, std::int64_t> Navigator::lattice_of(double x, double y) const {
  const double len = config_.grid.cell_len;
  return {static_cast<std::int64_t>(std::floor(x / len)), static_cast<std::int64_t>(std::floor(y / len))};
}

std::vector<Point3> Navigator::visited_points() const {
  const double len = config_.grid.cell_len;
  std::vector<Point3> out;
  out.reserve(visited_.size());
  for (auto [gx, gy] : visited_) out.push_back({(gx + 0.5) * len, (gy + 0.5) * len, 0.0});
  return out;
}

Grid2D Navigator::project_map(const Pose2& pose) const {
  const std::vector<Point3> visited = visited_points();
  return project(state_.store, pose, config_.grid, visited);
}

Observation Navigator::make_observation(const Pose2& pose) const {
  PointSample sample = state_.store.sample_points(config_.observation_points,
                                                  mix_seed(config_.seed, 0x0B5E, static_cast<std::uint64_t>(state_.step)),
                                                  {pose.x, pose.y, 0.0});
  return Observation{std::move(sample.points), sample.synthetic, project_map(pose), target_, state_.step, pose};
}

void Navigator::refresh_pool(const InsertResult& ins) {
  const PointStore& store = state_.store;
  if (in_pool_.size() < store.size()) in_pool_.resize(store.size(), 0);
  bool removed = false;
  for (PointId id : ins.assignment) {
    if (!id.valid()) continue;
    const bool member = store.probability(id, target_) > kThresholdLow;
    if (member && !in_pool_[id.value]) {
      in_pool_[id.value] = 1;
      pool_.insert(std::upper_bound(pool_.begin(), pool_.end(), id), id);
    } else if (!member && in_pool_[id.value]) {
      in_pool_[id.value] = 0;
      removed = true;
    }
  }
  if (removed) {
    std::erase_if(pool_, [&](PointId id) { return !in_pool_[id.value]; });
  }
}

Navigator::PlanStatus Navigator::plan_to(const Grid2D& grid, bool dilated, GoalKind kind) {
  const int n = grid.size();
  BinaryGrid obstacles(n, n, 0);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (grid.obstacle({r, c})) obstacles.set({r, c}, true);
    }
  }
  const double len = grid.cell_len();
  for (auto [gx, gy] : blocked_) {
    if (const auto cell = grid.cell_of((gx + 0.5) * len, (gy + 0.5) * len)) obstacles.set(*cell, true);
  }
  const BinaryGrid blocked = dilated ? dilate(obstacles, dilation_cells(config_.motion.agent_radius, len)) : obstacles;
  BinaryGrid traversable(n, n, 0);
  for (std::size_t i = 0; i < blocked.cells.size(); ++i) traversable.cells[i] = blocked.cells[i] ? 0 : 1;
  const Cell agent = grid.center_cell();
  traversable.set(agent, true);

  // 4-connected reachability from the agent.
  BinaryGrid reach(n, n, 0);
  std::deque<Cell> queue{agent};
  reach.set(agent, true);
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    for (auto [dr, dc] : {std::pair{-1, 0}, std::pair{1, 0}, std::pair{0, -1}, std::pair{0, 1}}) {
      const Cell nb{c.row + dr, c.col + dc};
      if (!traversable.in_bounds(nb) || !traversable.at(nb) || reach.at(nb)) continue;
      reach.set(nb, true);
      queue.push_back(nb);
    }
  }

  Cell target;
  double max_snap = std::numeric_limits<double>::infinity();
  if (kind == GoalKind::Identified) {
    const auto cell = grid.cell_of(state_.identified_goal->x, state_.identified_goal->y);
    if (!cell) return PlanStatus::Failed;
    target = *cell;
    max_snap = 10.0;
  } else {
    target = corner_cell(grid, state_.corner_goal);
  }
  std::optional<Cell> goal;
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (!reach.at({r, c})) continue;
      const double d = std::hypot(r - target.row, c - target.col);
      if (d <= max_snap && d < best) {
        best = d;
        goal = Cell{r, c};
      }
    }
  }
  if (!goal) return PlanStatus::Failed;
  if (kind == GoalKind::Explore && *goal == agent) return PlanStatus::AtGoal;

  FmmOptions options;
  options.early_exit = agent;
  std::vector<Cell> cells;
  try {
    const DistanceField field = fmm_field(traversable, *goal, len, options);
    cells = extract_path(field, agent);
  } catch (const PlanningError&) {
    return PlanStatus::Failed;
  }
  path_.clear();
  for (std::size_t i = 1; i < cells.size(); ++i) path_.push_back(grid.cell_center(cells[i]));
  if (kind == GoalKind::Identified) {
    path_.push_back(*state_.identified_goal);
    planned_target_cell_ = lattice_of(state_.identified_goal->x, state_.identified_goal->y);
  }
  planned_kind_ = kind;
  planned_corner_ = state_.corner_goal;
  steps_since_plan_ = 0;
  force_replan_ = false;
  return PlanStatus::Ok;
}

bool Navigator::plan(const Pose2& pose) {
  const Grid2D grid = project_map(pose);
  last_grid_ = grid;
  path_.clear();
  auto attempt = [&](GoalKind kind) {
    const PlanStatus status = plan_to(grid, true, kind);
    return status == PlanStatus::Ok ? status : plan_to(grid, false, kind);
  };
  if (state_.identified_goal && attempt(GoalKind::Identified) == PlanStatus::Ok) return true;
  // Exhausted corners are skipped round-robin; once all four are spent they get one more round.
  bool refreshed = false;
  for (std::size_t tries = 0; tries < 2 * kNumCorners + 1; ++tries) {
    if (exhausted_.size() == kNumCorners) {
      if (refreshed) break;
      exhausted_.clear();
      refreshed = true;
    }
    if (!exhausted_.contains(state_.corner_goal)) {
      if (attempt(GoalKind::Explore) == PlanStatus::Ok) return true;
      exhausted_.insert(state_.corner_goal);
    }
    state_.corner_goal = next_corner(state_.corner_goal);
  }
  return false;
}

void Navigator::trim_path(const Pose2& pose) {
  // Project onto the path through the nearest of the next few waypoints and aim at the
  // one after it, so an overshot waypoint never pulls the agent backwards.
  constexpr std::size_t kSearch = 8;
  constexpr double kOnPath = 0.3;
  if (path_.size() <= 1) return;
  std::size_t nearest = 0;
  double best = planar_distance(pose, path_[0]);
  for (std::size_t i = 1; i < std::min(kSearch, path_.size() - 1); ++i) {
    const double d = planar_distance(pose, path_[i]);
    if (d < best) {
      best = d;
      nearest = i;
    }
  }
  if (best <= kOnPath) ++nearest;
  path_.erase(path_.begin(), path_.begin() + static_cast<std::ptrdiff_t>(std::min(nearest, path_.size() - 1)));
}

bool Navigator::forward_is_safe(const Pose2& pose) const {
  const double x = pose.x + config_.motion.forward_step * std::cos(pose.heading);
  const double y = pose.y + config_.motion.forward_step * std::sin(pose.heading);
  if (blocked_.count(lattice_of(x, y))) return false;
  if (last_grid_) {
    if (const auto cell = last_grid_->cell_of(x, y)) return !last_grid_->obstacle(*cell);
  }
  return true;
}

StepRecord Navigator::step(std::span<const Sample> frame, const Pose2& pose) {
  if (state_.stopped) throw std::logic_error("Navigator::step after stop");
  if (state_.step >= config_.budget) throw std::logic_error("Navigator::step beyond budget");

  StepRecord rec;
  rec.step = state_.step;
  rec.pose = pose;

  // A forward command that barely moved the pose ran into something.
  if (last_action_ == Action::MoveForward && planar_distance(pose, last_pose_) < 0.5 * config_.motion.forward_step) {
    const double reach = config_.motion.agent_radius + 0.5 * config_.grid.cell_len;
    blocked_.insert(lattice_of(pose.x + reach * std::cos(pose.heading), pose.y + reach * std::sin(pose.heading)));
    force_replan_ = true;
  }

  const auto t0 = std::chrono::steady_clock::now();
  const InsertResult ins = integrate_frame(state_.store, frame, static_cast<std::uint32_t>(state_.step));
  rec.fusion_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rec.new_points = ins.inserted;
  rec.merged_points = ins.merged;
  refresh_pool(ins);
  visited_.insert(lattice_of(pose.x, pose.y));

  if (state_.step % config_.policy_cycle == 0) {
    const Observation obs = make_observation(pose);
    CornerGoal corner = policies_.exploration(obs);
    state_.threshold_action = policies_.identification(obs);
    if (exhausted_.size() == kNumCorners) exhausted_.clear();
    while (exhausted_.contains(corner)) corner = next_corner(corner);
    if (corner != state_.corner_goal) force_replan_ = true;
    state_.corner_goal = corner;
    rec.policy_invoked = true;
  }

  const double tau = threshold_of(state_.threshold_action);
  const Identification ident =
      identify(state_.store, target_, tau, config_.identify, std::span<const PointId>(pool_));
  state_.identified_goal = ident.goal;
  rec.tau = tau;
  rec.candidate_count = ident.candidate_count;
  rec.identified_goal = ident.goal;
  const GoalKind kind = ident.goal ? GoalKind::Identified : GoalKind::Explore;

  Action action = Action::TurnLeft;
  StopReason reason = StopReason::None;
  if (ident.goal && planar_distance(pose, *ident.goal) <= config_.stop_radius) {
    action = Action::Stop;
    reason = StopReason::TargetReached;
  } else {
    const bool goal_moved =
        kind != planned_kind_ || (kind == GoalKind::Explore && state_.corner_goal != planned_corner_) ||
        (kind == GoalKind::Identified && lattice_of(ident.goal->x, ident.goal->y) != planned_target_cell_);
    bool planned_now = false;
    if (force_replan_ || path_.empty() || goal_moved || steps_since_plan_ >= config_.replan_interval) {
      planned_now = true;
      rec.replanned = true;
      if (!plan(pose)) reason = StopReason::Disconnected;
    }
    if (reason == StopReason::Disconnected) {
      action = Action::Stop;
    } else {
      trim_path(pose);
      const bool corner_reached =
          planned_kind_ == GoalKind::Explore &&
          (path_.empty() ||
           (path_.size() == 1 && planar_distance(pose, path_.front()) <= config_.motion.waypoint_tolerance));
      if (corner_reached) {
        // At the reachable cell nearest to the corner; the next unexhausted corner takes over.
        exhausted_.insert(state_.corner_goal);
        rec.replanned = true;
        planned_now = true;
        if (plan(pose)) trim_path(pose);
        else reason = StopReason::Disconnected;
      }
      if (reason == StopReason::Disconnected) {
        action = Action::Stop;
      } else if (path_.empty()) {
        action = Action::TurnLeft;
        force_replan_ = true;
      } else {
        const bool to_target = planned_kind_ == GoalKind::Identified && kind == GoalKind::Identified;
        const std::optional<double> stop = to_target ? std::optional(config_.stop_radius) : std::nullopt;
        action = next_action(pose, path_, stop, config_.motion);
        if (action == Action::MoveForward && !forward_is_safe(pose)) {
          const double x = pose.x + config_.motion.forward_step * std::cos(pose.heading);
          const double y = pose.y + config_.motion.forward_step * std::sin(pose.heading);
          blocked_.insert(lattice_of(x, y));
          if (!planned_now && plan(pose)) {
            rec.replanned = true;
            trim_path(pose);
            if (!path_.empty()) action = next_action(pose, path_, stop, config_.motion);
          }
          if (action == Action::MoveForward && !forward_is_safe(pose)) {
            action = Action::TurnLeft;
            force_replan_ = true;
          }
        }
        if (action == Action::Stop) reason = StopReason::TargetReached;
      }
    }
  }
  ++steps_since_plan_;

  if (state_.step == config_.budget - 1 && action != Action::Stop) {
    action = Action::Stop;
    reason = StopReason::BudgetExhausted;
  }

  rec.action = action;
  rec.stop_reason = reason;
  rec.goal_kind = kind;
  rec.corner = state_.corner_goal;
  rec.reward = compute_reward({action == Action::Stop, false, ins.inserted});
  state_.cumulative += rec.reward;
  if (action == Action::Stop) state_.stopped = true;
  last_action_ = action;
  last_pose_ = pose;
  ++state_.step;
  return rec;
}

}  // namespace objnav
