#include "objnav/sim/kinematics.hpp"

#include <algorithm>
#include <cmath>

#include "objnav/rng.hpp"

namespace objnav::sim {

namespace {

double point_segment_distance(double px, double py, double ax, double ay, double bx, double by) {
  const double dx = bx - ax;
  const double dy = by - ay;
  const double len2 = dx * dx + dy * dy;
  const double t = len2 > 0.0 ? std::clamp(((px - ax) * dx + (py - ay) * dy) / len2, 0.0, 1.0) : 0.0;
  return std::hypot(px - (ax + t * dx), py - (ay + t * dy));
}

// Liang-Barsky clip of the segment against the rectangle.
bool segment_hits_rect(double ax, double ay, double bx, double by, const Rect& r) {
  double t0 = 0.0;
  double t1 = 1.0;
  const double d[2] = {bx - ax, by - ay};
  const double o[2] = {ax, ay};
  const double lo[2] = {r.x0, r.y0};
  const double hi[2] = {r.x1, r.y1};
  for (int a = 0; a < 2; ++a) {
    if (d[a] == 0.0) {
      if (o[a] < lo[a] || o[a] > hi[a]) return false;
      continue;
    }
    double ta = (lo[a] - o[a]) / d[a];
    double tb = (hi[a] - o[a]) / d[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return true;
}

}  // namespace

double segment_rect_distance(double ax, double ay, double bx, double by, const Rect& rect) {
  if (segment_hits_rect(ax, ay, bx, by, rect)) return 0.0;
  double best = std::min(rect.distance(ax, ay), rect.distance(bx, by));
  for (auto [cx, cy] : {std::pair{rect.x0, rect.y0}, std::pair{rect.x1, rect.y0}, std::pair{rect.x0, rect.y1},
                        std::pair{rect.x1, rect.y1}}) {
    best = std::min(best, point_segment_distance(cx, cy, ax, ay, bx, by));
  }
  return best;
}

Kinematics::Kinematics(const Scene& scene, MotionParams motion, std::optional<ActuationNoise> noise, std::uint64_t seed)
    : scene_(&scene), motion_(motion), noise_(noise), rng_(mix_seed(seed, 0xAC7)) {}

AgentState Kinematics::apply(const AgentState& state, Action action) {
  if (state.stopped) return state;
  AgentState next = state;
  const double turn = deg_to_rad(motion_.turn_angle_deg);
  double n_forward = 0.0;
  double n_lateral = 0.0;
  double n_rotation = 0.0;
  if (noise_ && action != Action::Stop) {
    std::normal_distribution<double> trans(0.0, noise_->sigma_translation);
    std::normal_distribution<double> rot(0.0, deg_to_rad(noise_->sigma_rotation_deg));
    n_forward = trans(rng_);
    n_lateral = trans(rng_);
    n_rotation = rot(rng_);
  }
  switch (action) {
    case Action::Stop:
      next.stopped = true;
      return next;
    case Action::TurnLeft:
      next.pose.heading = wrap_angle(state.pose.heading + turn + n_rotation);
      return next;
    case Action::TurnRight:
      next.pose.heading = wrap_angle(state.pose.heading - turn + n_rotation);
      return next;
    case Action::MoveForward:
      break;
  }
  const double c = std::cos(state.pose.heading);
  const double s = std::sin(state.pose.heading);
  const double step = motion_.forward_step + n_forward;
  const double x = state.pose.x + step * c - n_lateral * s;
  const double y = state.pose.y + step * s + n_lateral * c;
  for (const Box& b : scene_->boxes) {
    if (segment_rect_distance(state.pose.x, state.pose.y, x, y, b.footprint()) < motion_.agent_radius) {
      ++next.collisions;
      return next;
    }
  }
  next.pose = {x, y, wrap_angle(state.pose.heading + n_rotation)};
  next.path_length += std::hypot(x - state.pose.x, y - state.pose.y);
  return next;
}

Pose2 noisy_pose_reading(const Pose2& truth, const ActuationNoise& noise, std::mt19937_64& rng) {
  std::normal_distribution<double> trans(0.0, noise.sigma_translation);
  std::normal_distribution<double> rot(0.0, deg_to_rad(noise.sigma_rotation_deg));
  const double dx = trans(rng);
  const double dy = trans(rng);
  return {truth.x + dx, truth.y + dy, wrap_angle(truth.heading + rot(rng))};
}


}  // namespace objnav::sim
