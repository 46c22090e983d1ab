#include "objnav/eval/bench.hpp"

#include <chrono>
#include <random>
#include <stdexcept>

#include "objnav/consistency.hpp"
#include "objnav/rng.hpp"
#include "objnav/sim/kinematics.hpp"

namespace objnav::eval {

std::vector<std::vector<Sample>> record_walk(const sim::Scene& scene, const Pose2& start, std::size_t frames,
                                             const sim::CameraModel& camera, const sim::SemanticNoiseModel& noise,
                                             std::size_t points_per_frame, std::uint64_t seed) {
  sim::Kinematics kinematics(scene);
  std::mt19937_64 rng(mix_seed(seed, 0xBE7C));
  std::bernoulli_distribution turn(0.2);
  std::bernoulli_distribution left(0.5);
  sim::AgentState state{start};
  bool blocked = false;
  std::vector<std::vector<Sample>> out;
  out.reserve(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    out.push_back(sim::observe(scene, state.pose, state.pose, camera, noise, std::nullopt, points_per_frame,
                               mix_seed(seed, t)));
    Action a = Action::MoveForward;
    if (blocked || turn(rng)) a = left(rng) ? Action::TurnLeft : Action::TurnRight;
    const sim::AgentState next = kinematics.apply(state, a);
    blocked = a == Action::MoveForward && next.collisions != state.collisions;
    state = next;
  }
  return out;
}

double linear_r2(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_r2: need two or more pairs");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (syy == 0.0 || sxx == 0.0) return 0.0;
  return sxy * sxy / (sxx * syy);
}

FusionBenchResult bench_fusion(const std::vector<std::vector<Sample>>& frames, std::size_t num_categories,
                               const StoreParams& params, std::size_t checkpoint_every) {
  if (checkpoint_every == 0) throw std::invalid_argument("bench_fusion: checkpoint interval must be positive");
  PointStore store(num_categories, params);
  FusionBenchResult result;
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const auto t0 = std::chrono::steady_clock::now();
    integrate_frame(store, frames[t], static_cast<std::uint32_t>(t));
    result.seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ++result.frames;
    if ((t + 1) % checkpoint_every == 0 || t + 1 == frames.size()) {
      result.checkpoints.push_back({t + 1, store.size(), store.memory_bytes()});
    }
  }
  if (result.checkpoints.size() >= 2) {
    std::vector<double> x, y;
    for (const FusionCheckpoint& c : result.checkpoints) {
      x.push_back(static_cast<double>(c.points));
      y.push_back(static_cast<double>(c.memory_bytes));
    }
    result.memory_r2 = linear_r2(x, y);
  }
  return result;
}

}  // namespace objnav::eval
