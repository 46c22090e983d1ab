#include <benchmark/benchmark.h>

#include <random>

#include "objnav/consistency.hpp"
#include "objnav/eval/bench.hpp"
#include "objnav/identify.hpp"
#include "objnav/planner.hpp"
#include "objnav/rng.hpp"
#include "objnav/sim/scene.hpp"

using namespace objnav;

namespace {

const std::vector<std::vector<Sample>>& walk_frames() {
  static const auto frames = [] {
    const sim::Scene scene = sim::generate_scene({}, 90, "bench");
    const auto start = sim::generate_episodes(scene, 1, 90).at(0).start;
    return eval::record_walk(scene, start, 200, {}, sim::SemanticNoiseModel::diagonal(8, 0.8, 60.0, 91), 512, 92);
  }();
  return frames;
}

void BM_IntegrateFrame(benchmark::State& state) {
  const auto& frames = walk_frames();
  for (auto _ : state) {
    PointStore store(8);
    for (std::size_t t = 0; t < frames.size(); ++t) integrate_frame(store, frames[t], static_cast<std::uint32_t>(t));
    benchmark::DoNotOptimize(store.size());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(frames.size()));
}
BENCHMARK(BM_IntegrateFrame)->Unit(benchmark::kMillisecond);

void BM_Identify(benchmark::State& state) {
  const auto& frames = walk_frames();
  PointStore store(8);
  for (std::size_t t = 0; t < frames.size(); ++t) integrate_frame(store, frames[t], static_cast<std::uint32_t>(t));
  for (auto _ : state) benchmark::DoNotOptimize(identify(store, 3, 0.85));
  state.counters["points"] = static_cast<double>(store.size());
}
BENCHMARK(BM_Identify)->Unit(benchmark::kMillisecond);

BinaryGrid maze(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  BinaryGrid g(n, n, 1);
  std::uniform_int_distribution<int> pos(1, n - 2);
  std::bernoulli_distribution horizontal(0.5);
  for (int k = 0; k < n; ++k) {
    const int r = pos(rng), c = pos(rng);
    const bool h = horizontal(rng);
    for (int i = 0; i < n / 6; ++i) {
      const Cell cell{h ? r : std::min(r + i, n - 2), h ? std::min(c + i, n - 2) : c};
      g.set(cell, false);
    }
  }
  return g;
}

void BM_FmmField(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  BinaryGrid g = maze(n, 5);
  const Cell goal{n / 2, n / 2};
  g.set(goal, true);
  for (auto _ : state) benchmark::DoNotOptimize(fmm_field(g, goal, 0.2));
}
BENCHMARK(BM_FmmField)->Arg(120)->Arg(240)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
