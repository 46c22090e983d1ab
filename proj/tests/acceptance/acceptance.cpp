// Acceptance checks 1-11. One PASS/FAIL line per criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <thread>

#include "fixtures.hpp"
#include "objnav/consistency.hpp"
#include "objnav/eval/bench.hpp"
#include "objnav/eval/metrics.hpp"
#include "objnav/eval/runner.hpp"
#include "objnav/identify.hpp"
#include "objnav/navigator.hpp"
#include "objnav/planner.hpp"
#include "objnav/rng.hpp"
#include "objnav/semantic.hpp"
#include "objnav/sim/scene.hpp"
#include "oracles.hpp"

using namespace objnav;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<Point3> positions(const PointStore& store) {
  std::vector<Point3> out;
  out.reserve(store.size());
  for (std::uint32_t i = 0; i < store.size(); ++i) out.push_back(store.position(PointId{i}));
  return out;
}

Outcome threshold_rule() {
  const double expected[10] = {0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95};
  int bad = 0;
  for (int s = 0; s <= 9; ++s) bad += threshold_of(ThresholdAction{s}) != expected[s];
  return {bad == 0, fmt("%d mismatches", bad)};
}

Outcome fusion_rule() {
  std::mt19937_64 rng(2);
  int violations = 0;
  for (int i = 0; i < 10000; ++i) {
    const std::size_t m = 2 + i % 15;
    const SemanticDist a = fixtures::random_dist(m, rng);
    const SemanticDist b = fixtures::random_dist(m, rng);
    const SemanticDist aa = max_fuse(a, a);
    const SemanticDist ab = max_fuse(a, b);
    bool ok = ab == max_fuse(b, a) && SemanticDist::is_valid(ab.probs()) && SemanticDist::is_valid(aa.probs());
    for (std::size_t k = 0; k < m; ++k) ok = ok && std::abs(aa[k] - a[k]) <= 1e-12;
    violations += !ok;
  }
  return {violations == 0, fmt("%d violations over 10000 pairs", violations)};
}

Outcome spatial_index() {
  int mismatches = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    PointStore store(4);
    store.insert_batch(fixtures::samples_at(fixtures::random_points(10000, 1.5, 300 + s), SemanticDist::uniform(4)), 0);
    const auto stored = positions(store);
    const auto& prm = store.params();
    std::mt19937_64 rng(400 + s);
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(store.size() - 1));
    std::uniform_real_distribution<double> u(-0.1, 1.6);
    std::uniform_real_distribution<double> radius(0.01, 0.3);
    for (int q = 0; q < 200; ++q) {
      const Point3 p{u(rng), u(rng), u(rng)};
      const double r = radius(rng);
      std::vector<std::uint32_t> got;
      for (PointId id : store.neighbors_in_radius(p, r)) got.push_back(id.value);
      mismatches += got != oracle::neighbors(stored, p, r);

      const PointId id{pick(rng)};
      store.build_octree_links(id);
      const auto expect = oracle::octant_links(stored, id.value, prm.link_min, prm.link_max);
      for (int o = 0; o < kNumOctants; ++o) {
        const auto l = store.link(id, o);
        const bool same = l.has_value() == expect[o].has_value() && (!l || l->value == *expect[o]);
        mismatches += !same;
      }
    }
  }
  return {mismatches == 0, fmt("%d mismatches over 10 stores x 200 queries", mismatches)};
}

/// Points on the faces of an nx x ny x nz box of `pitch` cells, one per face cell centre.
std::vector<Point3> box_surface(int nx, int ny, int nz, double pitch, double jitter, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> j(-jitter, jitter);
  std::vector<Point3> out;
  const double X = nx * pitch, Y = ny * pitch, Z = nz * pitch;
  auto face = [&](int na, int nb, auto place) {
    for (int a = 0; a < na; ++a) {
      for (int b = 0; b < nb; ++b) {
        const Point3 p = place((a + 0.5) * pitch, (b + 0.5) * pitch);
        out.push_back({p.x + j(rng), p.y + j(rng), p.z + j(rng)});
      }
    }
  };
  face(nx, ny, [&](double a, double b) { return Point3{a, b, 0.0}; });
  face(nx, ny, [&](double a, double b) { return Point3{a, b, Z}; });
  face(nx, nz, [&](double a, double b) { return Point3{a, 0.0, b}; });
  face(nx, nz, [&](double a, double b) { return Point3{a, Y, b}; });
  face(ny, nz, [&](double a, double b) { return Point3{0.0, a, b}; });
  face(ny, nz, [&](double a, double b) { return Point3{X, a, b}; });
  return out;
}

struct FilterRates {
  double rejected = 0.0;
  double retained = 0.0;
  bool found = false;
};

/// 5% of the points are one-hot on a wrong category; the rest are near-one-hot on the true one.
/// Rejection: outliers that do not become candidates for their own (wrong) label.
/// Retention: true points inside the identified cluster.
std::optional<FilterRates> filter_rates(const std::vector<Point3>& pts, std::uint64_t seed) {
  constexpr std::size_t kM = 6, kTrue = 2, kWrong = 4;
  constexpr double kTau = 0.85;
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(pts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  const std::set<std::size_t> outliers(order.begin(), order.begin() + static_cast<long>(pts.size() / 20));
  std::vector<Sample> samples;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    samples.push_back({pts[i], outliers.contains(i) ? SemanticDist::one_hot(kM, kWrong)
                                                    : fixtures::peaked(kM, kTrue, 0.96)});
  }
  PointStore store(kM);
  integrate_frame(store, samples, 0);
  if (store.size() != pts.size()) return std::nullopt;
  const auto wrong = identification_candidates(store, kWrong, kTau);
  const Identification hit = identify(store, kTrue, kTau);
  return FilterRates{1.0 - static_cast<double>(wrong.size()) / static_cast<double>(outliers.size()),
                     static_cast<double>(hit.cluster_size) / static_cast<double>(pts.size() - outliers.size()),
                     hit.goal.has_value()};
}

Outcome consistency_filter() {
  // A fused depth cloud samples object surfaces, so the asserted cluster is a box shell:
  // 2 * (20 * 20 + 20 * 15 + 20 * 15) = 2000 points.
  const auto shell = filter_rates(box_surface(20, 20, 15, 0.06, 0.003, 44), 45);
  // A solid lattice has about twice as many points per 2-ring, so chance support is likelier. Reported only.
  const auto solid = filter_rates(fixtures::jittered_lattice(10, 10, 20, 0.06, 0.01, {0, 0, 0}, 44), 45);
  if (!shell || !solid) return {false, "cluster points merged on insertion"};
  const bool pass = shell->rejected >= 0.95 && shell->retained >= 0.90 && shell->found;
  return {pass, fmt("surface: outliers rejected %.1f%%, true points retained %.1f%%; solid lattice: %.1f%% / %.1f%%",
                    100 * shell->rejected, 100 * shell->retained, 100 * solid->rejected, 100 * solid->retained)};
}

Outcome fusion_gain() {
  constexpr std::size_t kM = 8;
  std::size_t single_total = 0, single_right = 0, fused_total = 0, fused_right = 0;
  for (std::size_t i = 0; i < 20; ++i) {
    const sim::Scene scene = sim::generate_scene({}, mix_seed(50, i), fmt("gain-%02zu", i));
    const auto start = sim::generate_episodes(scene, 1, mix_seed(51, i)).at(0).start;
    const auto truth = eval::record_walk(scene, start, 150, {}, sim::SemanticNoiseModel::oracle(kM), 512, mix_seed(52, i));
    auto noise = sim::SemanticNoiseModel::diagonal(kM, 0.7, 60.0, mix_seed(53, i));
    const auto seen = eval::record_walk(scene, start, 150, {}, noise, 512, mix_seed(52, i));
    PointStore truth_store(kM), seen_store(kM);
    for (std::size_t t = 0; t < truth.size(); ++t) {
      if (truth[t].size() != seen[t].size()) return {false, "walks diverged"};
      for (std::size_t k = 0; k < truth[t].size(); ++k) {
        ++single_total;
        single_right += seen[t][k].sem.argmax() == truth[t][k].sem.argmax();
      }
      truth_store.insert_batch(truth[t], static_cast<std::uint32_t>(t));
      seen_store.insert_batch(seen[t], static_cast<std::uint32_t>(t));
    }
    if (truth_store.size() != seen_store.size()) return {false, "stores diverged"};
    for (std::uint32_t p = 0; p < seen_store.size(); ++p) {
      const PointId id{p};
      if (seen_store.views(id) < 5) continue;
      ++fused_total;
      fused_right += seen_store.argmax_category(id) == truth_store.argmax_category(id);
    }
  }
  if (fused_total == 0) return {false, "no point reached 5 views"};
  const double single = 100.0 * static_cast<double>(single_right) / static_cast<double>(single_total);
  const double fused = 100.0 * static_cast<double>(fused_right) / static_cast<double>(fused_total);
  return {fused - single >= 10.0,
          fmt("single-view %.1f%%, fused %.1f%% over %zu points, gain %.1f pp", single, fused, fused_total,
              fused - single)};
}

Outcome fmm_vs_dijkstra() {
  constexpr double kCell = 0.2;
  double worst = 0.0;
  std::size_t reach_mismatch = 0, below_euclid = 0, bad_paths = 0, paths = 0;
  std::mt19937_64 rng(60);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const BinaryGrid maze = fixtures::random_maze(240, 240, 600 + s);
    std::uniform_int_distribution<int> u(1, 238);
    Cell goal{u(rng), u(rng)};
    while (!maze.at(goal)) goal = {u(rng), u(rng)};
    const DistanceField f = fmm_field(maze, goal, kCell);
    const auto d = oracle::dijkstra8(maze, goal, kCell);
    for (int r = 0; r < 240; ++r) {
      for (int c = 0; c < 240; ++c) {
        const Cell cell{r, c};
        const double ref = d[maze.index(cell)];
        if (f.finite(cell) != (ref < kUnreachable)) ++reach_mismatch;
        if (!f.finite(cell) || ref == 0.0) continue;
        worst = std::max(worst, f.at(cell) / ref);
        if (f.at(cell) < std::hypot(r - goal.row, c - goal.col) * kCell - 1e-6) ++below_euclid;
      }
    }
    for (int k = 0, walked = 0; k < 400 && walked < 20; ++k) {
      const Cell start{u(rng), u(rng)};
      if (!f.finite(start)) continue;
      ++walked;
      ++paths;
      const auto path = extract_path(f, start);
      bool ok = path.back() == goal;
      for (std::size_t i = 0; i < path.size() && ok; ++i) {
        ok = maze.at(path[i]);
        if (i > 0) ok = ok && maze.at({path[i - 1].row, path[i].col}) && maze.at({path[i].row, path[i - 1].col});
      }
      bad_paths += !ok;
    }
  }
  const bool pass = worst <= 1.05 && reach_mismatch == 0 && below_euclid == 0 && bad_paths == 0;
  return {pass, fmt("max FMM/Dijkstra %.4f, reach mismatches %zu, below Euclidean %zu, bad paths %zu of %zu",
                    worst, reach_mismatch, below_euclid, bad_paths, paths)};
}

struct Suite {
  std::vector<sim::Scene> scenes;
  std::vector<sim::EpisodeSpec> episodes;
};

const Suite& navigation_suite() {
  static const Suite suite = [] {
    Suite s;
    for (std::size_t i = 0; i < 50; ++i) {
      s.scenes.push_back(sim::generate_scene({}, mix_seed(7, i), fmt("scene-%03zu", i)));
      auto eps = sim::generate_episodes(s.scenes.back(), 1, mix_seed(8, i));
      s.episodes.insert(s.episodes.end(), eps.begin(), eps.end());
    }
    return s;
  }();
  return suite;
}

eval::RunConfig suite_config() {
  eval::RunConfig cfg;
  cfg.policy = "corner-heuristic";
  cfg.ident = "fixed:7";
  cfg.jobs = std::max(1u, std::thread::hardware_concurrency());
  return cfg;
}

Outcome navigation_sanity() {
  const Suite& suite = navigation_suite();
  const auto report = eval::run_episodes(suite.scenes, suite.episodes, suite_config());
  std::size_t bad_dts = 0, long_eps = 0;
  for (const auto& r : report.results) {
    if (r.success && r.d_final != 0.0) ++bad_dts;
    if (r.steps > 500) ++long_eps;
  }
  const double success = 100.0 * eval::success_rate(report.results);
  return {success >= 95.0 && bad_dts == 0 && long_eps == 0 && report.results.size() == 50,
          fmt("success %.1f%% over %zu episodes, successes with DTS > 0: %zu, over 500 steps: %zu", success,
              report.results.size(), bad_dts, long_eps)};
}

Outcome noise_robustness() {
  const Suite& suite = navigation_suite();
  auto cfg = suite_config();
  cfg.confusion_diag = 0.8;
  const double clean = 100.0 * eval::success_rate(eval::run_episodes(suite.scenes, suite.episodes, cfg).results);
  cfg.noise = eval::NoiseMode::GaussianPose;
  const double noisy = 100.0 * eval::success_rate(eval::run_episodes(suite.scenes, suite.episodes, cfg).results);
  const double drop = clean - noisy;
  return {drop > 0.0 && drop <= 20.0, fmt("success %.1f%% -> %.1f%%, drop %.1f pp", clean, noisy, drop)};
}

Outcome throughput() {
  const sim::Scene scene = sim::generate_scene({}, 90, "bench");
  const auto start = sim::generate_episodes(scene, 1, 90).at(0).start;
  const auto frames =
      eval::record_walk(scene, start, 500, {}, sim::SemanticNoiseModel::diagonal(8, 0.8, 60.0, 91), 512, 92);
  const auto r = eval::bench_fusion(frames, 8);
  const std::size_t points = r.checkpoints.empty() ? 0 : r.checkpoints.back().points;
  return {r.fps() >= 15.0 && r.memory_r2 >= 0.99,
          fmt("%.1f frames/s over %zu frames, %zu points, memory R^2 %.4f", r.fps(), r.frames, points, r.memory_r2)};
}

eval::EpisodeResult result(bool success, double l_agent, double l_oracle, double d_init, double d_final) {
  eval::EpisodeResult r;
  r.success = success;
  r.l_agent = l_agent;
  r.l_oracle = l_oracle;
  r.d_init = d_init;
  r.d_final = d_final;
  return r;
}

Outcome metric_formulas() {
  using V = std::vector<eval::EpisodeResult>;
  int bad = 0;
  bad += eval::spl(V{result(false, 5, 4, 4, 2)}) != 0.0;
  bad += eval::spl(V{result(true, 4, 4, 4, 0)}) != 1.0;
  bad += eval::spl(V{result(true, 8, 4, 4, 0)}) != 0.5;
  bad += eval::soft_spl(V{result(false, 0, 4, 4, 4)}) != 0.0;
  bad += eval::soft_spl(V{result(true, 4, 4, 4, 0)}) != 1.0;
  bad += eval::soft_spl(V{result(false, 2, 4, 4, 2)}) != 0.5;
  bad += eval::dts(V{result(true, 4, 4, 4, 0)}) != 0.0;
  bad += eval::dts(V{result(false, 1, 4, 4, 2.0)}) != 2.0;
  std::mt19937_64 rng(100);
  std::uniform_real_distribution<double> len(0.1, 30.0);
  std::bernoulli_distribution win(0.5);
  int over = 0;
  for (int t = 0; t < 100; ++t) {
    V set;
    for (int i = 0; i < 1 + t % 25; ++i) {
      const double o = len(rng);
      const bool s = win(rng);
      set.push_back(result(s, len(rng), o, o, s ? 0.0 : len(rng)));
    }
    over += eval::spl(set) > eval::success_rate(set);
  }
  return {bad == 0 && over == 0, fmt("%d unit mismatches, %d sets with SPL > success", bad, over)};
}

Outcome reward_constants() {
  int bad = 0;
  const Reward win = compute_reward({true, true, 12});
  bad += win.success != 2.5 || win.slack != -0.01 || win.explore != 12 * 1e-3;
  const Reward miss = compute_reward({true, false, 0});
  bad += miss.success != 0.0 || miss.slack != -0.01 || miss.explore != 0.0;
  const Reward mid = compute_reward({false, false, 345});
  bad += mid.success != 0.0 || mid.slack != -0.01 || mid.explore != 345 * 1e-3;
  return {bad == 0, fmt("%d mismatching transitions", bad)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"threshold rule", threshold_rule},
      {"fusion rule", fusion_rule},
      {"spatial index vs oracle", spatial_index},
      {"consistency filtering", consistency_filter},
      {"multi-view fusion gain", fusion_gain},
      {"FMM vs Dijkstra", fmm_vs_dijkstra},
      {"navigation sanity", navigation_sanity},
      {"noise robustness", noise_robustness},
      {"fusion throughput", throughput},
      {"metric formulas", metric_formulas},
      {"reward constants", reward_constants},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !out.pass;
    std::printf("criterion %2zu %-26s %s  %s  (%.1f s)\n", i + 1, criteria[i].first, out.pass ? "PASS" : "FAIL",
                out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
