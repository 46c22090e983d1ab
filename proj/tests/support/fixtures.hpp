#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "objnav/planner.hpp"
#include "objnav/point_store.hpp"
#include "objnav/semantic.hpp"
#include "objnav/sim/scene.hpp"

namespace fixtures {

inline std::vector<objnav::Point3> random_points(std::size_t n, double side, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, side);
  std::vector<objnav::Point3> out(n);
  for (auto& p : out) p = {u(rng), u(rng), u(rng)};
  return out;
}

inline objnav::SemanticDist random_dist(std::size_t m, std::mt19937_64& rng) {
  std::gamma_distribution<double> g(0.5, 1.0);
  std::vector<double> v(m);
  double s = 0.0;
  for (double& x : v) {
    x = g(rng) + 1e-12;
    s += x;
  }
  for (double& x : v) x /= s;
  return objnav::SemanticDist(std::move(v));
}

/// Mostly `label` with the remainder spread over the other categories.
inline objnav::SemanticDist peaked(std::size_t m, std::size_t label, double p) {
  std::vector<double> v(m, (1.0 - p) / static_cast<double>(m - 1));
  v[label] = p;
  return objnav::SemanticDist(std::move(v));
}

inline std::vector<objnav::Sample> samples_at(const std::vector<objnav::Point3>& pts, const objnav::SemanticDist& d) {
  std::vector<objnav::Sample> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back({p, d});
  return out;
}

/// Store holding the points one-for-one (callers keep points farther apart than the merge radius).
inline objnav::PointStore store_of(const std::vector<objnav::Point3>& pts, std::size_t m = 4,
                                   objnav::StoreParams params = {}) {
  objnav::PointStore store(m, params);
  const auto s = samples_at(pts, objnav::SemanticDist::uniform(m));
  store.insert_batch(s, 0);
  return store;
}

/// Lattice with jitter small enough that no two points come within the merge radius.
inline std::vector<objnav::Point3> jittered_lattice(int nx, int ny, int nz, double pitch, double jitter,
                                                    objnav::Point3 origin, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> j(-jitter, jitter);
  std::vector<objnav::Point3> out;
  for (int i = 0; i < nx; ++i) {
    for (int k = 0; k < ny; ++k) {
      for (int l = 0; l < nz; ++l) {
        out.push_back({origin.x + i * pitch + j(rng), origin.y + k * pitch + j(rng), origin.z + l * pitch + j(rng)});
      }
    }
  }
  return out;
}

/// Random blocks and wall segments; the border stays free.
inline objnav::BinaryGrid random_maze(int rows, int cols, std::uint64_t seed, double fill = 0.25) {
  std::mt19937_64 rng(seed);
  objnav::BinaryGrid g(rows, cols, 1);
  std::uniform_int_distribution<int> rr(1, rows - 2);
  std::uniform_int_distribution<int> cc(1, cols - 2);
  std::uniform_int_distribution<int> len(5, rows / 4);
  std::bernoulli_distribution horizontal(0.5);
  const auto target = static_cast<std::size_t>(fill * rows * cols);
  std::size_t blocked = 0;
  while (blocked < target) {
    int r = rr(rng);
    int c = cc(rng);
    const int n = len(rng);
    const bool h = horizontal(rng);
    for (int k = 0; k < n; ++k) {
      const objnav::Cell cell{h ? r : r + k, h ? c + k : c};
      if (cell.row < 1 || cell.col < 1 || cell.row > rows - 2 || cell.col > cols - 2) break;
      for (int t = 0; t < 2; ++t) {
        const objnav::Cell thick{cell.row + (h ? t : 0), cell.col + (h ? 0 : t)};
        if (thick.row > rows - 2 || thick.col > cols - 2) continue;
        if (g.at(thick)) {
          g.set(thick, false);
          ++blocked;
        }
      }
    }
  }
  return g;
}

/// Empty rectangular floor with a ceiling and no walls.
inline objnav::sim::Scene open_floor(double width = 10.0, double depth = 10.0, std::size_t m = 8) {
  objnav::sim::Scene s;
  s.id = "open";
  s.num_categories = m;
  s.floor = {0.0, 0.0, width, depth};
  s.ceiling = 2.5;
  s.spawn = {0.5, 0.5, width - 0.5, depth - 0.5};
  return s;
}

inline objnav::sim::Box box(double x0, double y0, double x1, double y1, double height, std::size_t category) {
  return {{x0, y0, 0.0}, {x1, y1, height}, category};
}

}  // namespace fixtures
