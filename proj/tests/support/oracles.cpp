#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <queue>
#include <set>

namespace oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dist(const Point3& a, const Point3& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
}

int octant(const Point3& from, const Point3& to) {
  int o = 0;
  if (to.x >= from.x) o += 1;
  if (to.y >= from.y) o += 2;
  if (to.z >= from.z) o += 4;
  return o;
}

std::vector<double> probs_of(const objnav::PointStore& store, std::uint32_t id) {
  const auto sem = store.semantics(objnav::PointId{id});
  return {sem.probs().begin(), sem.probs().end()};
}

double kl(std::vector<double> p, std::vector<double> q) {
  auto prep = [](std::vector<double>& v) {
    double s = 0.0;
    for (double& x : v) {
      x = std::max(x, 1e-6);
      s += x;
    }
    for (double& x : v) x /= s;
  };
  prep(p);
  prep(q);
  double out = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) out += p[i] * std::log(p[i] / q[i]);
  return std::max(out, 0.0);
}

}  // namespace

std::vector<std::uint32_t> neighbors(std::span<const Point3> points, const Point3& p, double r) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < points.size(); ++i) {
    if (dist(points[i], p) <= r) out.push_back(i);
  }
  return out;
}

std::array<std::optional<std::uint32_t>, 8> octant_links(std::span<const Point3> points, std::uint32_t id,
                                                         double link_min, double link_max) {
  std::array<std::optional<std::uint32_t>, 8> best{};
  std::array<double, 8> best_d;
  best_d.fill(kInf);
  for (std::uint32_t j = 0; j < points.size(); ++j) {
    if (j == id) continue;
    const double d = dist(points[id], points[j]);
    if (d < link_min || d > link_max) continue;
    const int o = octant(points[id], points[j]);
    // Ascending j, so strict < keeps the smaller index on ties.
    if (d < best_d[o]) {
      best_d[o] = d;
      best[o] = j;
    }
  }
  return best;
}

LinkGraph links_of(const objnav::PointStore& store) {
  LinkGraph g(store.size());
  for (std::uint32_t i = 0; i < store.size(); ++i) {
    for (int o = 0; o < 8; ++o) {
      if (auto l = store.link(objnav::PointId{i}, o)) g[i][o] = l->value;
    }
  }
  return g;
}

std::vector<std::uint32_t> k_ring(const LinkGraph& graph, std::uint32_t start, int k) {
  std::map<std::uint32_t, int> depth{{start, 0}};
  std::deque<std::uint32_t> queue{start};
  while (!queue.empty()) {
    const std::uint32_t u = queue.front();
    queue.pop_front();
    if (depth[u] == k) continue;
    for (const auto& l : graph[u]) {
      if (l && !depth.contains(*l)) {
        depth[*l] = depth[u] + 1;
        queue.push_back(*l);
      }
    }
  }
  std::vector<std::uint32_t> out;
  for (const auto& [id, d] : depth) {
    if (id != start) out.push_back(id);
  }
  return out;
}

std::optional<double> consistency(const objnav::PointStore& store, const LinkGraph& graph, std::uint32_t id) {
  std::optional<double> worst;
  const auto p = probs_of(store, id);
  for (const auto& l : graph[id]) {
    if (!l) continue;
    const double v = kl(p, probs_of(store, *l));
    if (!worst || v > *worst) worst = v;
  }
  return worst;
}

ClusterResult identify(const objnav::PointStore& store, std::size_t category, double tau, int min_support) {
  const LinkGraph graph = links_of(store);
  const std::size_t n = store.size();
  std::vector<char> confirms(n, 0);
  std::vector<double> prob(n, 0.0);
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto p = probs_of(store, i);
    prob[i] = p[category];
    std::size_t top = 0;
    for (std::size_t k = 1; k < p.size(); ++k) {
      if (p[k] > p[top]) top = k;
    }
    confirms[i] = top == category && p[category] > tau;
  }

  ClusterResult out;
  std::vector<char> is_candidate(n, 0);
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!(prob[i] > tau) || !store.consistency(objnav::PointId{i})) continue;
    int support = 0;
    for (std::uint32_t q : k_ring(graph, i, 2)) support += confirms[q];
    if (support >= min_support) {
      out.candidates.push_back(i);
      is_candidate[i] = 1;
    }
  }
  if (out.candidates.empty()) return out;

  std::vector<std::set<std::uint32_t>> adj(n);
  for (std::uint32_t i : out.candidates) {
    for (const auto& l : graph[i]) {
      if (l && is_candidate[*l]) {
        adj[i].insert(*l);
        adj[*l].insert(i);
      }
    }
  }
  std::vector<char> seen(n, 0);
  std::vector<std::uint32_t> best;
  for (std::uint32_t s : out.candidates) {
    if (seen[s]) continue;
    std::vector<std::uint32_t> comp;
    std::vector<std::uint32_t> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      const std::uint32_t u = stack.back();
      stack.pop_back();
      comp.push_back(u);
      for (std::uint32_t v : adj[u]) {
        if (!seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
      }
    }
    // Candidates are visited in ascending order, so the first largest holds the smallest id.
    if (comp.size() > best.size()) best = comp;
  }
  Point3 sum;
  for (std::uint32_t i : best) sum = sum + store.position(objnav::PointId{i});
  out.centroid = sum * (1.0 / static_cast<double>(best.size()));
  out.cluster_size = best.size();
  return out;
}

std::vector<double> dijkstra8(const objnav::BinaryGrid& traversable, objnav::Cell goal, double cell_len) {
  std::vector<double> d(traversable.cells.size(), kInf);
  if (!traversable.in_bounds(goal) || !traversable.at(goal)) return d;
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  d[traversable.index(goal)] = 0.0;
  pq.push({0.0, traversable.index(goal)});
  while (!pq.empty()) {
    const auto [du, u] = pq.top();
    pq.pop();
    if (du > d[u]) continue;
    const int r = static_cast<int>(u / traversable.cols);
    const int c = static_cast<int>(u % traversable.cols);
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        const objnav::Cell v{r + dr, c + dc};
        if (!traversable.in_bounds(v) || !traversable.at(v)) continue;
        // No squeezing between two blocked cells on a diagonal.
        if (dr != 0 && dc != 0 && (!traversable.at({r + dr, c}) || !traversable.at({r, c + dc}))) continue;
        const double w = (dr != 0 && dc != 0 ? std::sqrt(2.0) : 1.0) * cell_len;
        const std::size_t vi = traversable.index(v);
        if (du + w < d[vi]) {
          d[vi] = du + w;
          pq.push({d[vi], vi});
        }
      }
    }
  }
  return d;
}

std::optional<RayHit> cast(const objnav::sim::Scene& scene, const objnav::sim::Ray& ray, double max_depth) {
  constexpr double kSlack = 1e-9;
  const double o[3] = {ray.origin.x, ray.origin.y, ray.origin.z};
  const double dv[3] = {ray.direction.x, ray.direction.y, ray.direction.z};
  std::vector<std::pair<double, std::uint8_t>> hits;
  for (const auto& b : scene.boxes) {
    const double lo[3] = {b.min.x, b.min.y, b.min.z};
    const double hi[3] = {b.max.x, b.max.y, b.max.z};
    for (int a = 0; a < 3; ++a) {
      if (dv[a] == 0.0) continue;
      for (double plane : {lo[a], hi[a]}) {
        const double t = (plane - o[a]) / dv[a];
        if (!(t > 0.0)) continue;
        bool inside = true;
        for (int b2 = 0; b2 < 3; ++b2) {
          if (b2 == a) continue;
          const double x = o[b2] + t * dv[b2];
          if (x < lo[b2] - kSlack || x > hi[b2] + kSlack) inside = false;
        }
        if (inside) hits.emplace_back(t, static_cast<std::uint8_t>(b.category));
      }
    }
  }
  if (dv[2] < 0.0) hits.emplace_back(-o[2] / dv[2], objnav::sim::kBackgroundCategory);
  if (scene.ceiling && dv[2] > 0.0) hits.emplace_back((*scene.ceiling - o[2]) / dv[2], objnav::sim::kBackgroundCategory);
  if (hits.empty()) return std::nullopt;
  double best = kInf;
  for (const auto& h : hits) best = std::min(best, h.first);
  if (best > max_depth) return std::nullopt;
  RayHit out{best, {}};
  for (const auto& h : hits) {
    if (h.first <= best + 1e-7) out.labels.push_back(h.second);
  }
  return out;
}

std::vector<int> flood_fill(const std::vector<std::uint8_t>& free, int rows, int cols) {
  std::vector<int> comp(free.size(), -1);
  int next = 0;
  for (std::size_t s = 0; s < free.size(); ++s) {
    if (!free[s] || comp[s] >= 0) continue;
    std::deque<std::size_t> q{s};
    comp[s] = next;
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop_front();
      const int r = static_cast<int>(u) / cols;
      const int c = static_cast<int>(u) % cols;
      const int nr[4] = {r - 1, r + 1, r, r};
      const int nc[4] = {c, c, c - 1, c + 1};
      for (int k = 0; k < 4; ++k) {
        if (nr[k] < 0 || nc[k] < 0 || nr[k] >= rows || nc[k] >= cols) continue;
        const std::size_t v = static_cast<std::size_t>(nr[k]) * cols + nc[k];
        if (free[v] && comp[v] < 0) {
          comp[v] = next;
          q.push_back(v);
        }
      }
    }
    ++next;
  }
  return comp;
}

std::vector<std::uint8_t> bin_obstacles(const objnav::PointStore& store, const objnav::Pose2& agent,
                                        const objnav::GridParams& params) {
  const int n = params.size;
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(n) * n, 0);
  const long ax = static_cast<long>(std::floor(agent.x / params.cell_len));
  const long ay = static_cast<long>(std::floor(agent.y / params.cell_len));
  for (std::uint32_t i = 0; i < store.size(); ++i) {
    const Point3 p = store.position(objnav::PointId{i});
    const double h = p.z - params.floor_height;
    if (h < params.obstacle_min_height || h > params.obstacle_max_height) continue;
    const long col = n / 2 + (static_cast<long>(std::floor(p.x / params.cell_len)) - ax);
    const long row = n / 2 - (static_cast<long>(std::floor(p.y / params.cell_len)) - ay);
    if (row < 0 || col < 0 || row >= n || col >= n) continue;
    mask[static_cast<std::size_t>(row) * n + col] = 1;
  }
  return mask;
}

std::size_t corridor_count(const objnav::Grid2D& grid, objnav::CornerGoal goal, int half_width) {
  const objnav::Cell a = grid.center_cell();
  const objnav::Cell b = objnav::corner_cell(grid, goal);
  const double vx = b.col - a.col;
  const double vy = b.row - a.row;
  std::size_t count = 0;
  for (int r = 0; r < grid.size(); ++r) {
    for (int c = 0; c < grid.size(); ++c) {
      const double wx = c - a.col;
      const double wy = r - a.row;
      const double t = std::clamp((wx * vx + wy * vy) / (vx * vx + vy * vy), 0.0, 1.0);
      const double d = std::hypot(wx - t * vx, wy - t * vy);
      if (d > half_width) continue;
      if (!grid.obstacle({r, c}) && !grid.explored({r, c})) ++count;
    }
  }
  return count;
}

}  // namespace oracle
