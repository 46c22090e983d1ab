#include "objnav/identify.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

namespace objnav {

namespace {

bool confirms(const PointStore& store, PointId id, std::size_t category, double tau) {
  return store.argmax_category(id) == category && store.probability(id, category) > tau;
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

}  // namespace

std::vector<PointId> identification_candidates(const PointStore& store, std::size_t category, double tau,
                                               const IdentifyParams& params,
                                               std::optional<std::span<const PointId>> pool) {
  std::vector<PointId> out;
  auto consider = [&](PointId id) {
    if (!(store.probability(id, category) > tau) || !store.consistency(id)) return;
    int support = 0;
    for (PointId q : store.k_ring(id, 2)) {
      if (confirms(store, q, category, tau) && ++support >= params.min_ring_support) break;
    }
    if (support >= params.min_ring_support) out.push_back(id);
  };
  if (pool) {
    for (PointId id : *pool) consider(id);
    std::sort(out.begin(), out.end());
  } else {
    for (std::uint32_t i = 0; i < store.size(); ++i) consider(PointId{i});
  }
  return out;
}

Identification identify(const PointStore& store, std::size_t category, double tau, const IdentifyParams& params,
                        std::optional<std::span<const PointId>> pool) {
  Identification result;
  const std::vector<PointId> candidates = identification_candidates(store, category, tau, params, pool);
  result.candidate_count = candidates.size();
  if (candidates.empty()) return result;

  std::unordered_map<std::uint32_t, std::size_t> slot;
  slot.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) slot.emplace(candidates[i].value, i);
  std::vector<std::size_t> parent(candidates.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    for (int o = 0; o < kNumOctants; ++o) {
      const auto nb = store.link(candidates[i], o);
      if (!nb) continue;
      const auto it = slot.find(nb->value);
      if (it == slot.end()) continue;
      const std::size_t a = find_root(parent, i);
      const std::size_t b = find_root(parent, it->second);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }

  std::vector<std::size_t> count(candidates.size(), 0);
  for (std::size_t i = 0; i < candidates.size(); ++i) ++count[find_root(parent, i)];
  // Roots are the smallest member index, so the first maximum is the cluster holding the smallest id.
  const std::size_t best = static_cast<std::size_t>(std::max_element(count.begin(), count.end()) - count.begin());

  Point3 sum;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (find_root(parent, i) == best) sum = sum + store.position(candidates[i]);
  }
  result.cluster_size = count[best];
  result.goal = sum * (1.0 / static_cast<double>(count[best]));
  return result;
}

}  // namespace objnav
