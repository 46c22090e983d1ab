#include "objnav/consistency.hpp"

#include <algorithm>
#include <array>

namespace objnav {

std::optional<double> update_consistency(PointStore& store, PointId id) {
  const std::size_t m = store.num_categories();
  std::array<double, kMaxCategories> own{};
  std::array<double, kMaxCategories> other{};
  store.normalized_semantics(id, std::span(own.data(), m));

  std::optional<double> worst;
  for (int o = 0; o < kNumOctants; ++o) {
    const auto neighbour = store.link(id, o);
    if (!neighbour) continue;
    store.normalized_semantics(*neighbour, std::span(other.data(), m));
    const double kl = kl_divergence(std::span<const double>(own.data(), m), std::span<const double>(other.data(), m));
    worst = worst ? std::max(*worst, kl) : kl;
  }
  store.set_consistency(id, worst);
  return store.consistency(id);
}

void update_consistency(PointStore& store, std::span<const PointId> ids) {
  for (PointId id : ids) update_consistency(store, id);
}

void recompute_all_consistency(PointStore& store) {
  for (std::uint32_t i = 0; i < store.size(); ++i) update_consistency(store, PointId{i});
}

InsertResult integrate_frame(PointStore& store, std::span<const Sample> samples, std::uint32_t step) {
  InsertResult result = store.insert_batch(samples, step);
  update_consistency(store, result.dirty);
  return result;
}

}  // namespace objnav
