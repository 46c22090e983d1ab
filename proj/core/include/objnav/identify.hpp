#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "objnav/point_store.hpp"

namespace objnav {

struct IdentifyParams {
  /// Confirming points required in the 2-ring of a candidate.
  int min_ring_support = 4;
};

struct Identification {
  std::optional<Point3> goal;
  std::size_t candidate_count = 0;
  std::size_t cluster_size = 0;
};

/// Points above `tau` for `category`, carrying a consistency score, whose 2-ring holds
/// at least min_ring_support points labelled `category` above `tau`. Sorted.
///
/// When `pool` is given only those ids are considered; it must contain every point
/// whose probability for `category` exceeds tau.
std::vector<PointId> identification_candidates(const PointStore& store, std::size_t category, double tau,
                                               const IdentifyParams& params = {},
                                               std::optional<std::span<const PointId>> pool = std::nullopt);

/// Centroid of the largest link-connected candidate cluster, if any.
Identification identify(const PointStore& store, std::size_t category, double tau, const IdentifyParams& params = {},
                        std::optional<std::span<const PointId>> pool = std::nullopt);

inline std::optional<Point3> identify_target(const PointStore& store, std::size_t category, double tau,
                                             const IdentifyParams& params = {}) {
  return identify(store, category, tau, params).goal;
}

}  // namespace objnav
