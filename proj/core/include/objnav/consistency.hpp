#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "objnav/point_store.hpp"

namespace objnav {

/// Maximum KL(sem_id || sem_j) over the present 1-ring octree neighbours j, stored on
/// the point. A point without links is unverifiable and its consistency is cleared.
std::optional<double> update_consistency(PointStore& store, PointId id);

void update_consistency(PointStore& store, std::span<const PointId> ids);

/// Recomputes every point. Debug path; the incremental route only touches dirty points.
void recompute_all_consistency(PointStore& store);

/// Inserts a frame and rescores the points whose semantics or 1-ring changed.
InsertResult integrate_frame(PointStore& store, std::span<const Sample> samples, std::uint32_t step);

}  // namespace objnav
