#pragma once

#include <filesystem>

#include "objnav/point_store.hpp"
#include "objnav/projection.hpp"

namespace objnav::eval {

/// Binary little-endian PLY: float x, y, z; uchar label; float maxprob; float
/// consistency (-1 when absent).
void write_ply(const PointStore& store, const std::filesystem::path& path);

/// 8-bit PGM of the occupancy layers: 0 obstacle, 255 explored free, 128 unexplored.
void write_occupancy_pgm(const Grid2D& grid, const std::filesystem::path& path);

/// 8-bit PGM of one category plane scaled from [0, 1] to [0, 255].
void write_category_pgm(const Grid2D& grid, std::size_t category, const std::filesystem::path& path);

}  // namespace objnav::eval
