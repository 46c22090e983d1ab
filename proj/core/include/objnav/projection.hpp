#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "objnav/geometry.hpp"
#include "objnav/point_store.hpp"

namespace objnav {

struct GridParams {
  int size = 240;
  double cell_len = 0.20;
  /// Height band above the floor whose points mark obstacles.
  double obstacle_min_height = 0.10;
  double obstacle_max_height = 1.50;
  double floor_height = 0.0;

  friend bool operator==(const GridParams&, const GridParams&) = default;
};

struct Cell {
  int row = 0;
  int col = 0;

  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

enum class CornerGoal : std::uint8_t { TopLeft, TopRight, BottomLeft, BottomRight };

inline constexpr std::array<CornerGoal, 4> kAllCorners = {CornerGoal::TopLeft, CornerGoal::TopRight,
                                                          CornerGoal::BottomLeft, CornerGoal::BottomRight};

std::string_view to_string(CornerGoal g);
std::optional<CornerGoal> corner_from_string(std::string_view s);
/// Round-robin successor: TL -> TR -> BL -> BR -> TL.
CornerGoal next_corner(CornerGoal g);

/// Agent-centred, world-axis-aligned multi-channel map.
///
/// Cells sit on a world-fixed lattice of pitch cell_len; the agent's lattice cell maps to
/// (size/2, size/2). Rows grow southwards (-y) and columns eastwards (+x).
class Grid2D {
 public:
  Grid2D(GridParams params, std::size_t num_categories, const Pose2& center);

  int size() const { return params_.size; }
  double cell_len() const { return params_.cell_len; }
  const GridParams& params() const { return params_; }
  const Pose2& center_pose() const { return center_; }
  std::size_t num_categories() const { return num_categories_; }
  Cell center_cell() const { return {params_.size / 2, params_.size / 2}; }

  bool in_bounds(Cell c) const { return c.row >= 0 && c.col >= 0 && c.row < params_.size && c.col < params_.size; }
  /// Cell containing world (x, y); empty outside the window.
  std::optional<Cell> cell_of(double x, double y) const;
  /// Like cell_of but without the bounds check.
  Cell unchecked_cell_of(double x, double y) const;
  Point3 cell_center(Cell c) const;

  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.row) * params_.size + c.col; }

  bool obstacle(Cell c) const { return obstacle_[index(c)] != 0; }
  bool explored(Cell c) const { return explored_[index(c)] != 0; }
  float category(std::size_t k, Cell c) const { return categories_[k * cells() + index(c)]; }

  void mark_obstacle(Cell c);
  void mark_explored(Cell c) { explored_[index(c)] = 1; }
  void raise_category(std::size_t k, Cell c, float value);

  std::span<const std::uint8_t> obstacle_mask() const { return obstacle_; }
  std::span<const std::uint8_t> explored_mask() const { return explored_; }
  std::span<const float> category_plane(std::size_t k) const {
    return std::span<const float>(categories_).subspan(k * cells(), cells());
  }

  std::size_t cells() const { return static_cast<std::size_t>(params_.size) * params_.size; }

  /// Little-endian: magic "OGRD", u32 version, u32 size, u32 categories, f64 cell_len,
  /// f64 x, y, heading, then f32 planes (obstacle, explored, categories...) row-major.
  std::string serialize() const;
  static Grid2D deserialize(std::string_view bytes);

  friend bool operator==(const Grid2D&, const Grid2D&) = default;

 private:
  GridParams params_;
  std::size_t num_categories_;
  Pose2 center_;
  std::int64_t origin_x_;
  std::int64_t origin_y_;
  std::vector<std::uint8_t> obstacle_;
  std::vector<std::uint8_t> explored_;
  std::vector<float> categories_;
};

/// Rasterizes the store around the agent. `visited` positions additionally mark cells explored.
Grid2D project(const PointStore& store, const Pose2& agent, const GridParams& params = {},
               std::span<const Point3> visited = {});

/// Extreme cell of the named corner, pulled inward by a 2-cell margin.
Cell corner_cell(const Grid2D& grid, CornerGoal goal);

inline constexpr int kCornerMargin = 2;

}  // namespace objnav
