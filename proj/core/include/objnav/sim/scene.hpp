#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "objnav/geometry.hpp"

namespace objnav::sim {

inline constexpr int kFormatVersion = 1;

/// Floor and ceiling hits.
inline constexpr std::size_t kBackgroundCategory = 0;
inline constexpr std::size_t kWallCategory = 1;
/// Categories from here up are objects and may be navigation targets.
inline constexpr std::size_t kFirstObjectCategory = 2;

struct Rect {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double width() const { return x1 - x0; }
  double depth() const { return y1 - y0; }
  bool contains(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
  /// Planar distance from (x, y) to the rectangle, zero inside.
  double distance(double x, double y) const;

  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Axis-aligned box resting in the scene.
struct Box {
  Point3 min;
  Point3 max;
  std::size_t category = kWallCategory;

  Rect footprint() const { return {min.x, min.y, max.x, max.y}; }

  friend bool operator==(const Box& a, const Box& b) {
    return a.min.x == b.min.x && a.min.y == b.min.y && a.min.z == b.min.z && a.max.x == b.max.x &&
           a.max.y == b.max.y && a.max.z == b.max.z && a.category == b.category;
  }
};

struct Scene {
  std::string id;
  std::uint64_t seed = 0;
  std::size_t num_categories = 8;
  Rect floor;
  /// Height of the ceiling plane; absent for an open sky.
  std::optional<double> ceiling;
  std::vector<Box> boxes;
  Rect spawn;

  bool has_category(std::size_t category) const;
  std::vector<std::size_t> object_categories() const;

  friend bool operator==(const Scene&, const Scene&) = default;
};

class SceneError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json to_json(const Scene& scene);
/// Throws SceneError on a malformed document or a violated scene invariant.
Scene scene_from_json(const nlohmann::json& doc);

void save_scene(const Scene& scene, const std::filesystem::path& path);
/// Throws SceneError naming the file.
Scene load_scene(const std::filesystem::path& path);

struct SceneParams {
  double width = 12.0;
  double depth = 12.0;
  int rooms = 3;
  int min_objects_per_category = 1;
  int max_objects_per_category = 3;
  std::size_t num_categories = 8;
  double door_width = 1.0;
  double wall_thickness = 0.10;
  double ceiling = 2.5;
  double agent_radius = 0.18;
  int max_attempts = 100;
};

/// Seeded box-world layout: outer walls, interior walls with doors, labeled objects.
/// Throws SceneError when no valid layout is found within params.max_attempts.
Scene generate_scene(const SceneParams& params, std::uint64_t seed, std::string id);

/// Occupancy of agent centre positions on a regular grid over the floor.
class ReachabilityGrid {
 public:
  ReachabilityGrid(const Scene& scene, double cell_len, double agent_radius);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double cell_len() const { return cell_len_; }
  const Rect& extent() const { return extent_; }

  /// Cell (row, col) has row along +y and col along +x.
  double cell_x(int col) const { return extent_.x0 + (col + 0.5) * cell_len_; }
  double cell_y(int row) const { return extent_.y0 + (row + 0.5) * cell_len_; }
  std::optional<std::pair<int, int>> cell_of(double x, double y) const;

  bool free(int row, int col) const { return free_[index(row, col)] != 0; }
  /// Component label of a free cell, -1 for occupied cells.
  int component(int row, int col) const { return component_[index(row, col)]; }
  /// Label of the component with the most cells.
  int main_component() const { return main_; }
  std::size_t component_size(int label) const { return sizes_.at(static_cast<std::size_t>(label)); }
  std::size_t free_count() const;

 private:
  std::size_t index(int row, int col) const { return static_cast<std::size_t>(row) * cols_ + col; }

  Rect extent_;
  double cell_len_;
  int rows_;
  int cols_;
  std::vector<std::uint8_t> free_;
  std::vector<int> component_;
  std::vector<std::size_t> sizes_;
  int main_ = -1;
};

/// True when a disc of `radius` centred at (x, y) overlaps no box.
bool disc_is_free(const Scene& scene, double x, double y, double radius);

struct EpisodeSpec {
  std::string episode_id;
  std::string scene_id;
  Pose2 start;
  std::size_t target_category = kFirstObjectCategory;
  double success_radius = 1.0;
  int budget = 500;

  friend bool operator==(const EpisodeSpec&, const EpisodeSpec&) = default;
};

nlohmann::json to_json(const EpisodeSpec& episode);
EpisodeSpec episode_from_json(const nlohmann::json& doc);

/// JSON lines. Throws SceneError naming the file and line on malformed input.
std::vector<EpisodeSpec> load_episodes(const std::filesystem::path& path);
void save_episodes(const std::vector<EpisodeSpec>& episodes, const std::filesystem::path& path);

/// Episodes with reachable starts at least `min_geodesic` meters from the success region.
std::vector<EpisodeSpec> generate_episodes(const Scene& scene, std::size_t count, std::uint64_t seed,
                                           double min_geodesic = 1.0);

}  // namespace objnav::sim
