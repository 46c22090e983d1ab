#include "objnav/projection.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace objnav {

static_assert(std::endian::native == std::endian::little, "grid serialization assumes a little-endian host");

namespace {

constexpr char kGridMagic[4] = {'O', 'G', 'R', 'D'};
constexpr std::uint32_t kGridVersion = 1;

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T take(std::string_view& in) {
  if (in.size() < sizeof(T)) throw std::runtime_error("grid: truncated buffer");
  T v;
  std::memcpy(&v, in.data(), sizeof(T));
  in.remove_prefix(sizeof(T));
  return v;
}

}  // namespace

std::string_view to_string(CornerGoal g) {
  switch (g) {
    case CornerGoal::TopLeft: return "top_left";
    case CornerGoal::TopRight: return "top_right";
    case CornerGoal::BottomLeft: return "bottom_left";
    case CornerGoal::BottomRight: return "bottom_right";
  }
  return "unknown";
}

std::optional<CornerGoal> corner_from_string(std::string_view s) {
  for (CornerGoal g : kAllCorners) {
    if (to_string(g) == s) return g;
  }
  return std::nullopt;
}

CornerGoal next_corner(CornerGoal g) { return kAllCorners[(static_cast<int>(g) + 1) % 4]; }

Grid2D::Grid2D(GridParams params, std::size_t num_categories, const Pose2& center)
    : params_(params),
      num_categories_(num_categories),
      center_(center),
      origin_x_(static_cast<std::int64_t>(std::floor(center.x / params.cell_len))),
      origin_y_(static_cast<std::int64_t>(std::floor(center.y / params.cell_len))),
      obstacle_(cells(), 0),
      explored_(cells(), 0),
      categories_(cells() * num_categories, 0.0f) {
  if (params.size <= 2 * kCornerMargin || !(params.cell_len > 0.0)) throw std::invalid_argument("Grid2D: bad geometry");
}

Cell Grid2D::unchecked_cell_of(double x, double y) const {
  const auto gx = static_cast<std::int64_t>(std::floor(x / params_.cell_len));
  const auto gy = static_cast<std::int64_t>(std::floor(y / params_.cell_len));
  const int half = params_.size / 2;
  return {static_cast<int>(half - (gy - origin_y_)), static_cast<int>(half + (gx - origin_x_))};
}

std::optional<Cell> Grid2D::cell_of(double x, double y) const {
  if (!std::isfinite(x) || !std::isfinite(y)) return std::nullopt;
  const double reach = params_.cell_len * (params_.size + 2);
  if (std::abs(x - center_.x) > reach || std::abs(y - center_.y) > reach) return std::nullopt;
  const Cell c = unchecked_cell_of(x, y);
  if (!in_bounds(c)) return std::nullopt;
  return c;
}

Point3 Grid2D::cell_center(Cell c) const {
  const int half = params_.size / 2;
  const std::int64_t gx = origin_x_ + (c.col - half);
  const std::int64_t gy = origin_y_ + (half - c.row);
  return {(static_cast<double>(gx) + 0.5) * params_.cell_len, (static_cast<double>(gy) + 0.5) * params_.cell_len, 0.0};
}

void Grid2D::mark_obstacle(Cell c) {
  obstacle_[index(c)] = 1;
  explored_[index(c)] = 1;
}

void Grid2D::raise_category(std::size_t k, Cell c, float value) {
  float& slot = categories_[k * cells() + index(c)];
  slot = std::max(slot, value);
}

std::string Grid2D::serialize() const {
  std::string out;
  out.reserve(48 + cells() * (2 + num_categories_) * sizeof(float));
  out.append(kGridMagic, 4);
  put(out, kGridVersion);
  put(out, static_cast<std::uint32_t>(params_.size));
  put(out, static_cast<std::uint32_t>(num_categories_));
  put(out, params_.cell_len);
  put(out, center_.x);
  put(out, center_.y);
  put(out, center_.heading);
  for (std::uint8_t v : obstacle_) put(out, static_cast<float>(v));
  for (std::uint8_t v : explored_) put(out, static_cast<float>(v));
  for (float v : categories_) put(out, v);
  return out;
}

Grid2D Grid2D::deserialize(std::string_view in) {
  if (in.size() < 4 || std::memcmp(in.data(), kGridMagic, 4) != 0) throw std::runtime_error("grid: bad magic");
  in.remove_prefix(4);
  if (take<std::uint32_t>(in) != kGridVersion) throw std::runtime_error("grid: unsupported version");
  GridParams params;
  params.size = static_cast<int>(take<std::uint32_t>(in));
  const auto m = take<std::uint32_t>(in);
  params.cell_len = take<double>(in);
  Pose2 center;
  center.x = take<double>(in);
  center.y = take<double>(in);
  center.heading = take<double>(in);
  Grid2D grid(params, m, center);
  for (auto& v : grid.obstacle_) v = take<float>(in) != 0.0f ? 1 : 0;
  for (auto& v : grid.explored_) v = take<float>(in) != 0.0f ? 1 : 0;
  for (auto& v : grid.categories_) v = take<float>(in);
  if (!in.empty()) throw std::runtime_error("grid: trailing bytes");
  return grid;
}

Grid2D project(const PointStore& store, const Pose2& agent, const GridParams& params, std::span<const Point3> visited) {
  const std::size_t m = store.num_categories();
  Grid2D grid(params, m, agent);
  std::array<double, kMaxCategories> sem{};
  for (std::uint32_t i = 0; i < store.size(); ++i) {
    const PointId id{i};
    const Point3& p = store.position(id);
    const auto cell = grid.cell_of(p.x, p.y);
    if (!cell) continue;
    grid.mark_explored(*cell);
    const double h = p.z - params.floor_height;
    if (h >= params.obstacle_min_height && h <= params.obstacle_max_height) grid.mark_obstacle(*cell);
    store.normalized_semantics(id, std::span(sem.data(), m));
    for (std::size_t k = 0; k < m; ++k) grid.raise_category(k, *cell, static_cast<float>(sem[k]));
  }
  for (const Point3& v : visited) {
    if (const auto cell = grid.cell_of(v.x, v.y)) grid.mark_explored(*cell);
  }
  return grid;
}

Cell corner_cell(const Grid2D& grid, CornerGoal goal) {
  const int lo = kCornerMargin;
  const int hi = grid.size() - 1 - kCornerMargin;
  switch (goal) {
    case CornerGoal::TopLeft: return {lo, lo};
    case CornerGoal::TopRight: return {lo, hi};
    case CornerGoal::BottomLeft: return {hi, lo};
    case CornerGoal::BottomRight: return {hi, hi};
  }
  throw std::invalid_argument("corner_cell: unknown corner");
}

}  // namespace objnav
