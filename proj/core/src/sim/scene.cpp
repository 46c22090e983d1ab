#include "objnav/sim/scene.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "objnav/rng.hpp"

namespace objnav::sim {

using nlohmann::json;

double Rect::distance(double x, double y) const {
  const double dx = std::max({x0 - x, 0.0, x - x1});
  const double dy = std::max({y0 - y, 0.0, y - y1});
  return std::hypot(dx, dy);
}

namespace {

double rect_gap(const Rect& a, const Rect& b) {
  const double dx = std::max({a.x0 - b.x1, 0.0, b.x0 - a.x1});
  const double dy = std::max({a.y0 - b.y1, 0.0, b.y0 - a.y1});
  return std::hypot(dx, dy);
}

bool rects_overlap(const Rect& a, const Rect& b) {
  return a.x0 < b.x1 && b.x0 < a.x1 && a.y0 < b.y1 && b.y0 < a.y1;
}

json point_json(const Point3& p) { return json::array({p.x, p.y, p.z}); }

Point3 point_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw SceneError("expected [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json rect_json(const Rect& r) { return json::array({r.x0, r.y0, r.x1, r.y1}); }

Rect rect_from(const json& j) {
  if (!j.is_array() || j.size() != 4) throw SceneError("expected [x0, y0, x1, y1]");
  Rect r{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
  if (!(r.x1 > r.x0 && r.y1 > r.y0)) throw SceneError("empty rectangle");
  return r;
}

void check_version(const json& doc) {
  if (!doc.contains("format_version") || doc.at("format_version").get<int>() != kFormatVersion) {
    throw SceneError("unsupported format_version");
  }
}

}  // namespace

bool Scene::has_category(std::size_t category) const {
  return std::any_of(boxes.begin(), boxes.end(), [&](const Box& b) { return b.category == category; });
}

std::vector<std::size_t> Scene::object_categories() const {
  std::set<std::size_t> found;
  for (const Box& b : boxes) {
    if (b.category >= kFirstObjectCategory) found.insert(b.category);
  }
  return {found.begin(), found.end()};
}

json to_json(const Scene& scene) {
  json boxes = json::array();
  for (const Box& b : scene.boxes) {
    boxes.push_back({{"min", point_json(b.min)}, {"max", point_json(b.max)}, {"category", b.category}});
  }
  json doc = {{"format_version", kFormatVersion},
              {"id", scene.id},
              {"seed", scene.seed},
              {"num_categories", scene.num_categories},
              {"floor", rect_json(scene.floor)},
              {"boxes", std::move(boxes)},
              {"spawn", rect_json(scene.spawn)}};
  doc["ceiling"] = scene.ceiling ? json(*scene.ceiling) : json(nullptr);
  return doc;
}

Scene scene_from_json(const json& doc) {
  try {
    check_version(doc);
    Scene scene;
    scene.id = doc.at("id").get<std::string>();
    scene.seed = doc.at("seed").get<std::uint64_t>();
    scene.num_categories = doc.at("num_categories").get<std::size_t>();
    if (scene.num_categories < kFirstObjectCategory + 1) throw SceneError("num_categories too small");
    scene.floor = rect_from(doc.at("floor"));
    scene.spawn = rect_from(doc.at("spawn"));
    if (doc.contains("ceiling") && !doc.at("ceiling").is_null()) scene.ceiling = doc.at("ceiling").get<double>();
    for (const json& jb : doc.at("boxes")) {
      Box b{point_from(jb.at("min")), point_from(jb.at("max")), jb.at("category").get<std::size_t>()};
      if (!(b.max.x > b.min.x && b.max.y > b.min.y && b.max.z > b.min.z)) throw SceneError("degenerate box");
      if (b.category >= scene.num_categories || b.category == kBackgroundCategory) {
        throw SceneError("box category out of range");
      }
      if (b.category >= kFirstObjectCategory) {
        const Rect fp = b.footprint();
        if (!scene.floor.contains(fp.x0, fp.y0) || !scene.floor.contains(fp.x1, fp.y1)) {
          throw SceneError("object box outside the floor extent");
        }
      }
      scene.boxes.push_back(b);
    }
    return scene;
  } catch (const json::exception& e) {
    throw SceneError(std::string("malformed scene: ") + e.what());
  }
}

void save_scene(const Scene& scene, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SceneError("cannot write " + path.string());
  out << to_json(scene).dump(1) << '\n';
}

Scene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SceneError(path.string() + ": cannot open");
  try {
    return scene_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw SceneError(path.string() + ": " + e.what());
  } catch (const SceneError& e) {
    throw SceneError(path.string() + ": " + e.what());
  }
}

bool disc_is_free(const Scene& scene, double x, double y, double radius) {
  if (!scene.floor.contains(x, y)) return false;
  for (const Box& b : scene.boxes) {
    if (b.footprint().distance(x, y) < radius) return false;
  }
  return true;
}

ReachabilityGrid::ReachabilityGrid(const Scene& scene, double cell_len, double agent_radius)
    : extent_(scene.floor),
      cell_len_(cell_len),
      rows_(static_cast<int>(std::ceil(scene.floor.depth() / cell_len - 1e-9))),
      cols_(static_cast<int>(std::ceil(scene.floor.width() / cell_len - 1e-9))) {
  if (!(cell_len > 0.0)) throw std::invalid_argument("ReachabilityGrid: cell_len must be positive");
  const std::size_t n = static_cast<std::size_t>(rows_) * cols_;
  free_.assign(n, 0);
  component_.assign(n, -1);
  // Only boxes near a row can block it; bucket by footprint y-range.
  for (int r = 0; r < rows_; ++r) {
    const double y = cell_y(r);
    std::vector<Rect> near;
    for (const Box& b : scene.boxes) {
      const Rect fp = b.footprint();
      if (y > fp.y0 - agent_radius && y < fp.y1 + agent_radius) near.push_back(fp);
    }
    for (int c = 0; c < cols_; ++c) {
      const double x = cell_x(c);
      if (!extent_.contains(x, y)) continue;
      bool ok = true;
      for (const Rect& fp : near) {
        if (fp.distance(x, y) < agent_radius) {
          ok = false;
          break;
        }
      }
      free_[index(r, c)] = ok ? 1 : 0;
    }
  }
  std::deque<std::pair<int, int>> queue;
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      if (!free(r, c) || component_[index(r, c)] >= 0) continue;
      const int label = static_cast<int>(sizes_.size());
      sizes_.push_back(0);
      component_[index(r, c)] = label;
      queue.emplace_back(r, c);
      while (!queue.empty()) {
        const auto [cr, cc] = queue.front();
        queue.pop_front();
        ++sizes_.back();
        for (auto [dr, dc] : {std::pair{-1, 0}, std::pair{1, 0}, std::pair{0, -1}, std::pair{0, 1}}) {
          const int nr = cr + dr;
          const int nc = cc + dc;
          if (nr < 0 || nc < 0 || nr >= rows_ || nc >= cols_) continue;
          if (!free(nr, nc) || component_[index(nr, nc)] >= 0) continue;
          component_[index(nr, nc)] = label;
          queue.emplace_back(nr, nc);
        }
      }
    }
  }
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    if (main_ < 0 || sizes_[i] > sizes_[static_cast<std::size_t>(main_)]) main_ = static_cast<int>(i);
  }
}

std::optional<std::pair<int, int>> ReachabilityGrid::cell_of(double x, double y) const {
  const int c = static_cast<int>(std::floor((x - extent_.x0) / cell_len_));
  const int r = static_cast<int>(std::floor((y - extent_.y0) / cell_len_));
  if (r < 0 || c < 0 || r >= rows_ || c >= cols_) return std::nullopt;
  return std::pair{r, c};
}

std::size_t ReachabilityGrid::free_count() const {
  return static_cast<std::size_t>(std::count(free_.begin(), free_.end(), std::uint8_t{1}));
}

namespace {

constexpr double kMinRoomSide = 2.4;
constexpr double kObjectClearance = 0.6;
constexpr double kDoorKeepout = 1.0;
constexpr double kFreeStandingMargin = 0.7;
constexpr double kObjectReach = 0.8;
constexpr double kMainComponentShare = 0.95;

double snap(double v) { return std::round(v / 0.05) * 0.05; }

class Builder {
 public:
  Builder(const SceneParams& params, std::uint64_t seed) : p_(params), rng_(seed) {}

  std::optional<Scene> build() {
    Scene scene;
    scene.num_categories = p_.num_categories;
    scene.floor = {0.0, 0.0, p_.width, p_.depth};
    scene.ceiling = p_.ceiling;
    const double t = p_.wall_thickness;
    add_wall(scene, {0.0, 0.0, p_.width, t});
    add_wall(scene, {0.0, p_.depth - t, p_.width, p_.depth});
    add_wall(scene, {0.0, t, t, p_.depth - t});
    add_wall(scene, {p_.width - t, t, p_.width, p_.depth - t});
    const Rect interior{t, t, p_.width - t, p_.depth - t};
    scene.spawn = interior;
    rooms_ = {interior};
    for (int k = 1; k < p_.rooms; ++k) {
      if (!split(scene)) return std::nullopt;
    }
    for (std::size_t c = kFirstObjectCategory; c < p_.num_categories; ++c) {
      const int count =
          std::uniform_int_distribution<int>(p_.min_objects_per_category, p_.max_objects_per_category)(rng_);
      for (int i = 0; i < count; ++i) {
        if (!place_object(scene, c)) return std::nullopt;
      }
    }
    return scene;
  }

 private:
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  void add_wall(Scene& scene, const Rect& r) {
    scene.boxes.push_back({{r.x0, r.y0, 0.0}, {r.x1, r.y1, p_.ceiling}, kWallCategory});
  }

  bool split(Scene& scene) {
    auto largest = std::max_element(rooms_.begin(), rooms_.end(), [](const Rect& a, const Rect& b) {
      return a.width() * a.depth() < b.width() * b.depth();
    });
    const Rect room = *largest;
    const bool vertical = room.width() >= room.depth();
    const double lo = vertical ? room.x0 : room.y0;
    const double len = vertical ? room.width() : room.depth();
    const double span_lo = vertical ? room.y0 : room.x0;
    const double span_hi = vertical ? room.y1 : room.x1;
    const double t = p_.wall_thickness;
    if (len < 2.0 * kMinRoomSide + t || span_hi - span_lo < p_.door_width + 0.6) return false;
    for (int tries = 0; tries < 20; ++tries) {
      const double s = snap(lo + uniform(0.35, 0.65) * len);
      const Rect wall = vertical ? Rect{s - t / 2, room.y0, s + t / 2, room.y1} : Rect{room.x0, s - t / 2, room.x1, s + t / 2};
      const bool blocks_door = std::any_of(door_zones_.begin(), door_zones_.end(),
                                           [&](const Rect& z) { return rects_overlap(z, wall); });
      if (blocks_door) continue;
      const double g = snap(uniform(span_lo + 0.3, span_hi - 0.3 - p_.door_width));
      const double g1 = g + p_.door_width;
      if (vertical) {
        if (g > room.y0) add_wall(scene, {s - t / 2, room.y0, s + t / 2, g});
        if (g1 < room.y1) add_wall(scene, {s - t / 2, g1, s + t / 2, room.y1});
        door_zones_.push_back({s - kDoorKeepout, g - 0.2, s + kDoorKeepout, g1 + 0.2});
        *largest = {room.x0, room.y0, s - t / 2, room.y1};
        rooms_.push_back({s + t / 2, room.y0, room.x1, room.y1});
      } else {
        if (g > room.x0) add_wall(scene, {room.x0, s - t / 2, g, s + t / 2});
        if (g1 < room.x1) add_wall(scene, {g1, s - t / 2, room.x1, s + t / 2});
        door_zones_.push_back({g - 0.2, s - kDoorKeepout, g1 + 0.2, s + kDoorKeepout});
        *largest = {room.x0, room.y0, room.x1, s - t / 2};
        rooms_.push_back({room.x0, s + t / 2, room.x1, room.y1});
      }
      return true;
    }
    return false;
  }

  bool place_object(Scene& scene, std::size_t category) {
    for (int tries = 0; tries < 50; ++tries) {
      const Rect& room = rooms_[std::uniform_int_distribution<std::size_t>(0, rooms_.size() - 1)(rng_)];
      const double w = snap(uniform(0.4, 0.8));
      const double d = snap(uniform(0.4, 0.8));
      const double h = snap(uniform(0.4, 1.2));
      Rect fp;
      if (std::bernoulli_distribution(0.5)(rng_)) {
        const int side = std::uniform_int_distribution<int>(0, 3)(rng_);
        const double along_x = snap(uniform(room.x0, room.x1 - w));
        const double along_y = snap(uniform(room.y0, room.y1 - d));
        switch (side) {
          case 0: fp = {along_x, room.y0, along_x + w, room.y0 + d}; break;
          case 1: fp = {along_x, room.y1 - d, along_x + w, room.y1}; break;
          case 2: fp = {room.x0, along_y, room.x0 + w, along_y + d}; break;
          default: fp = {room.x1 - w, along_y, room.x1, along_y + d}; break;
        }
      } else {
        if (room.width() < w + 2 * kFreeStandingMargin || room.depth() < d + 2 * kFreeStandingMargin) continue;
        const double x = snap(uniform(room.x0 + kFreeStandingMargin, room.x1 - kFreeStandingMargin - w));
        const double y = snap(uniform(room.y0 + kFreeStandingMargin, room.y1 - kFreeStandingMargin - d));
        fp = {x, y, x + w, y + d};
      }
      if (fp.x0 < room.x0 - 1e-9 || fp.y0 < room.y0 - 1e-9 || fp.x1 > room.x1 + 1e-9 || fp.y1 > room.y1 + 1e-9) continue;
      const bool near_door =
          std::any_of(door_zones_.begin(), door_zones_.end(), [&](const Rect& z) { return rects_overlap(z, fp); });
      if (near_door) continue;
      const bool crowded = std::any_of(objects_.begin(), objects_.end(),
                                       [&](const Rect& o) { return rect_gap(o, fp) < kObjectClearance; });
      if (crowded) continue;
      objects_.push_back(fp);
      scene.boxes.push_back({{fp.x0, fp.y0, 0.0}, {fp.x1, fp.y1, h}, category});
      return true;
    }
    return false;
  }

  const SceneParams& p_;
  std::mt19937_64 rng_;
  std::vector<Rect> rooms_;
  std::vector<Rect> door_zones_;
  std::vector<Rect> objects_;
};

bool layout_is_valid(const Scene& scene, double agent_radius) {
  const ReachabilityGrid grid(scene, 0.05, agent_radius);
  if (grid.main_component() < 0) return false;
  const int main = grid.main_component();
  if (static_cast<double>(grid.component_size(main)) < kMainComponentShare * static_cast<double>(grid.free_count())) {
    return false;
  }
  for (const Box& b : scene.boxes) {
    if (b.category < kFirstObjectCategory) continue;
    const Rect fp = b.footprint();
    bool reachable = false;
    const auto lo = grid.cell_of(fp.x0 - kObjectReach, fp.y0 - kObjectReach);
    const auto hi = grid.cell_of(fp.x1 + kObjectReach, fp.y1 + kObjectReach);
    const int r0 = lo ? lo->first : 0;
    const int c0 = lo ? lo->second : 0;
    const int r1 = hi ? hi->first : grid.rows() - 1;
    const int c1 = hi ? hi->second : grid.cols() - 1;
    for (int r = std::max(r0, 0); r <= r1 && !reachable; ++r) {
      for (int c = std::max(c0, 0); c <= c1 && !reachable; ++c) {
        if (grid.component(r, c) == main && fp.distance(grid.cell_x(c), grid.cell_y(r)) <= kObjectReach) {
          reachable = true;
        }
      }
    }
    if (!reachable) return false;
  }
  return true;
}

}  // namespace

Scene generate_scene(const SceneParams& params, std::uint64_t seed, std::string id) {
  if (params.rooms < 1 || params.num_categories < kFirstObjectCategory + 1 || params.num_categories > 16 ||
      params.min_objects_per_category < 0 || params.max_objects_per_category < params.min_objects_per_category ||
      !(params.width >= 3.0) || !(params.depth >= 3.0) || params.max_attempts < 1) {
    throw SceneError("generate_scene: invalid parameters");
  }
  for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
    Builder builder(params, mix_seed(seed, 0x5CE7E, static_cast<std::uint64_t>(attempt)));
    std::optional<Scene> scene = builder.build();
    if (!scene || !layout_is_valid(*scene, params.agent_radius)) continue;
    scene->id = std::move(id);
    scene->seed = seed;
    return *std::move(scene);
  }
  throw SceneError("generate_scene: no valid layout after " + std::to_string(params.max_attempts) + " attempts");
}

json to_json(const EpisodeSpec& e) {
  return {{"format_version", kFormatVersion},
          {"episode_id", e.episode_id},
          {"scene_id", e.scene_id},
          {"start", {{"x", e.start.x}, {"y", e.start.y}, {"heading", e.start.heading}}},
          {"target_category", e.target_category},
          {"success_radius", e.success_radius},
          {"budget", e.budget}};
}

EpisodeSpec episode_from_json(const json& doc) {
  try {
    check_version(doc);
    EpisodeSpec e;
    e.episode_id = doc.at("episode_id").get<std::string>();
    e.scene_id = doc.at("scene_id").get<std::string>();
    const json& s = doc.at("start");
    e.start = {s.at("x").get<double>(), s.at("y").get<double>(), s.at("heading").get<double>()};
    e.target_category = doc.at("target_category").get<std::size_t>();
    e.success_radius = doc.value("success_radius", 1.0);
    e.budget = doc.value("budget", 500);
    if (e.target_category < kFirstObjectCategory) throw SceneError("target category is not an object category");
    if (!(e.success_radius > 0.0) || e.budget <= 0) throw SceneError("invalid success radius or budget");
    return e;
  } catch (const json::exception& ex) {
    throw SceneError(std::string("malformed episode: ") + ex.what());
  }
}

std::vector<EpisodeSpec> load_episodes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SceneError(path.string() + ": cannot open");
  std::vector<EpisodeSpec> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(episode_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw SceneError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void save_episodes(const std::vector<EpisodeSpec>& episodes, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SceneError("cannot write " + path.string());
  for (const EpisodeSpec& e : episodes) out << to_json(e).dump() << '\n';
}

}  // namespace objnav::sim
