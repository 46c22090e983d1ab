#include "objnav/eval/export.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace objnav::eval {

static_assert(std::endian::native == std::endian::little, "PLY writer assumes a little-endian host");

namespace {

std::ofstream open_binary(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

template <typename T>
void put(std::ofstream& out, T v) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  out.write(bytes, sizeof(T));
}

void write_pgm(const std::filesystem::path& path, int size, const std::vector<std::uint8_t>& pixels) {
  std::ofstream out = open_binary(path);
  out << "P5\n" << size << ' ' << size << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
}

}  // namespace

void write_ply(const PointStore& store, const std::filesystem::path& path) {
  std::ofstream out = open_binary(path);
  out << "ply\nformat binary_little_endian 1.0\nelement vertex " << store.size()
      << "\nproperty float x\nproperty float y\nproperty float z\nproperty uchar label\n"
         "property float maxprob\nproperty float consistency\nend_header\n";
  std::vector<double> sem(store.num_categories());
  for (std::uint32_t i = 0; i < store.size(); ++i) {
    const PointId id{i};
    const Point3 p = store.position(id);
    store.normalized_semantics(id, sem);
    const auto top = std::max_element(sem.begin(), sem.end());
    const std::optional<double> consistency = store.consistency(id);
    put(out, static_cast<float>(p.x));
    put(out, static_cast<float>(p.y));
    put(out, static_cast<float>(p.z));
    put(out, static_cast<std::uint8_t>(top - sem.begin()));
    put(out, static_cast<float>(*top));
    put(out, consistency ? static_cast<float>(*consistency) : -1.0f);
  }
}

void write_occupancy_pgm(const Grid2D& grid, const std::filesystem::path& path) {
  const int n = grid.size();
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(n) * n, 128);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      auto& px = pixels[static_cast<std::size_t>(r) * n + c];
      if (grid.obstacle({r, c})) px = 0;
      else if (grid.explored({r, c})) px = 255;
    }
  }
  write_pgm(path, n, pixels);
}

void write_category_pgm(const Grid2D& grid, std::size_t category, const std::filesystem::path& path) {
  const auto plane = grid.category_plane(category);
  std::vector<std::uint8_t> pixels(plane.size());
  std::transform(plane.begin(), plane.end(), pixels.begin(), [](float v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
  });
  write_pgm(path, grid.size(), pixels);
}

}  // namespace objnav::eval
