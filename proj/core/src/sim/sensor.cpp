#include "objnav/sim/sensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "objnav/rng.hpp"

namespace objnav::sim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kOrderTag = 0x0DE7;
constexpr std::uint64_t kDepthTag = 0xDE9;

double unit_uniform(std::uint64_t stream) { return static_cast<double>(splitmix64(stream) >> 11) * 0x1.0p-53; }

struct Frame {
  Point3 forward;
  Point3 right;
};

Frame frame_of(const Pose2& pose) {
  const double c = std::cos(pose.heading);
  const double s = std::sin(pose.heading);
  return {{c, s, 0.0}, {s, -c, 0.0}};
}

// Lazily drawn uniform permutation of pixel indices.
class PixelOrder {
 public:
  PixelOrder(std::size_t n, std::uint64_t seed) : order_(n), rng_(mix_seed(seed, kOrderTag)) {
    std::iota(order_.begin(), order_.end(), 0u);
  }
  std::size_t size() const { return order_.size(); }
  std::uint32_t operator[](std::size_t i) {
    const std::size_t j = std::uniform_int_distribution<std::size_t>(i, order_.size() - 1)(rng_);
    std::swap(order_[i], order_[j]);
    return order_[i];
  }

 private:
  std::vector<std::uint32_t> order_;
  std::mt19937_64 rng_;
};

float noisy_depth(float depth, const DepthNoise& noise, double max_depth, std::uint64_t frame_seed, std::size_t pixel) {
  std::mt19937_64 rng(mix_seed(noise.seed, frame_seed, pixel, kDepthTag));
  const double sigma = noise.base + noise.slope * depth;
  const double d = depth + std::normal_distribution<double>(0.0, sigma)(rng);
  if (d > max_depth) return kDepthSentinel;
  return static_cast<float>(std::max(d, 1e-3));
}

Sample unproject(const CameraModel& camera, const Pose2& pose, std::size_t pixel, float depth,
                 std::vector<double> probs) {
  const int u = static_cast<int>(pixel % static_cast<std::size_t>(camera.width));
  const int v = static_cast<int>(pixel / static_cast<std::size_t>(camera.width));
  const Ray ray = pixel_ray(camera, pose, u, v);
  return {ray.origin + ray.direction * static_cast<double>(depth), SemanticDist(std::move(probs))};
}

}  // namespace

void CameraModel::validate() const {
  if (width <= 0 || height <= 0) throw std::invalid_argument("CameraModel: non-positive size");
  if (!(hfov_deg > 0.0 && hfov_deg < 180.0)) throw std::invalid_argument("CameraModel: FOV outside (0, 180)");
  if (!(max_depth > 0.0)) throw std::invalid_argument("CameraModel: non-positive max depth");
}

double CameraModel::focal() const { return 0.5 * width / std::tan(0.5 * deg_to_rad(hfov_deg)); }

Ray pixel_ray(const CameraModel& camera, const Pose2& pose, int u, int v) {
  const double f = camera.focal();
  const double xc = (u + 0.5 - 0.5 * camera.width) / f;
  const double yc = (v + 0.5 - 0.5 * camera.height) / f;
  const Frame fr = frame_of(pose);
  return {{pose.x, pose.y, camera.mount_height}, fr.forward + fr.right * xc + Point3{0.0, 0.0, -yc}};
}

std::optional<std::pair<double, double>> project_point(const CameraModel& camera, const Pose2& pose, const Point3& p) {
  const Frame fr = frame_of(pose);
  const Point3 d = p - Point3{pose.x, pose.y, camera.mount_height};
  const double z = dot(d, fr.forward);
  if (!(z > 0.0)) return std::nullopt;
  const double f = camera.focal();
  const double u = dot(d, fr.right) / z * f + 0.5 * camera.width - 0.5;
  const double v = -d.z / z * f + 0.5 * camera.height - 0.5;
  return std::pair{u, v};
}

Hit cast_ray(const Scene& scene, const Ray& ray, double max_depth) {
  const double o[3] = {ray.origin.x, ray.origin.y, ray.origin.z};
  const double d[3] = {ray.direction.x, ray.direction.y, ray.direction.z};
  double best = kInf;
  std::size_t label = kNoLabel;
  for (const Box& b : scene.boxes) {
    const double lo[3] = {b.min.x, b.min.y, b.min.z};
    const double hi[3] = {b.max.x, b.max.y, b.max.z};
    double t0 = -kInf;
    double t1 = kInf;
    bool miss = false;
    for (int a = 0; a < 3 && !miss; ++a) {
      if (d[a] == 0.0) {
        miss = o[a] < lo[a] || o[a] > hi[a];
        continue;
      }
      double ta = (lo[a] - o[a]) / d[a];
      double tb = (hi[a] - o[a]) / d[a];
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
      miss = t0 > t1;
    }
    if (miss || !(t0 > 0.0)) continue;
    if (t0 < best) {
      best = t0;
      label = b.category;
    }
  }
  if (d[2] < 0.0) {
    const double t = -o[2] / d[2];
    if (t > 0.0 && t < best) {
      best = t;
      label = kBackgroundCategory;
    }
  }
  if (scene.ceiling && d[2] > 0.0) {
    const double t = (*scene.ceiling - o[2]) / d[2];
    if (t > 0.0 && t < best) {
      best = t;
      label = kBackgroundCategory;
    }
  }
  if (!(best <= max_depth)) return {};
  return {static_cast<float>(best), static_cast<std::uint8_t>(label)};
}

RenderResult render(const Scene& scene, const Pose2& pose, const CameraModel& camera) {
  camera.validate();
  RenderResult out{camera.width, camera.height, std::vector<float>(camera.pixel_count(), kDepthSentinel),
                   std::vector<std::uint8_t>(camera.pixel_count(), kNoLabel)};
  for (int v = 0; v < camera.height; ++v) {
    for (int u = 0; u < camera.width; ++u) {
      const Hit h = cast_ray(scene, pixel_ray(camera, pose, u, v), camera.max_depth);
      const std::size_t i = static_cast<std::size_t>(v) * camera.width + u;
      out.depth[i] = h.depth;
      out.labels[i] = h.label;
    }
  }
  return out;
}

void SemanticNoiseModel::validate() const {
  const std::size_t m = confusion.size();
  if (m < 2 || m > kMaxCategories) throw std::invalid_argument("SemanticNoiseModel: bad category count");
  for (std::size_t r = 0; r < m; ++r) {
    const auto& row = confusion[r];
    if (row.size() != m) throw std::invalid_argument("SemanticNoiseModel: confusion is not square");
    double sum = 0.0;
    for (double p : row) {
      if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument("SemanticNoiseModel: bad probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("SemanticNoiseModel: row does not sum to 1");
    for (std::size_t c = 0; c < m; ++c) {
      if (c != r && row[c] > row[r]) throw std::invalid_argument("SemanticNoiseModel: diagonal not dominant");
    }
  }
  if (!(kappa > 0.0)) throw std::invalid_argument("SemanticNoiseModel: kappa must be positive");
  if (!(wrong_kappa_scale > 0.0)) throw std::invalid_argument("SemanticNoiseModel: scale must be positive");
}

SemanticNoiseModel SemanticNoiseModel::oracle(std::size_t m, std::uint64_t seed) {
  return diagonal(m, 1.0, kInf, seed);
}

SemanticNoiseModel SemanticNoiseModel::diagonal(std::size_t m, double diag, double kappa, std::uint64_t seed) {
  if (m < 2) throw std::invalid_argument("SemanticNoiseModel: need at least two categories");
  SemanticNoiseModel model;
  const double off = (1.0 - diag) / static_cast<double>(m - 1);
  model.confusion.assign(m, std::vector<double>(m, off));
  for (std::size_t i = 0; i < m; ++i) model.confusion[i][i] = diag;
  model.kappa = kappa;
  model.seed = seed;
  model.validate();
  return model;
}

std::vector<double> pixel_distribution(const SemanticNoiseModel& noise, std::uint8_t true_label, std::uint64_t stream) {
  const std::size_t m = noise.categories();
  if (true_label >= m) return std::vector<double>(m, 1.0 / static_cast<double>(m));
  const auto& row = noise.confusion[true_label];
  const double u = unit_uniform(stream);
  std::size_t drawn = m - 1;
  double acc = 0.0;
  for (std::size_t c = 0; c < m; ++c) {
    acc += row[c];
    if (u < acc) {
      drawn = c;
      break;
    }
  }
  while (row[drawn] == 0.0 && drawn > 0) --drawn;
  const double kappa = drawn == true_label ? noise.kappa : noise.kappa * noise.wrong_kappa_scale;
  std::vector<double> out(m, 0.0);
  if (std::isinf(kappa)) {
    out[drawn] = 1.0;
    return out;
  }
  const double rest = static_cast<double>(m - 1);
  const double top = kappa / (kappa + rest);
  std::fill(out.begin(), out.end(), (1.0 - top) / rest);
  out[drawn] = top;
  return out;
}

SemanticImage predict_semantics(const RenderResult& image, const SemanticNoiseModel& noise, std::uint64_t frame_seed) {
  const std::size_t m = noise.categories();
  SemanticImage out{image.width, image.height, m, {}};
  out.probs.reserve(image.labels.size() * m);
  for (std::size_t i = 0; i < image.labels.size(); ++i) {
    const std::vector<double> p = pixel_distribution(noise, image.labels[i], mix_seed(noise.seed, frame_seed, i));
    out.probs.insert(out.probs.end(), p.begin(), p.end());
  }
  return out;
}

void apply_depth_noise(RenderResult& image, const DepthNoise& noise, double max_depth, std::uint64_t frame_seed) {
  for (std::size_t i = 0; i < image.depth.size(); ++i) {
    if (image.labels[i] == kNoLabel) continue;
    image.depth[i] = noisy_depth(image.depth[i], noise, max_depth, frame_seed, i);
    if (image.depth[i] == kDepthSentinel) image.labels[i] = kNoLabel;
  }
}

std::vector<Sample> back_project(const RenderResult& image, const SemanticImage& sem, const Pose2& pose,
                                 const CameraModel& camera, std::size_t n, std::uint64_t seed) {
  if (image.width != camera.width || image.height != camera.height || sem.width != image.width ||
      sem.height != image.height) {
    throw std::invalid_argument("back_project: image sizes disagree");
  }
  std::vector<Sample> out;
  PixelOrder order(image.depth.size(), seed);
  for (std::size_t i = 0; i < order.size() && out.size() < n; ++i) {
    const std::uint32_t px = order[i];
    if (image.labels[px] == kNoLabel) continue;
    const auto probs = sem.at(px);
    out.push_back(unproject(camera, pose, px, image.depth[px], {probs.begin(), probs.end()}));
  }
  return out;
}

std::vector<Sample> observe(const Scene& scene, const Pose2& true_pose, const Pose2& belief_pose,
                            const CameraModel& camera, const SemanticNoiseModel& noise,
                            const std::optional<DepthNoise>& depth_noise, std::size_t n, std::uint64_t seed) {
  std::vector<Sample> out;
  out.reserve(n);
  PixelOrder order(camera.pixel_count(), seed);
  for (std::size_t i = 0; i < order.size() && out.size() < n; ++i) {
    const std::uint32_t px = order[i];
    const int u = static_cast<int>(px % static_cast<std::uint32_t>(camera.width));
    const int v = static_cast<int>(px / static_cast<std::uint32_t>(camera.width));
    Hit hit = cast_ray(scene, pixel_ray(camera, true_pose, u, v), camera.max_depth);
    if (!hit.valid()) continue;
    if (depth_noise) {
      hit.depth = noisy_depth(hit.depth, *depth_noise, camera.max_depth, seed, px);
      if (hit.depth == kDepthSentinel) continue;
    }
    out.push_back(unproject(camera, belief_pose, px, hit.depth, pixel_distribution(noise, hit.label, mix_seed(noise.seed, seed, px))));
  }
  return out;
}

}  // namespace objnav::sim
