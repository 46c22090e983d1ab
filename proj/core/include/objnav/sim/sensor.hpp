#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "objnav/point_store.hpp"
#include "objnav/sim/scene.hpp"

namespace objnav::sim {

/// Depth value of pixels whose ray hits nothing within max depth.
inline constexpr float kDepthSentinel = 0.0f;
/// Label value paired with kDepthSentinel.
inline constexpr std::uint8_t kNoLabel = 255;

struct CameraModel {
  int width = 160;
  int height = 120;
  double hfov_deg = 79.0;
  double max_depth = 5.0;
  double mount_height = 0.88;

  /// Throws std::invalid_argument on non-positive sizes or an FOV outside (0, 180).
  void validate() const;
  /// Focal length in pixels; pixels are square.
  double focal() const;
  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

struct Ray {
  Point3 origin;
  /// Unit forward component, so the ray parameter is the z-depth.
  Point3 direction;
};

/// Ray through the centre of pixel (u, v); u grows rightwards, v downwards.
Ray pixel_ray(const CameraModel& camera, const Pose2& pose, int u, int v);

/// Continuous pixel coordinates of a world point, absent behind the camera.
std::optional<std::pair<double, double>> project_point(const CameraModel& camera, const Pose2& pose, const Point3& p);

struct Hit {
  float depth = kDepthSentinel;
  std::uint8_t label = kNoLabel;

  bool valid() const { return label != kNoLabel; }
};

/// Nearest intersection with the scene boxes, floor and ceiling. Boxes win exact ties
/// with the planes; lower box indices win ties among boxes.
Hit cast_ray(const Scene& scene, const Ray& ray, double max_depth);

struct RenderResult {
  int width = 0;
  int height = 0;
  std::vector<float> depth;
  std::vector<std::uint8_t> labels;
};

RenderResult render(const Scene& scene, const Pose2& pose, const CameraModel& camera);

/// Synthetic 2D predictor: a label is drawn from the confusion row of the true label
/// and emitted with probability kappa / (kappa + M - 1), the rest spread uniformly.
/// Wrongly drawn labels use concentration kappa * wrong_kappa_scale, so confidence
/// carries information about correctness; a scale of 1 makes it uninformative.
struct SemanticNoiseModel {
  std::vector<std::vector<double>> confusion;
  double kappa = 60.0;
  double wrong_kappa_scale = 0.5;
  std::uint64_t seed = 0;

  std::size_t categories() const { return confusion.size(); }
  /// Throws std::invalid_argument unless rows are stochastic, diagonals dominate and kappa > 0.
  void validate() const;

  /// Identity confusion with one-hot output.
  static SemanticNoiseModel oracle(std::size_t m, std::uint64_t seed = 0);
  /// Diagonal `diag`, remainder spread uniformly over the other labels.
  static SemanticNoiseModel diagonal(std::size_t m, double diag, double kappa, std::uint64_t seed);
};

/// Distribution emitted for one pixel; `stream` selects the random draw.
std::vector<double> pixel_distribution(const SemanticNoiseModel& noise, std::uint8_t true_label, std::uint64_t stream);

struct SemanticImage {
  int width = 0;
  int height = 0;
  std::size_t categories = 0;
  /// Row-major, `categories` values per pixel. Pixels without a label hold uniform rows.
  std::vector<double> probs;

  std::span<const double> at(std::size_t pixel) const {
    return std::span<const double>(probs).subspan(pixel * categories, categories);
  }
};

SemanticImage predict_semantics(const RenderResult& image, const SemanticNoiseModel& noise, std::uint64_t frame_seed);

/// Gaussian depth noise with sigma(d) = base + slope * d.
struct DepthNoise {
  double base = 0.005;
  double slope = 0.01;
  std::uint64_t seed = 0;
};

/// Perturbs valid depths in place; readings pushed beyond max depth become sentinels.
void apply_depth_noise(RenderResult& image, const DepthNoise& noise, double max_depth, std::uint64_t frame_seed);

/// Samples up to n valid pixels uniformly without replacement and unprojects them
/// through `pose`. Pixels are visited in a seeded random order.
std::vector<Sample> back_project(const RenderResult& image, const SemanticImage& sem, const Pose2& pose,
                                 const CameraModel& camera, std::size_t n, std::uint64_t seed);

/// Same result as render, optional depth noise, predict_semantics and back_project, but
/// only casts rays for the pixels it visits. Rays leave from `true_pose`; points are
/// unprojected through `belief_pose`.
std::vector<Sample> observe(const Scene& scene, const Pose2& true_pose, const Pose2& belief_pose,
                            const CameraModel& camera, const SemanticNoiseModel& noise,
                            const std::optional<DepthNoise>& depth_noise, std::size_t n, std::uint64_t seed);

}  // namespace objnav::sim
