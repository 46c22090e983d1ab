#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "objnav/geometry.hpp"
#include "objnav/semantic.hpp"

namespace objnav {

/// Opaque handle of a fused point. Handles are dense and assigned in insertion order.
struct PointId {
  static constexpr std::uint32_t kInvalid = std::numeric_limits<std::uint32_t>::max();
  std::uint32_t value = kInvalid;

  constexpr bool valid() const { return value != kInvalid; }
  friend constexpr auto operator<=>(PointId, PointId) = default;
};

/// Integer coordinates of a block: componentwise floor(pos / block_len).
struct BlockKey {
  std::int32_t kx = 0;
  std::int32_t ky = 0;
  std::int32_t kz = 0;

  friend bool operator==(const BlockKey&, const BlockKey&) = default;
};

struct BlockKeyHash {
  std::size_t operator()(const BlockKey& k) const noexcept {
    std::uint64_t h = static_cast<std::uint32_t>(k.kx);
    h = h * 0x9E3779B97F4A7C15ull ^ static_cast<std::uint32_t>(k.ky);
    h = h * 0x9E3779B97F4A7C15ull ^ static_cast<std::uint32_t>(k.kz);
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

struct StoreParams {
  double block_len = 0.10;
  double link_min = 0.04;
  double link_max = 0.15;
  double merge_radius = 0.03;
};

inline constexpr int kNumOctants = 8;

/// Octant of `to` relative to `from`. Bit 0 is set when dx >= 0, bit 1 when dy >= 0,
/// bit 2 when dz >= 0, so zero differences fall on the positive side.
inline int octant_of(const Point3& from, const Point3& to) {
  return (to.x - from.x >= 0.0 ? 1 : 0) | (to.y - from.y >= 0.0 ? 2 : 0) | (to.z - from.z >= 0.0 ? 4 : 0);
}

/// One back-projected observation: a world position and its per-view distribution.
struct Sample {
  Point3 pos;
  SemanticDist sem;
};

/// Value snapshot of a stored point.
struct FusedPoint {
  PointId id;
  Point3 pos;
  SemanticDist sem;
  std::optional<double> consistency;
  std::array<std::optional<PointId>, kNumOctants> octree;
  std::uint32_t last_seen_step = 0;
  std::uint32_t views = 0;
};

struct InsertResult {
  std::size_t merged = 0;
  std::size_t inserted = 0;
  std::size_t rejected = 0;
  /// Per input sample: the point it created or merged into (invalid when rejected).
  std::vector<PointId> assignment;
  /// Sorted, unique: points whose own semantics or 1-ring changed in this batch.
  std::vector<PointId> dirty;
};

struct PointSample {
  std::vector<FusedPoint> points;
  /// Set when the store was empty and the entries are a placeholder at the agent origin.
  bool synthetic = false;
};

/// Block-indexed store of fused points with a one-level octree per point.
///
/// Single writer. Const members may run concurrently with each other.
class PointStore {
 public:
  explicit PointStore(std::size_t num_categories, StoreParams params = {});

  std::size_t num_categories() const { return num_categories_; }
  const StoreParams& params() const { return params_; }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  bool contains(PointId id) const { return id.valid() && id.value < size_; }

  BlockKey block_key_of(const Point3& p) const;

  /// Merges each sample into the nearest point within merge_radius or inserts it as a
  /// new point. Invalid samples are counted in `rejected` and skipped.
  InsertResult insert_batch(std::span<const Sample> samples, std::uint32_t step);

  /// Ids within the closed ball of radius r around p, sorted. Requires 0 < r <= 1.
  std::vector<PointId> neighbors_in_radius(const Point3& p, double r) const;

  /// Nearest point within the closed ball, ties to the smaller id.
  std::optional<PointId> nearest_within(const Point3& p, double r) const;

  /// Rebuilds all eight octant links of `id`; returns the number of present links.
  int build_octree_links(PointId id);

  /// Points reachable by following at most k outgoing links, excluding `id`. Sorted.
  std::vector<PointId> k_ring(PointId id, int k) const;

  /// Draws n points uniformly without replacement, padding with replacement when the
  /// store is smaller than n.
  PointSample sample_points(std::size_t n, std::uint64_t seed, const Point3& origin) const;

  // Per-point accessors. `id` must be contained.
  const Point3& position(PointId id) const { return rec(id).pos; }
  SemanticDist semantics(PointId id) const;
  /// Writes the normalized distribution into out[0..M).
  void normalized_semantics(PointId id, std::span<double> out) const;
  double probability(PointId id, std::size_t category) const;
  std::size_t argmax_category(PointId id) const;
  std::optional<double> consistency(PointId id) const;
  void set_consistency(PointId id, std::optional<double> value);
  std::optional<PointId> link(PointId id, int octant) const;
  std::uint32_t last_seen_step(PointId id) const { return rec(id).last_seen; }
  std::uint32_t views(PointId id) const { return rec(id).views; }
  FusedPoint snapshot(PointId id) const;

  std::size_t block_count() const { return blocks_.size(); }
  std::span<const PointId> block(const BlockKey& key) const;
  void for_each_block(const std::function<void(const BlockKey&, std::span<const PointId>)>& fn) const;

  /// Approximate heap footprint of the store in bytes.
  std::size_t memory_bytes() const;

  /// FNV-1a digest of every point's stored state in id order.
  std::uint64_t content_digest() const;

 private:
  struct Record {
    Point3 pos;
    std::array<float, kMaxCategories> sem_max{};
    float consistency = std::numeric_limits<float>::quiet_NaN();
    std::array<std::uint32_t, kNumOctants> links{};
    std::uint32_t last_seen = 0;
    std::uint32_t views = 0;
  };

  static constexpr std::size_t kChunkSize = 4096;

  Record& rec(PointId id) { return chunks_[id.value / kChunkSize][id.value % kChunkSize]; }
  const Record& rec(PointId id) const { return chunks_[id.value / kChunkSize][id.value % kChunkSize]; }

  template <typename Fn>
  void for_each_in_radius(const Point3& p, double r, Fn&& fn) const;

  PointId append(const Point3& pos, std::span<const double> sem, std::uint32_t step);
  bool fuse_into(PointId id, std::span<const double> sem, std::uint32_t step);
  /// Offers `candidate` as a link of `owner`; returns true when the link changed.
  bool offer_link(PointId owner, PointId candidate);

  std::size_t num_categories_;
  StoreParams params_;
  std::size_t size_ = 0;
  std::vector<std::vector<Record>> chunks_;
  std::unordered_map<BlockKey, std::vector<PointId>, BlockKeyHash> blocks_;
};

}  // namespace objnav
