#include "objnav/point_store.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <random>
#include <stdexcept>
#include <string>

namespace objnav {

namespace {

// Widens block ranges so that rounding in p -/+ r never drops a boundary block.
constexpr double kRangeSlack = 1e-9;

template <typename T>
void fnv_mix(std::uint64_t& h, const T& value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001B3ull;
  }
}

}  // namespace

PointStore::PointStore(std::size_t num_categories, StoreParams params)
    : num_categories_(num_categories), params_(params) {
  if (num_categories < 2 || num_categories > kMaxCategories) {
    throw std::invalid_argument("PointStore: category count must lie in [2, " + std::to_string(kMaxCategories) + "]");
  }
  if (!(params.block_len > 0.0) || !(params.link_min >= 0.0) || !(params.link_max > params.link_min) ||
      !(params.merge_radius >= 0.0)) {
    throw std::invalid_argument("PointStore: invalid geometry parameters");
  }
}

BlockKey PointStore::block_key_of(const Point3& p) const {
  return {static_cast<std::int32_t>(std::floor(p.x / params_.block_len)),
          static_cast<std::int32_t>(std::floor(p.y / params_.block_len)),
          static_cast<std::int32_t>(std::floor(p.z / params_.block_len))};
}

template <typename Fn>
void PointStore::for_each_in_radius(const Point3& p, double r, Fn&& fn) const {
  const BlockKey lo = block_key_of({p.x - r - kRangeSlack, p.y - r - kRangeSlack, p.z - r - kRangeSlack});
  const BlockKey hi = block_key_of({p.x + r + kRangeSlack, p.y + r + kRangeSlack, p.z + r + kRangeSlack});
  for (std::int32_t kx = lo.kx; kx <= hi.kx; ++kx) {
    for (std::int32_t ky = lo.ky; ky <= hi.ky; ++ky) {
      for (std::int32_t kz = lo.kz; kz <= hi.kz; ++kz) {
        const auto it = blocks_.find({kx, ky, kz});
        if (it == blocks_.end()) continue;
        for (PointId id : it->second) {
          const double d = distance(p, rec(id).pos);
          if (d <= r) fn(id, d);
        }
      }
    }
  }
}

std::vector<PointId> PointStore::neighbors_in_radius(const Point3& p, double r) const {
  if (!(r > 0.0) || r > 1.0) throw std::invalid_argument("neighbors_in_radius: radius must lie in (0, 1]");
  std::vector<PointId> out;
  for_each_in_radius(p, r, [&](PointId id, double) { out.push_back(id); });
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<PointId> PointStore::nearest_within(const Point3& p, double r) const {
  std::optional<PointId> best;
  double best_d = 0.0;
  for_each_in_radius(p, r, [&](PointId id, double d) {
    if (!best || d < best_d || (d == best_d && id < *best)) {
      best = id;
      best_d = d;
    }
  });
  return best;
}

PointId PointStore::append(const Point3& pos, std::span<const double> sem, std::uint32_t step) {
  if (size_ % kChunkSize == 0) {
    chunks_.emplace_back();
    chunks_.back().reserve(kChunkSize);
  }
  Record r;
  r.pos = pos;
  for (std::size_t c = 0; c < num_categories_; ++c) r.sem_max[c] = static_cast<float>(sem[c]);
  r.links.fill(PointId::kInvalid);
  r.last_seen = step;
  r.views = 1;
  chunks_.back().push_back(r);
  const PointId id{static_cast<std::uint32_t>(size_)};
  ++size_;
  blocks_[block_key_of(pos)].push_back(id);
  return id;
}

bool PointStore::fuse_into(PointId id, std::span<const double> sem, std::uint32_t step) {
  Record& r = rec(id);
  bool changed = false;
  for (std::size_t c = 0; c < num_categories_; ++c) {
    const float v = static_cast<float>(sem[c]);
    if (v > r.sem_max[c]) {
      r.sem_max[c] = v;
      changed = true;
    }
  }
  r.last_seen = std::max(r.last_seen, step);
  ++r.views;
  return changed;
}

bool PointStore::offer_link(PointId owner, PointId candidate) {
  Record& o = rec(owner);
  const Point3& cp = rec(candidate).pos;
  const double d = distance(o.pos, cp);
  if (d < params_.link_min || d > params_.link_max) return false;
  const int oct = octant_of(o.pos, cp);
  const PointId current{o.links[oct]};
  if (current.valid()) {
    const double dc = distance(o.pos, rec(current).pos);
    if (d > dc || (d == dc && !(candidate < current))) return false;
  }
  o.links[oct] = candidate.value;
  return true;
}

int PointStore::build_octree_links(PointId id) {
  if (!contains(id)) throw std::out_of_range("build_octree_links: unknown point");
  rec(id).links.fill(PointId::kInvalid);
  const Point3 p = rec(id).pos;
  for_each_in_radius(p, params_.link_max, [&](PointId q, double) {
    if (q != id) offer_link(id, q);
  });
  return static_cast<int>(
      std::count_if(rec(id).links.begin(), rec(id).links.end(), [](std::uint32_t v) { return v != PointId::kInvalid; }));
}

InsertResult PointStore::insert_batch(std::span<const Sample> samples, std::uint32_t step) {
  InsertResult result;
  result.assignment.reserve(samples.size());
  std::vector<PointId> sem_changed;

  for (const Sample& s : samples) {
    if (s.sem.size() != num_categories_ || !SemanticDist::is_valid(s.sem.probs()) || !is_finite(s.pos)) {
      ++result.rejected;
      result.assignment.push_back(PointId{});
      continue;
    }
    if (const auto hit = nearest_within(s.pos, params_.merge_radius)) {
      if (fuse_into(*hit, s.sem.probs(), step)) sem_changed.push_back(*hit);
      ++result.merged;
      result.assignment.push_back(*hit);
      continue;
    }
    const PointId id = append(s.pos, s.sem.probs(), step);
    ++result.inserted;
    result.assignment.push_back(id);
    build_octree_links(id);
    result.dirty.push_back(id);
    // A new point may be a better octant neighbour for the points around it.
    for_each_in_radius(s.pos, params_.link_max, [&](PointId q, double) {
      if (q != id && offer_link(q, id)) result.dirty.push_back(q);
    });
  }

  std::sort(sem_changed.begin(), sem_changed.end());
  sem_changed.erase(std::unique(sem_changed.begin(), sem_changed.end()), sem_changed.end());
  for (PointId m : sem_changed) {
    result.dirty.push_back(m);
    for_each_in_radius(rec(m).pos, params_.link_max, [&](PointId q, double) {
      const auto& links = rec(q).links;
      if (std::find(links.begin(), links.end(), m.value) != links.end()) result.dirty.push_back(q);
    });
  }
  std::sort(result.dirty.begin(), result.dirty.end());
  result.dirty.erase(std::unique(result.dirty.begin(), result.dirty.end()), result.dirty.end());
  return result;
}

std::vector<PointId> PointStore::k_ring(PointId id, int k) const {
  if (!contains(id)) throw std::out_of_range("k_ring: unknown point");
  if (k < 0) throw std::invalid_argument("k_ring: negative k");
  std::vector<PointId> visited{id};
  std::vector<PointId> frontier{id};
  for (int depth = 0; depth < k && !frontier.empty(); ++depth) {
    std::vector<PointId> next;
    for (PointId p : frontier) {
      for (std::uint32_t l : rec(p).links) {
        if (l == PointId::kInvalid) continue;
        const PointId q{l};
        if (std::find(visited.begin(), visited.end(), q) == visited.end()) {
          visited.push_back(q);
          next.push_back(q);
        }
      }
    }
    frontier = std::move(next);
  }
  visited.erase(visited.begin());
  std::sort(visited.begin(), visited.end());
  return visited;
}

PointSample PointStore::sample_points(std::size_t n, std::uint64_t seed, const Point3& origin) const {
  if (n == 0) throw std::invalid_argument("sample_points: n must be positive");
  PointSample out;
  out.points.reserve(n);
  if (size_ == 0) {
    FusedPoint placeholder;
    placeholder.pos = origin;
    placeholder.sem = SemanticDist::uniform(num_categories_);
    out.points.assign(n, placeholder);
    out.synthetic = true;
    return out;
  }
  std::mt19937_64 rng(seed);
  if (size_ >= n) {
    std::vector<std::uint32_t> idx(size_);
    for (std::size_t i = 0; i < size_; ++i) idx[i] = static_cast<std::uint32_t>(i);
    for (std::size_t i = 0; i < n; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, size_ - 1);
      std::swap(idx[i], idx[pick(rng)]);
      out.points.push_back(snapshot(PointId{idx[i]}));
    }
    return out;
  }
  for (std::size_t i = 0; i < size_; ++i) out.points.push_back(snapshot(PointId{static_cast<std::uint32_t>(i)}));
  std::uniform_int_distribution<std::size_t> pick(0, size_ - 1);
  while (out.points.size() < n) out.points.push_back(out.points[pick(rng)]);
  return out;
}

SemanticDist PointStore::semantics(PointId id) const {
  std::vector<double> p(num_categories_);
  normalized_semantics(id, p);
  return SemanticDist(std::move(p));
}

void PointStore::normalized_semantics(PointId id, std::span<double> out) const {
  const Record& r = rec(id);
  double sum = 0.0;
  for (std::size_t c = 0; c < num_categories_; ++c) sum += r.sem_max[c];
  for (std::size_t c = 0; c < num_categories_; ++c) out[c] = r.sem_max[c] / sum;
}

double PointStore::probability(PointId id, std::size_t category) const {
  const Record& r = rec(id);
  double sum = 0.0;
  for (std::size_t c = 0; c < num_categories_; ++c) sum += r.sem_max[c];
  return r.sem_max[category] / sum;
}

std::size_t PointStore::argmax_category(PointId id) const {
  const Record& r = rec(id);
  return static_cast<std::size_t>(std::max_element(r.sem_max.begin(), r.sem_max.begin() + num_categories_) -
                                  r.sem_max.begin());
}

std::optional<double> PointStore::consistency(PointId id) const {
  const float c = rec(id).consistency;
  if (std::isnan(c)) return std::nullopt;
  return static_cast<double>(c);
}

void PointStore::set_consistency(PointId id, std::optional<double> value) {
  rec(id).consistency = value ? static_cast<float>(*value) : std::numeric_limits<float>::quiet_NaN();
}

std::optional<PointId> PointStore::link(PointId id, int octant) const {
  const std::uint32_t v = rec(id).links[octant];
  if (v == PointId::kInvalid) return std::nullopt;
  return PointId{v};
}

FusedPoint PointStore::snapshot(PointId id) const {
  if (!contains(id)) throw std::out_of_range("snapshot: unknown point");
  const Record& r = rec(id);
  FusedPoint fp;
  fp.id = id;
  fp.pos = r.pos;
  fp.sem = semantics(id);
  fp.consistency = consistency(id);
  for (int o = 0; o < kNumOctants; ++o) fp.octree[o] = link(id, o);
  fp.last_seen_step = r.last_seen;
  fp.views = r.views;
  return fp;
}

std::span<const PointId> PointStore::block(const BlockKey& key) const {
  const auto it = blocks_.find(key);
  if (it == blocks_.end()) return {};
  return it->second;
}

void PointStore::for_each_block(const std::function<void(const BlockKey&, std::span<const PointId>)>& fn) const {
  for (const auto& [key, ids] : blocks_) fn(key, ids);
}

std::size_t PointStore::memory_bytes() const {
  // Node estimate: key/value pair, next pointer and cached hash.
  constexpr std::size_t kNodeBytes = sizeof(std::pair<const BlockKey, std::vector<PointId>>) + 2 * sizeof(void*);
  std::size_t bytes = chunks_.size() * kChunkSize * sizeof(Record);
  bytes += chunks_.capacity() * sizeof(std::vector<Record>);
  bytes += blocks_.bucket_count() * sizeof(void*);
  bytes += blocks_.size() * kNodeBytes;
  for (const auto& [key, ids] : blocks_) bytes += ids.capacity() * sizeof(PointId);
  return bytes;
}

std::uint64_t PointStore::content_digest() const {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (std::size_t i = 0; i < size_; ++i) {
    const Record& r = rec(PointId{static_cast<std::uint32_t>(i)});
    fnv_mix(h, r.pos.x);
    fnv_mix(h, r.pos.y);
    fnv_mix(h, r.pos.z);
    for (std::size_t c = 0; c < num_categories_; ++c) fnv_mix(h, r.sem_max[c]);
    fnv_mix(h, std::bit_cast<std::uint32_t>(r.consistency));
    for (std::uint32_t l : r.links) fnv_mix(h, l);
    fnv_mix(h, r.last_seen);
    fnv_mix(h, r.views);
  }
  return h;
}

}  // namespace objnav
