#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "objnav/point_store.hpp"
#include "oracles.hpp"

using namespace objnav;

namespace {

std::vector<Point3> positions(const PointStore& store) {
  std::vector<Point3> out;
  for (std::uint32_t i = 0; i < store.size(); ++i) out.push_back(store.position(PointId{i}));
  return out;
}

std::vector<std::uint32_t> values(const std::vector<PointId>& ids) {
  std::vector<std::uint32_t> out;
  for (PointId id : ids) out.push_back(id.value);
  return out;
}

}  // namespace

TEST_SUITE("point_store") {
  TEST_CASE("block keys floor toward negative infinity") {
    const PointStore store(4);
    CHECK(store.block_key_of({0.05, 0.05, 0.05}) == BlockKey{0, 0, 0});
    CHECK(store.block_key_of({-0.01, 0.00, 0.25}) == BlockKey{-1, 0, 2});
    CHECK(store.block_key_of({0.10, 0.10, 0.10}) == BlockKey{1, 1, 1});
  }

  TEST_CASE("constructor rejects bad parameters") {
    CHECK_THROWS_AS(PointStore(1), std::invalid_argument);
    CHECK_THROWS_AS(PointStore(kMaxCategories + 1), std::invalid_argument);
    CHECK_THROWS_AS(PointStore(4, StoreParams{0.1, 0.2, 0.1, 0.03}), std::invalid_argument);
  }

  TEST_CASE("insert and merge counts") {
    PointStore store(4);
    const auto d = SemanticDist::uniform(4);
    const std::vector<Sample> far = {{{0, 0, 0}, d}, {{1, 0, 0}, d}, {{0, 1, 0}, d}};
    const auto r1 = store.insert_batch(far, 0);
    CHECK(r1.merged == 0);
    CHECK(r1.inserted == 3);

    PointStore twice(4);
    const std::vector<Sample> one = {{{0.3, 0.3, 0.3}, d}};
    twice.insert_batch(one, 0);
    const auto r2 = twice.insert_batch(one, 1);
    CHECK(r2.merged == 1);
    CHECK(r2.inserted == 0);
    CHECK(twice.views(PointId{0}) == 2);
    CHECK(twice.last_seen_step(PointId{0}) == 1);
  }

  TEST_CASE("invalid samples are rejected") {
    PointStore store(3);
    std::vector<Sample> s = {{{0, 0, 0}, SemanticDist::uniform(4)}, {{NAN, 0, 0}, SemanticDist::uniform(3)},
                             {{0, 0, 0}, SemanticDist::uniform(3)}};
    const auto r = store.insert_batch(s, 0);
    CHECK(r.rejected == 2);
    CHECK(r.inserted == 1);
    CHECK_FALSE(r.assignment[0].valid());
    CHECK(r.assignment[2] == PointId{0});
  }

  TEST_CASE("re-inserting a batch creates nothing new") {
    const auto pts = fixtures::random_points(512, 2.0, 5);
    PointStore store(4);
    const auto batch = fixtures::samples_at(pts, SemanticDist::uniform(4));
    store.insert_batch(batch, 0);
    // Every sample has a stored point within the merge radius.
    const auto stored = positions(store);
    for (const auto& p : pts) REQUIRE_FALSE(oracle::neighbors(stored, p, store.params().merge_radius).empty());
    const auto again = store.insert_batch(batch, 1);
    CHECK(again.inserted == 0);
    CHECK(again.merged == 512);
  }

  TEST_CASE("merging keeps the elementwise maximum") {
    PointStore store(2);
    const std::vector<Sample> a = {{{0, 0, 0}, SemanticDist(std::vector<double>{0.5, 0.5})}};
    const std::vector<Sample> b = {{{0.01, 0, 0}, SemanticDist::one_hot(2, 0)}};
    store.insert_batch(a, 0);
    const auto r = store.insert_batch(b, 1);
    CHECK(r.merged == 1);
    CHECK(store.probability(PointId{0}, 0) == doctest::Approx(2.0 / 3.0));
    CHECK(store.position(PointId{0}) == Point3{0, 0, 0});
  }

  TEST_CASE("radius queries") {
    const PointStore empty(4);
    CHECK(empty.neighbors_in_radius({0, 0, 0}, 0.5).empty());

    const auto store = fixtures::store_of({{0.0, 0.0, 0.0}});
    CHECK(store.neighbors_in_radius({0.125, 0.0, 0.0}, 0.125).size() == 1);
    CHECK_THROWS_AS(store.neighbors_in_radius({0, 0, 0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(store.neighbors_in_radius({0, 0, 0}, 1.5), std::invalid_argument);
  }

  TEST_CASE("radius queries match a linear scan") {
    PointStore store(4);
    store.insert_batch(fixtures::samples_at(fixtures::random_points(10000, 5.0, 21), SemanticDist::uniform(4)), 0);
    const auto stored = positions(store);
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> u(-0.2, 5.2);
    for (int q = 0; q < 100; ++q) {
      const Point3 p{u(rng), u(rng), u(rng)};
      REQUIRE(values(store.neighbors_in_radius(p, 0.12)) == oracle::neighbors(stored, p, 0.12));
    }
  }

  TEST_CASE("octree links") {
    auto lone = fixtures::store_of({{0, 0, 0}});
    CHECK(lone.build_octree_links(PointId{0}) == 0);

    auto pair = fixtures::store_of({{0, 0, 0}, {0.10, 0.01, 0.01}});
    CHECK(pair.build_octree_links(PointId{0}) == 1);
    CHECK(pair.link(PointId{0}, 7) == PointId{1});

    // Too close and too far neighbours are not linked.
    auto bounds = fixtures::store_of({{0, 0, 0}, {0.035, 0, 0}, {0, 0.2, 0}});
    CHECK(bounds.build_octree_links(PointId{0}) == 0);
  }

  TEST_CASE("equidistant neighbours link the smaller id") {
    auto store = fixtures::store_of({{0, 0, 0}, {0.1, 0.02, 0.0}, {0.1, 0.0, 0.02}});
    CHECK(store.build_octree_links(PointId{0}) == 1);
    CHECK(store.link(PointId{0}, 7) == PointId{1});
  }

  TEST_CASE("links match a per-octant scan") {
    PointStore store(4);
    store.insert_batch(fixtures::samples_at(fixtures::random_points(1000, 0.6, 31), SemanticDist::uniform(4)), 0);
    const auto stored = positions(store);
    const auto& prm = store.params();
    // Incremental maintenance during insertion must already agree with a rebuild.
    for (std::uint32_t i = 0; i < store.size(); ++i) {
      const auto expect = oracle::octant_links(stored, i, prm.link_min, prm.link_max);
      for (int o = 0; o < 8; ++o) {
        const auto got = store.link(PointId{i}, o);
        REQUIRE(got.has_value() == expect[o].has_value());
        if (got) REQUIRE(got->value == *expect[o]);
      }
    }
    for (std::uint32_t i = 0; i < store.size(); ++i) store.build_octree_links(PointId{i});
    CHECK(oracle::links_of(store) == [&] {
      oracle::LinkGraph g(store.size());
      for (std::uint32_t i = 0; i < store.size(); ++i) g[i] = oracle::octant_links(stored, i, prm.link_min, prm.link_max);
      return g;
    }());
  }

  TEST_CASE("k-ring") {
    auto iso = fixtures::store_of({{0, 0, 0}});
    CHECK(iso.k_ring(PointId{0}, 2).empty());

    // Chain along +x: every point links only forward and backward.
    auto chain = fixtures::store_of({{0, 0, 0}, {0.1, 0, 0}, {0.2, 0, 0}, {0.3, 0, 0}});
    CHECK(values(chain.k_ring(PointId{0}, 2)) == std::vector<std::uint32_t>{1, 2});
    CHECK(values(chain.k_ring(PointId{0}, 0)).empty());
    CHECK_THROWS_AS(chain.k_ring(PointId{0}, -1), std::invalid_argument);
  }

  TEST_CASE("k-ring matches breadth-first search") {
    PointStore store(4);
    store.insert_batch(fixtures::samples_at(fixtures::random_points(800, 0.5, 41), SemanticDist::uniform(4)), 0);
    const auto graph = oracle::links_of(store);
    for (std::uint32_t i = 0; i < store.size(); i += 7) {
      for (int k : {1, 2, 3}) REQUIRE(values(store.k_ring(PointId{i}, k)) == oracle::k_ring(graph, i, k));
    }
  }

  TEST_CASE("sampling") {
    const auto pts = fixtures::jittered_lattice(4, 4, 4, 0.1, 0.0, {0, 0, 0}, 1);
    const auto store = fixtures::store_of(pts);
    const auto all = store.sample_points(store.size(), 3, {});
    std::set<std::uint32_t> ids;
    for (const auto& p : all.points) ids.insert(p.id.value);
    CHECK(ids.size() == store.size());
    CHECK_FALSE(all.synthetic);

    const auto single = fixtures::store_of({{1, 2, 3}});
    const auto four = single.sample_points(4, 9, {});
    REQUIRE(four.points.size() == 4);
    for (const auto& p : four.points) CHECK(p.id == PointId{0});

    const PointStore empty(4);
    const auto placeholder = empty.sample_points(8, 1, {1, 1, 0});
    CHECK(placeholder.synthetic);
    CHECK(placeholder.points.size() == 8);
    CHECK(placeholder.points[0].pos == Point3{1, 1, 0});
  }

  TEST_CASE("sampling is deterministic per seed") {
    PointStore store(4);
    store.insert_batch(fixtures::samples_at(fixtures::random_points(10000, 5.0, 51), SemanticDist::uniform(4)), 0);
    auto ids = [&](std::uint64_t seed) {
      std::vector<std::uint32_t> out;
      for (const auto& p : store.sample_points(4096, seed, {}).points) out.push_back(p.id.value);
      return out;
    };
    const auto a = ids(77);
    CHECK(a == ids(77));
    CHECK(a != ids(78));
    CHECK(std::set<std::uint32_t>(a.begin(), a.end()).size() == a.size());
  }

  TEST_CASE("content digest tracks state") {
    auto a = fixtures::store_of({{0, 0, 0}, {0.1, 0, 0}});
    auto b = fixtures::store_of({{0, 0, 0}, {0.1, 0, 0}});
    CHECK(a.content_digest() == b.content_digest());
    b.set_consistency(PointId{0}, 0.5);
    CHECK(a.content_digest() != b.content_digest());
  }
}
