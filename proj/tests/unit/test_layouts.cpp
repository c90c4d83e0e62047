#include <cstdio>
#include <random>
#include <sstream>

#include "doctest.h"
#include "nearfield/error.hpp"
#include "nearfield/layouts.hpp"

using namespace nf;
using namespace nf::layouts;
using geometry::Morton;

namespace {

// Packed size the seven arrays should occupy, counted from the tree alone.
std::uint64_t expected_actual_bytes(const geometry::QuadTree& tree) {
  const std::uint64_t n = tree.num_points();
  std::uint64_t nei = 0;
  for (Morton b = 0; b < tree.num_boxes(); ++b) {
    for (auto nb : geometry::neighbors_e1(b, tree.level())) {
      nei += tree.source_count(nb);
    }
  }
  return 8 * (2 * n + 2 * n + n) + 4 * (n + nei + 2 * (tree.num_boxes() + 1));
}

}  // namespace

TEST_CASE("formula byte counts by hand") {
  CHECK(indexing_formula_bytes(100, 3, 7) == 8608);
  CHECK(indexing_formula_bytes(1, 1, 1) == 88);
  CHECK(repetition_formula_bytes(100, 15) == 326400);
  CHECK(repetition_stride(15) == 408);
}

TEST_CASE("count slot round trips through the double") {
  for (std::uint32_t c : {0u, 1u, 135u, 4000000000u}) {
    CHECK(decode_count(encode_count(c)) == c);
  }
}

TEST_CASE("reported bytes match the closed forms on 200 random shapes") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> n_dist(1, 3000);
  std::uniform_int_distribution<int> ct_dist(1, 40);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = n_dist(rng);
    const int ct = ct_dist(rng);
    const auto p = generate_points(n, rng());
    const auto tree = geometry::build_tree(p, ct);
    const auto idx = build_indexing(tree, p);
    const auto rep = build_repetition(tree, p);
    const std::uint64_t l = static_cast<std::uint64_t>(tree.level());
    const std::uint64_t t = tree.max_occupancy();
    CHECK(idx.reported_bytes == 40 * n + (std::uint64_t{1} << (2 * l)) * (2 + 10 * t));
    CHECK(rep.reported_bytes == 8 * n * (3 + 27 * static_cast<std::uint64_t>(ct)));
    CHECK(rep.records.size() * sizeof(double) == rep.reported_bytes);
    CHECK(idx.actual_bytes == expected_actual_bytes(tree));
  }
}

TEST_CASE("indexing arrays reproduce tree membership") {
  const auto p = generate_points(2000, 4);
  const auto tree = geometry::build_tree(p, 15);
  const auto idx = build_indexing(tree, p);
  REQUIRE(idx.num_boxes() == tree.num_boxes());
  CHECK(idx.tgt_offsets.front() == 0);
  CHECK(static_cast<std::size_t>(idx.tgt_offsets.back()) == p.n);
  CHECK(idx.src_coords == p.src_xy);
  CHECK(idx.tgt_coords == p.tgt_xy);
  CHECK(idx.src_potentials == p.src_potential);
  for (Morton b = 0; b < tree.num_boxes(); ++b) {
    std::vector<std::int32_t> tgt(idx.tgt_idx.begin() + idx.tgt_offsets[b],
                                  idx.tgt_idx.begin() + idx.tgt_offsets[b + 1]);
    std::vector<std::int32_t> want(tree.targets(b).begin(), tree.targets(b).end());
    CHECK(tgt == want);

    std::vector<std::int32_t> nei(idx.nei_src_idx.begin() + idx.nei_src_offsets[b],
                                  idx.nei_src_idx.begin() + idx.nei_src_offsets[b + 1]);
    want.clear();
    for (auto nb : geometry::neighbors_e1(b, tree.level())) {
      want.insert(want.end(), tree.sources(nb).begin(), tree.sources(nb).end());
    }
    CHECK(nei == want);
  }
}

TEST_CASE("empty boxes get empty spans") {
  // Two points in opposite corners: most L=3 boxes are empty.
  PointSet p;
  p.n = 2;
  p.src_xy = {0.05, 0.05, 0.95, 0.95};
  p.tgt_xy = p.src_xy;
  p.src_potential = {1.0, -1.0};
  const auto tree = geometry::build_tree(p, 15);
  const auto idx = build_indexing(tree, p);
  std::size_t empty = 0;
  for (Morton b = 0; b < tree.num_boxes(); ++b) {
    if (tree.target_count(b) == 0) {
      ++empty;
      CHECK(idx.tgt_offsets[b] == idx.tgt_offsets[b + 1]);
    }
  }
  CHECK(empty == tree.num_boxes() - 2);
  CHECK(idx.tgt_idx.size() == 2);
}

TEST_CASE("repetition records are self-contained copies of the neighborhood") {
  const auto p = generate_points(1500, 8);
  const auto tree = geometry::build_tree(p, 15);
  const auto rep = build_repetition(tree, p);
  REQUIRE(rep.stride == 408);
  for (Morton b = 0; b < tree.num_boxes(); ++b) {
    std::vector<std::uint32_t> srcs;
    for (auto nb : geometry::neighbors_e1(b, tree.level())) {
      srcs.insert(srcs.end(), tree.sources(nb).begin(), tree.sources(nb).end());
    }
    for (auto j : tree.targets(b)) {
      const auto rec = rep.record(j);
      CHECK(rec[0] == p.tgt_xy[2 * j]);
      CHECK(rec[1] == p.tgt_xy[2 * j + 1]);
      const auto count = decode_count(rec[2]);
      REQUIRE(count == srcs.size());
      CHECK(count <= 135);
      for (std::size_t k = 0; k < count; ++k) {
        CHECK(rec[3 + 3 * k] == p.src_xy[2 * srcs[k]]);
        CHECK(rec[4 + 3 * k] == p.src_xy[2 * srcs[k] + 1]);
        CHECK(rec[5 + 3 * k] == p.src_potential[srcs[k]]);
      }
      for (std::size_t s = 3 + 3 * count; s < rep.stride; ++s) CHECK(rec[s] == 0.0);
    }
  }
}

TEST_CASE("single point gives a single-entry record") {
  const auto p = generate_points(1, 3);
  const auto tree = geometry::build_tree(p, 15);
  const auto rep = build_repetition(tree, p);
  CHECK(decode_count(rep.record(0)[2]) == 1);
}

TEST_CASE("capacity must cover lowered trees") {
  const auto p = generate_points(4096, 2);
  const auto tree = geometry::build_tree(p, 15);
  const auto down = geometry::adjust_height(tree, p, -1);
  REQUIRE(down.max_occupancy() > 15);
  CHECK_THROWS_AS(build_repetition(down, p, 15), Error);
  const int cap = static_cast<int>(down.max_occupancy());
  const auto rep = build_repetition(down, p, cap);
  CHECK(rep.ct == cap);
  CHECK(rep.reported_bytes == repetition_formula_bytes(4096, cap));

  const auto other = generate_points(10, 2);
  CHECK_THROWS_AS(build_indexing(tree, other), Error);
}

TEST_CASE("dump round trip") {
  const auto p = generate_points(700, 6);
  const auto tree = geometry::build_tree(p, 4);
  const auto idx = build_indexing(tree, p);
  const auto rep = build_repetition(tree, p);

  std::stringstream a;
  write_dump(a, idx);
  CHECK(peek_dump_kind(a) == LayoutKind::Indexing);
  const auto idx2 = read_indexing_dump(a);
  CHECK(idx2.src_coords == idx.src_coords);
  CHECK(idx2.tgt_coords == idx.tgt_coords);
  CHECK(idx2.tgt_idx == idx.tgt_idx);
  CHECK(idx2.tgt_offsets == idx.tgt_offsets);
  CHECK(idx2.nei_src_idx == idx.nei_src_idx);
  CHECK(idx2.nei_src_offsets == idx.nei_src_offsets);
  CHECK(idx2.src_potentials == idx.src_potentials);
  CHECK(idx2.reported_bytes == idx.reported_bytes);
  CHECK(idx2.actual_bytes == idx.actual_bytes);

  std::stringstream b;
  write_dump(b, rep);
  CHECK(peek_dump_kind(b) == LayoutKind::Repetition);
  const auto rep2 = read_repetition_dump(b);
  CHECK(rep2.records == rep.records);
  CHECK(rep2.stride == rep.stride);
  CHECK(rep2.reported_bytes == rep.reported_bytes);

  std::stringstream wrong;
  write_dump(wrong, rep);
  CHECK_THROWS_AS(read_indexing_dump(wrong), Error);

  std::stringstream truncated(a.str().substr(0, 20));
  CHECK_THROWS_AS(read_indexing_dump(truncated), Error);
  std::stringstream garbage("not a dump at all");
  CHECK_THROWS_AS(read_repetition_dump(garbage), Error);
}
