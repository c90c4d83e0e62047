#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "doctest.h"
#include "nearfield/error.hpp"
#include "nearfield/geometry.hpp"

using namespace nf;
using namespace nf::geometry;

namespace {

// Bit-by-bit interleave, written independently of the library's version.
Morton slow_interleave(std::uint32_t x, std::uint32_t y) {
  Morton m = 0;
  for (int b = 0; b < 32; ++b) {
    m |= static_cast<Morton>((x >> b) & 1u) << (2 * b);
    m |= static_cast<Morton>((y >> b) & 1u) << (2 * b + 1);
  }
  return m;
}

PointSet points_from(const std::vector<std::pair<double, double>>& xy) {
  PointSet p;
  p.n = xy.size();
  for (auto [x, y] : xy) {
    p.src_xy.insert(p.src_xy.end(), {x, y});
    p.tgt_xy.insert(p.tgt_xy.end(), {x, y});
    p.src_potential.push_back(1.0);
  }
  return p;
}

}  // namespace

TEST_CASE("generate_points is deterministic and stays in the unit square") {
  const auto a = generate_points(5, 42);
  const auto b = generate_points(5, 42);
  CHECK(a.src_xy == b.src_xy);
  CHECK(a.tgt_xy == b.tgt_xy);
  CHECK(a.src_potential == b.src_potential);

  const auto p = generate_points(1000, 7);
  REQUIRE(p.src_xy.size() == 2000);
  REQUIRE(p.tgt_xy.size() == 2000);
  for (double v : p.src_xy) CHECK((v >= 0.0 && v <= 1.0));
  for (double v : p.tgt_xy) CHECK((v >= 0.0 && v <= 1.0));
  for (double q : p.src_potential) CHECK((q >= -1.0 && q <= 1.0));

  const auto small = generate_points(100, 1);
  const double mean =
      (std::accumulate(small.src_xy.begin(), small.src_xy.end(), 0.0) +
       std::accumulate(small.tgt_xy.begin(), small.tgt_xy.end(), 0.0)) /
      400.0;
  CHECK(mean == doctest::Approx(0.5).epsilon(0.2));
  CHECK(std::abs(mean - 0.5) < 0.1);

  CHECK_THROWS_AS(generate_points(0, 1), Error);
}

TEST_CASE("morton_encode hand values") {
  CHECK(morton_encode(0, 0, 5) == 0);
  CHECK(morton_encode(1, 1, 2) == 3);
  CHECK(morton_encode(2, 3, 3) == 14);
  CHECK_THROWS_AS(morton_encode(2, 0, 2), Error);
  CHECK_THROWS_AS(morton_encode(0, 0, 0), Error);
}

TEST_CASE("morton encode and decode are inverse bijections") {
  for (int level = 1; level <= 6; ++level) {
    const auto side = cells_per_side(level);
    std::set<Morton> seen;
    for (std::uint32_t x = 0; x < side; ++x) {
      for (std::uint32_t y = 0; y < side; ++y) {
        const Morton m = morton_encode(x, y, level);
        CHECK(m == slow_interleave(x, y));
        CHECK(m < box_count(level));
        CHECK(morton_decode(m, level) == GridCell{x, y});
        seen.insert(m);
      }
    }
    CHECK(seen.size() == box_count(level));
  }
  std::mt19937_64 rng(3);
  const int level = kMaxLevel;
  std::uniform_int_distribution<std::uint32_t> u(0, cells_per_side(level) - 1);
  for (int k = 0; k < 1000; ++k) {
    const auto x = u(rng), y = u(rng);
    CHECK(morton_decode(morton_encode(x, y, level), level) == GridCell{x, y});
  }
}

TEST_CASE("cell_index is half-open with the top edge folded in") {
  CHECK(cell_index(0.0, 4) == 0);
  CHECK(cell_index(0.25, 4) == 1);
  CHECK(cell_index(0.2499999, 4) == 0);
  CHECK(cell_index(1.0, 4) == 3);
}

TEST_CASE("build_tree small cases") {
  const auto one = build_tree(generate_points(1, 9), 15);
  CHECK(one.level() == 3);
  CHECK(one.num_boxes() == 16);

  // 17 points inside one L=3 cell force at least one more level.
  std::vector<std::pair<double, double>> xy;
  for (int k = 0; k < 17; ++k) xy.emplace_back(0.01 + 0.01 * k, 0.02 + 0.005 * k);
  const auto crowded = build_tree(points_from(xy), 15);
  CHECK(crowded.level() >= 4);
  CHECK(crowded.max_occupancy() <= 15);

  // Coincident points can never be separated.
  std::vector<std::pair<double, double>> same(20, {0.3, 0.3});
  CHECK_THROWS_AS(build_tree(points_from(same), 15), Error);
  try {
    build_tree(points_from(same), 15);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConstructionFailure);
  }
}

TEST_CASE("build_tree partitions points and respects CT") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    for (int ct : {1, 4, 15, 40}) {
      const auto p = generate_points(1000, seed);
      const auto tree = build_tree(p, ct);
      CHECK(tree.max_occupancy() <= static_cast<std::size_t>(ct));
      if (tree.level() > kDefaultStartLevel) {
        // The level below must have failed the threshold.
        CHECK(build_at_level(p, ct, tree.level() - 1).max_occupancy() >
              static_cast<std::size_t>(ct));
      }
      const auto side = cells_per_side(tree.level());
      std::vector<int> src_hits(p.n, 0), tgt_hits(p.n, 0);
      for (Morton b = 0; b < tree.num_boxes(); ++b) {
        const auto cell = morton_decode(b, tree.level());
        auto s = tree.sources(b);
        CHECK(std::is_sorted(s.begin(), s.end()));
        for (auto idx : s) {
          ++src_hits[idx];
          CHECK(cell_index(p.src_xy[2 * idx], side) == cell.ix);
          CHECK(cell_index(p.src_xy[2 * idx + 1], side) == cell.iy);
        }
        for (auto idx : tree.targets(b)) {
          ++tgt_hits[idx];
          CHECK(cell_index(p.tgt_xy[2 * idx], side) == cell.ix);
          CHECK(cell_index(p.tgt_xy[2 * idx + 1], side) == cell.iy);
        }
      }
      CHECK(std::all_of(src_hits.begin(), src_hits.end(), [](int h) { return h == 1; }));
      CHECK(std::all_of(tgt_hits.begin(), tgt_hits.end(), [](int h) { return h == 1; }));
    }
  }
}

TEST_CASE("adjust_height") {
  const auto p = generate_points(4096, 5);
  const auto tree = build_tree(p, 15);
  const auto s0 = stats(tree);

  const auto same = adjust_height(tree, p, 0);
  CHECK(same.level() == tree.level());
  for (Morton b = 0; b < tree.num_boxes(); ++b) {
    CHECK(std::ranges::equal(same.sources(b), tree.sources(b)));
    CHECK(std::ranges::equal(same.targets(b), tree.targets(b)));
  }

  const auto up = adjust_height(tree, p, 1);
  CHECK(up.level() == tree.level() + 1);
  CHECK(stats(up).d == s0.d / 4.0);
  CHECK(stats(up).b_count == 4 * s0.b_count);

  // Lowering may overflow CT without raising.
  const auto down = adjust_height(tree, p, -1);
  CHECK(down.level() == tree.level() - 1);
  CHECK(down.max_occupancy() > 15);

  CHECK_THROWS_AS(adjust_height(tree, p, -tree.level()), Error);
  CHECK_THROWS_AS(adjust_height(tree, p, kMaxLevel), Error);
}

TEST_CASE("neighbors_e1 counts and ordering") {
  CHECK(neighbors_e1(0, 3).size() == 4);
  CHECK(neighbors_e1(morton_encode(3, 3, 3), 3).size() == 4);
  CHECK(neighbors_e1(morton_encode(2, 3, 4), 4).size() == 9);
  CHECK(neighbors_e1(morton_encode(0, 3, 4), 4).size() == 6);
  const auto single = neighbors_e1(0, 1);
  REQUIRE(single.size() == 1);
  CHECK(single[0] == 0);
}

TEST_CASE("neighbors_e1 matches a geometric brute force and is symmetric") {
  for (int level = 1; level <= 5; ++level) {
    const auto nb = box_count(level);
    for (Morton a = 0; a < nb; ++a) {
      const auto ca = morton_decode(a, level);
      std::vector<Morton> expect;
      for (Morton b = 0; b < nb; ++b) {
        const auto cb = morton_decode(b, level);
        const long dx = static_cast<long>(ca.ix) - static_cast<long>(cb.ix);
        const long dy = static_cast<long>(ca.iy) - static_cast<long>(cb.iy);
        if (std::abs(dx) <= 1 && std::abs(dy) <= 1) expect.push_back(b);
      }
      const auto got = neighbors_e1(a, level);
      CHECK(std::vector<Morton>(got.begin(), got.end()) == expect);
      for (Morton b : got) {
        const auto back = neighbors_e1(b, level);
        CHECK(std::find(back.begin(), back.end(), a) != back.end());
      }
    }
  }
}

TEST_CASE("stats") {
  const auto p = generate_points(4096, 11);
  const auto t6 = build_at_level(p, 15, 6);
  CHECK(stats(t6).d == 4.0);
  CHECK(stats(t6).b_count == 1024);
  CHECK(stats(t6).n == 4096);
  CHECK(stats(t6).t >= 4);

  const auto seven = build_at_level(generate_points(7, 1), 15, 1);
  CHECK(stats(seven).t == 7);
  CHECK(stats(seven).d == 7.0);

  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto pts = generate_points(2000, seed);
    const auto s = stats(build_tree(pts, 15));
    CHECK(s.d == doctest::Approx(2000.0 / std::pow(4.0, s.l - 1)));
    CHECK(static_cast<double>(s.t) >= s.d);
  }
}

TEST_CASE("N=300,000 lands at L=10 with D near 1.14") {
  const auto s = stats(build_tree(generate_points(300000, 1), 15));
  CHECK(s.l == 10);
  CHECK(s.d == doctest::Approx(1.14).epsilon(0.01));
  CHECK(s.t <= 15);
  CHECK(s.t >= 4);
}
