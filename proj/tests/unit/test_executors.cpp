#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "nearfield/error.hpp"
#include "nearfield/executors.hpp"
#include "nearfield/layouts.hpp"

using namespace nf;
using namespace nf::exec;

namespace {

// Independent oracle: every target against every source whose leaf cell is
// within one cell in x and y. No tree, no neighbor lists.
std::vector<double> brute_force(const PointSet& p, int level,
                                const KernelConfig& cfg) {
  const auto side = geometry::cells_per_side(level);
  std::vector<double> out(p.n, 0.0);
  for (std::size_t j = 0; j < p.n; ++j) {
    const double tx = p.tgt_xy[2 * j], ty = p.tgt_xy[2 * j + 1];
    const long cx = geometry::cell_index(tx, side);
    const long cy = geometry::cell_index(ty, side);
    for (std::size_t s = 0; s < p.n; ++s) {
      const double sx = p.src_xy[2 * s], sy = p.src_xy[2 * s + 1];
      const long dx = static_cast<long>(geometry::cell_index(sx, side)) - cx;
      const long dy = static_cast<long>(geometry::cell_index(sy, side)) - cy;
      if (std::abs(dx) > 1 || std::abs(dy) > 1) continue;
      const double r = std::hypot(tx - sx, ty - sy);
      if (r < cfg.epsilon) continue;
      out[j] += p.src_potential[s] * std::log(1.0 / r);
    }
  }
  return out;
}

void check_close(const std::vector<double>& got, const std::vector<double>& want,
                 double rel) {
  REQUIRE(got.size() == want.size());
  for (std::size_t j = 0; j < got.size(); ++j) {
    CHECK(std::abs(got[j] - want[j]) <=
          rel * std::max(std::abs(want[j]), 1.0));
  }
}

PointSet two_points(double tx, double ty, double sx, double sy, double q) {
  PointSet p;
  p.n = 1;
  p.tgt_xy = {tx, ty};
  p.src_xy = {sx, sy};
  p.src_potential = {q};
  return p;
}

}  // namespace

TEST_CASE("parallel_for covers the range exactly once") {
  for (unsigned width : {1u, 2u, 3u, 8u}) {
    for (std::size_t count : {0u, 1u, 5u, 1000u}) {
      std::vector<std::atomic<int>> hits(count);
      parallel_for({width}, count, [&](std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) ++hits[k];
      });
      CHECK(std::all_of(hits.begin(), hits.end(),
                        [](const std::atomic<int>& h) { return h == 1; }));
    }
  }
}

TEST_CASE("single-pair hand values") {
  const KernelConfig cfg;
  {
    const auto p = two_points(0.5, 0.5, 0.5, 0.5, 1.0);
    const auto tree = geometry::build_tree(p, 15);
    CHECK(run_baseline(tree, p, cfg).tgt_potentials[0] == 0.0);
  }
  {
    const auto p = two_points(0.5, 0.5, 0.5, 0.5 + std::exp(-1.0), 1.0);
    const auto tree = geometry::build_at_level(p, 15, 1);
    const auto base = run_baseline(tree, p, cfg).tgt_potentials[0];
    CHECK(base == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(run_indexing(layouts::build_indexing(tree, p), cfg).tgt_potentials[0] == base);
    CHECK(run_repetition(layouts::build_repetition(tree, p), cfg).tgt_potentials[0] == base);
  }
}

TEST_CASE("baseline agrees with the brute-force oracle") {
  const KernelConfig cfg;
  for (std::size_t n : {50u, 800u, 3000u}) {
    for (int ct : {4, 15}) {
      const auto p = generate_points(n, n + static_cast<std::size_t>(ct));
      const auto tree = geometry::build_tree(p, ct);
      const auto want = brute_force(p, tree.level(), cfg);
      check_close(run_baseline(tree, p, cfg).tgt_potentials, want, 1e-12);
    }
  }
}

TEST_CASE("three executors are bit-identical on N=10,000, CT=15") {
  const KernelConfig cfg;
  const auto p = generate_points(10000, 77);
  const auto tree = geometry::build_tree(p, 15);
  const auto base = run_baseline(tree, p, cfg);
  const auto idx_layout = layouts::build_indexing(tree, p);
  const auto rep_layout = layouts::build_repetition(tree, p);
  for (unsigned width : {1u, 4u}) {
    const auto idx = run_indexing(idx_layout, cfg, {width});
    const auto rep = run_repetition(rep_layout, cfg, {width});
    CHECK(idx.tgt_potentials == base.tgt_potentials);
    CHECK(rep.tgt_potentials == base.tgt_potentials);
    CHECK(idx.work_items == tree.num_boxes());
    CHECK(rep.work_items == p.n);
  }
}

TEST_CASE("work-item counts") {
  const auto p = generate_points(3000, 1);
  const auto tree = geometry::build_at_level(p, 15, 6);
  const auto idx = run_indexing(layouts::build_indexing(tree, p), {});
  CHECK(idx.work_items == 1024);
}

TEST_CASE("record order does not matter") {
  const KernelConfig cfg;
  const auto p = generate_points(500, 12);
  const auto tree = geometry::build_tree(p, 15);
  const auto rep = layouts::build_repetition(tree, p);
  const auto ref = run_repetition(rep, cfg).tgt_potentials;

  std::vector<std::size_t> perm(p.n);
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  auto shuffled = rep;
  for (std::size_t k = 0; k < p.n; ++k) {
    std::copy_n(rep.records.begin() + static_cast<std::ptrdiff_t>(perm[k] * rep.stride),
                rep.stride,
                shuffled.records.begin() + static_cast<std::ptrdiff_t>(k * rep.stride));
  }
  const auto out = run_repetition(shuffled, cfg).tgt_potentials;
  for (std::size_t k = 0; k < p.n; ++k) CHECK(out[k] == ref[perm[k]]);

  // A zero-count record yields zero.
  shuffled.records[2] = layouts::encode_count(0);
  CHECK(run_repetition(shuffled, cfg).tgt_potentials[0] == 0.0);
}

TEST_CASE("corrupt layouts are rejected before running") {
  const auto p = generate_points(300, 3);
  const auto tree = geometry::build_tree(p, 15);

  auto idx = layouts::build_indexing(tree, p);
  idx.nei_src_offsets[3] = -1;
  CHECK_THROWS_AS(run_indexing(idx, {}), Error);
  idx = layouts::build_indexing(tree, p);
  idx.tgt_idx[0] = static_cast<std::int32_t>(p.n);
  CHECK_THROWS_AS(run_indexing(idx, {}), Error);
  idx = layouts::build_indexing(tree, p);
  idx.tgt_offsets.back() += 1;
  try {
    run_indexing(idx, {});
    FAIL("expected LayoutCorrupt");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LayoutCorrupt);
  }

  auto rep = layouts::build_repetition(tree, p);
  rep.records[2] = layouts::encode_count(9 * 15 + 1);
  CHECK_THROWS_AS(run_repetition(rep, {}), Error);
  rep = layouts::build_repetition(tree, p);
  rep.records.pop_back();
  CHECK_THROWS_AS(run_repetition(rep, {}), Error);
}
