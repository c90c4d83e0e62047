#include "nearfield/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "nearfield/error.hpp"

namespace nf {

PointSet generate_points(std::size_t n, std::uint64_t seed) {
  if (n == 0) fail(ErrorCode::InvalidArgument, "generate_points: n must be >= 1");
  PointSet p;
  p.n = n;
  p.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> charge(-1.0, 1.0);
  p.src_xy.resize(2 * n);
  p.tgt_xy.resize(2 * n);
  p.src_potential.resize(n);
  for (auto& v : p.src_xy) v = unit(rng);
  for (auto& v : p.tgt_xy) v = unit(rng);
  for (auto& v : p.src_potential) v = charge(rng);
  return p;
}

namespace geometry {
namespace {

// Spreads the low 32 bits of v so bit k lands on bit 2k.
std::uint64_t spread_bits(std::uint64_t v) {
  v &= 0xFFFFFFFFull;
  v = (v | (v << 16)) & 0x0000FFFF0000FFFFull;
  v = (v | (v << 8)) & 0x00FF00FF00FF00FFull;
  v = (v | (v << 4)) & 0x0F0F0F0F0F0F0F0Full;
  v = (v | (v << 2)) & 0x3333333333333333ull;
  v = (v | (v << 1)) & 0x5555555555555555ull;
  return v;
}

std::uint32_t compact_bits(std::uint64_t v) {
  v &= 0x5555555555555555ull;
  v = (v | (v >> 1)) & 0x3333333333333333ull;
  v = (v | (v >> 2)) & 0x0F0F0F0F0F0F0F0Full;
  v = (v | (v >> 4)) & 0x00FF00FF00FF00FFull;
  v = (v | (v >> 8)) & 0x0000FFFF0000FFFFull;
  v = (v | (v >> 16)) & 0x00000000FFFFFFFFull;
  return static_cast<std::uint32_t>(v);
}

void check_level(int level, const char* who) {
  if (level < 1 || level > kMaxLevel) {
    fail(ErrorCode::InvalidArgument,
         std::string(who) + ": level " + std::to_string(level) +
             " outside [1, " + std::to_string(kMaxLevel) + "]");
  }
}

// Counting sort of point indices into boxes. Stable, so each box lists its
// points in ascending index order.
void bin_points(std::span<const double> xy, std::size_t n, int level,
                std::vector<std::size_t>& offsets,
                std::vector<std::uint32_t>& members) {
  const std::uint32_t side = cells_per_side(level);
  const std::size_t boxes = box_count(level);
  std::vector<Morton> code(n);
  for (std::size_t k = 0; k < n; ++k) {
    code[k] = morton_encode(cell_index(xy[2 * k], side),
                            cell_index(xy[2 * k + 1], side), level);
  }
  offsets.assign(boxes + 1, 0);
  for (auto c : code) ++offsets[c + 1];
  for (std::size_t b = 0; b < boxes; ++b) offsets[b + 1] += offsets[b];
  members.resize(n);
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (std::size_t k = 0; k < n; ++k) {
    members[cursor[code[k]]++] = static_cast<std::uint32_t>(k);
  }
}

// Morton codes of every point at kMaxLevel, sorted. A coarser level's code is
// a right shift, which keeps the order, so box counts are run lengths.
std::vector<Morton> sorted_finest_codes(std::span<const double> xy,
                                        std::size_t n) {
  const std::uint32_t side = cells_per_side(kMaxLevel);
  std::vector<Morton> code(n);
  for (std::size_t k = 0; k < n; ++k) {
    code[k] = morton_encode(cell_index(xy[2 * k], side),
                            cell_index(xy[2 * k + 1], side), kMaxLevel);
  }
  std::sort(code.begin(), code.end());
  return code;
}

std::size_t longest_run(const std::vector<Morton>& sorted, int level) {
  const int shift = 2 * (kMaxLevel - level);
  std::size_t best = 0, run = 0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    if (k > 0 && (sorted[k] >> shift) == (sorted[k - 1] >> shift)) {
      ++run;
    } else {
      run = 1;
    }
    best = std::max(best, run);
  }
  return best;
}

}  // namespace

Morton morton_encode(std::uint32_t ix, std::uint32_t iy, int level) {
  if (level < 1 || level > 32) {
    fail(ErrorCode::InvalidArgument, "morton_encode: bad level");
  }
  const std::uint64_t side = std::uint64_t{1} << (level - 1);
  if (ix >= side || iy >= side) {
    fail(ErrorCode::InvalidArgument,
         "morton_encode: grid coordinate (" + std::to_string(ix) + ", " +
             std::to_string(iy) + ") out of range at level " +
             std::to_string(level));
  }
  return spread_bits(ix) | (spread_bits(iy) << 1);
}

GridCell morton_decode(Morton code, int level) {
  if (level < 1 || level > 32 || code >= (Morton{1} << (2 * (level - 1)))) {
    fail(ErrorCode::InvalidArgument, "morton_decode: code out of range");
  }
  return {compact_bits(code), compact_bits(code >> 1)};
}

std::uint32_t cell_index(double coord, std::uint32_t side) {
  const double scaled = std::floor(coord * static_cast<double>(side));
  if (scaled <= 0.0) return 0;
  const auto k = static_cast<std::uint64_t>(scaled);
  return k >= side ? side - 1 : static_cast<std::uint32_t>(k);
}

std::size_t QuadTree::max_occupancy() const {
  std::size_t t = 0;
  for (std::size_t b = 0; b < num_boxes(); ++b) {
    t = std::max({t, source_count(b), target_count(b)});
  }
  return t;
}

QuadTree build_at_level(const PointSet& points, int ct, int level) {
  check_level(level, "build_at_level");
  if (ct < 1) fail(ErrorCode::InvalidArgument, "clustering threshold must be >= 1");
  QuadTree tree;
  tree.level_ = level;
  tree.ct_ = ct;
  tree.n_ = points.n;
  bin_points(points.src_xy, points.n, level, tree.src_offsets_, tree.src_members_);
  bin_points(points.tgt_xy, points.n, level, tree.tgt_offsets_, tree.tgt_members_);
  return tree;
}

QuadTree build_tree(const PointSet& points, int ct, int l_start,
                    int max_level) {
  if (ct < 1) fail(ErrorCode::InvalidArgument, "clustering threshold must be >= 1");
  if (l_start < 1) fail(ErrorCode::InvalidArgument, "l_start must be >= 1");
  if (max_level > kMaxLevel) max_level = kMaxLevel;
  if (l_start > max_level) {
    fail(ErrorCode::InvalidArgument, "l_start exceeds the level cap");
  }
  // Occupancy is checked on sorted codes so levels that fail never allocate
  // their 4^(L-1) box offsets.
  const auto src = sorted_finest_codes(points.src_xy, points.n);
  const auto tgt = sorted_finest_codes(points.tgt_xy, points.n);
  std::size_t worst = 0;
  for (int level = l_start; level <= max_level; ++level) {
    worst = std::max(longest_run(src, level), longest_run(tgt, level));
    if (worst <= static_cast<std::size_t>(ct)) {
      return build_at_level(points, ct, level);
    }
  }
  fail(ErrorCode::ConstructionFailure,
       "build_tree: no valid tree up to level " + std::to_string(max_level) +
           " (a box still holds " + std::to_string(worst) +
           " points with CT=" + std::to_string(ct) +
           "; duplicate coordinates?)");
}

QuadTree adjust_height(const QuadTree& tree, const PointSet& points,
                       int delta) {
  const int level = tree.level() + delta;
  if (level < 1) {
    fail(ErrorCode::InvalidArgument,
         "adjust_height: L + i = " + std::to_string(level) + " < 1");
  }
  check_level(level, "adjust_height");
  return build_at_level(points, tree.ct(), level);
}

Neighbors neighbors_e1(Morton box, int level) {
  const GridCell c = morton_decode(box, level);
  const std::int64_t side = cells_per_side(level);
  Neighbors out;
  for (std::int64_t dy = -1; dy <= 1; ++dy) {
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      const std::int64_t x = c.ix + dx;
      const std::int64_t y = c.iy + dy;
      if (x < 0 || y < 0 || x >= side || y >= side) continue;
      out.codes[out.count++] = morton_encode(static_cast<std::uint32_t>(x),
                                             static_cast<std::uint32_t>(y),
                                             level);
    }
  }
  std::sort(out.codes.begin(), out.codes.begin() + out.count);
  return out;
}

TreeStats stats(const QuadTree& tree) {
  TreeStats s;
  s.t = tree.max_occupancy();
  s.b_count = tree.num_boxes();
  s.l = tree.level();
  s.n = tree.num_points();
  s.d = static_cast<double>(s.n) / static_cast<double>(s.b_count);
  return s;
}

}  // namespace geometry
}  // namespace nf
