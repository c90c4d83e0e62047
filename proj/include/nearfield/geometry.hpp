#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace nf {

// Sources and targets share the count n. Coordinates are interleaved (x, y).
struct PointSet {
  std::size_t n = 0;
  std::vector<double> src_xy;
  std::vector<double> tgt_xy;
  std::vector<double> src_potential;
  std::uint64_t seed = 0;
};

/// Uniform points on the unit square, potentials uniform in [-1, 1].
/// Deterministic in `seed`; throws InvalidArgument for n == 0.
PointSet generate_points(std::size_t n, std::uint64_t seed);

namespace geometry {

inline constexpr int kDefaultStartLevel = 3;
inline constexpr int kMaxLevel = 16;

using Morton = std::uint64_t;

/// Interleaves grid coordinates: x in even bits, y in odd bits.
/// Requires ix, iy < 2^(level-1).
Morton morton_encode(std::uint32_t ix, std::uint32_t iy, int level);

struct GridCell {
  std::uint32_t ix;
  std::uint32_t iy;
  bool operator==(const GridCell&) const = default;
};
GridCell morton_decode(Morton code, int level);

/// Cells per side at `level` (2^(level-1)).
inline std::uint32_t cells_per_side(int level) {
  return std::uint32_t{1} << (level - 1);
}
inline std::size_t box_count(int level) {
  return std::size_t{1} << (2 * (level - 1));
}

/// Half-open cell index along one axis; the domain's upper edge folds into
/// the last cell.
std::uint32_t cell_index(double coord, std::uint32_t side);

/// Leaf level of a uniform quadtree. Boxes are indexed by their Morton code;
/// per-box membership is stored CSR-style with B+1 offsets, indices in
/// ascending point order within a box.
class QuadTree {
 public:
  QuadTree() = default;

  int level() const { return level_; }
  int ct() const { return ct_; }
  std::size_t num_points() const { return n_; }
  std::size_t num_boxes() const { return box_count(level_); }

  std::span<const std::uint32_t> sources(Morton box) const {
    return {src_members_.data() + src_offsets_[box],
            src_offsets_[box + 1] - src_offsets_[box]};
  }
  std::span<const std::uint32_t> targets(Morton box) const {
    return {tgt_members_.data() + tgt_offsets_[box],
            tgt_offsets_[box + 1] - tgt_offsets_[box]};
  }
  std::size_t source_count(Morton box) const {
    return src_offsets_[box + 1] - src_offsets_[box];
  }
  std::size_t target_count(Morton box) const {
    return tgt_offsets_[box + 1] - tgt_offsets_[box];
  }

  /// Largest per-box source or target count.
  std::size_t max_occupancy() const;

  friend QuadTree build_at_level(const PointSet&, int, int);

 private:
  int level_ = 0;
  int ct_ = 0;
  std::size_t n_ = 0;
  std::vector<std::size_t> src_offsets_;
  std::vector<std::uint32_t> src_members_;
  std::vector<std::size_t> tgt_offsets_;
  std::vector<std::uint32_t> tgt_members_;
};

struct TreeStats {
  std::size_t t = 0;  // max over boxes of max(sources, targets)
  double d = 0.0;     // N / 4^(L-1)
  std::size_t b_count = 0;
  int l = 0;
  std::size_t n = 0;
};

/// One iteration of the construction loop: bins points at a fixed level
/// without checking the clustering threshold.
QuadTree build_at_level(const PointSet& points, int ct, int level);

/// First tree from `l_start` upward whose boxes all hold at most `ct`
/// sources and `ct` targets. Throws ConstructionFailure past `max_level`.
QuadTree build_tree(const PointSet& points, int ct,
                    int l_start = kDefaultStartLevel,
                    int max_level = kMaxLevel);

/// Rebuilds the leaf level at L + delta, CT not re-checked.
QuadTree adjust_height(const QuadTree& tree, const PointSet& points,
                       int delta);

/// Fixed-capacity E1 neighbor list (at most the 3x3 block).
struct Neighbors {
  std::array<Morton, 9> codes{};
  std::size_t count = 0;

  const Morton* begin() const { return codes.data(); }
  const Morton* end() const { return codes.data() + count; }
  std::size_t size() const { return count; }
  Morton operator[](std::size_t k) const { return codes[k]; }
};

/// The box itself plus its adjacent boxes, ascending Morton order.
Neighbors neighbors_e1(Morton box, int level);

TreeStats stats(const QuadTree& tree);

}  // namespace geometry
}  // namespace nf
