#pragma once

#include <bit>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nearfield/geometry.hpp"

namespace nf::layouts {

/// Shared-array (SoA) layout: one work-item per box, two levels of index
/// indirection. Offsets carry a sentinel entry, so box k's span is
/// [off[k], off[k+1]).
struct IndexingLayout {
  std::vector<double> src_coords;          // 2N
  std::vector<double> tgt_coords;          // 2N
  std::vector<std::int32_t> tgt_idx;       // N, grouped by box
  std::vector<std::int32_t> tgt_offsets;   // B+1
  std::vector<std::int32_t> nei_src_idx;   // per box: sources of its E1 block
  std::vector<std::int32_t> nei_src_offsets;  // B+1
  std::vector<double> src_potentials;      // N

  std::size_t n = 0;
  int level = 0;
  int ct = 0;
  std::size_t t = 0;
  std::uint64_t reported_bytes = 0;  // 40N + 4^L (2 + 10t)
  std::uint64_t actual_bytes = 0;    // packed arrays as stored
  double build_seconds = 0.0;

  std::size_t num_boxes() const {
    return tgt_offsets.empty() ? 0 : tgt_offsets.size() - 1;
  }
};

/// Redundant fixed-stride (AoS) layout: record j belongs to target j and is
/// self-contained: [x_t, y_t, count, (x_s, y_s, q_s) * count, zero tail].
struct RepetitionLayout {
  std::vector<double> records;  // N * stride

  std::size_t n = 0;
  int level = 0;
  int ct = 0;
  std::size_t t = 0;
  std::size_t stride = 0;  // 3 + 27 CT slots
  std::uint64_t reported_bytes = 0;
  double build_seconds = 0.0;

  std::span<const double> record(std::size_t j) const {
    return {records.data() + j * stride, stride};
  }
};

inline constexpr std::size_t kRecordHeaderSlots = 3;
inline constexpr std::size_t kSlotsPerSource = 3;

inline std::size_t repetition_stride(int ct) {
  return kRecordHeaderSlots + 27 * static_cast<std::size_t>(ct);
}

// The count slot holds the integer in its low four bytes, high bytes zero.
inline double encode_count(std::uint32_t count) {
  return std::bit_cast<double>(static_cast<std::uint64_t>(count));
}
inline std::uint64_t decode_count(double slot) {
  return std::bit_cast<std::uint64_t>(slot);
}

std::uint64_t indexing_formula_bytes(std::uint64_t n, int level,
                                     std::uint64_t t);
std::uint64_t repetition_formula_bytes(std::uint64_t n, int ct);

IndexingLayout build_indexing(const geometry::QuadTree& tree,
                              const PointSet& points);
/// Records are sized for `capacity` points per box (0 means the tree's CT).
/// Trees from adjust_height with i < 0 can exceed CT and need a larger
/// capacity; a neighborhood that does not fit throws InvalidArgument.
RepetitionLayout build_repetition(const geometry::QuadTree& tree,
                                  const PointSet& points, int capacity = 0);

// Binary dump: "NFL1", kind byte (0 indexing, 1 repetition), then N, L, CT, t
// as little-endian int64, then each array as a uint64 element count followed
// by its little-endian elements.
enum class LayoutKind : std::uint8_t { Indexing = 0, Repetition = 1 };

void write_dump(std::ostream& out, const IndexingLayout& layout);
void write_dump(std::ostream& out, const RepetitionLayout& layout);
void write_dump_file(const std::string& path, const IndexingLayout& layout);
void write_dump_file(const std::string& path, const RepetitionLayout& layout);

LayoutKind peek_dump_kind(std::istream& in);
IndexingLayout read_indexing_dump(std::istream& in);
RepetitionLayout read_repetition_dump(std::istream& in);

}  // namespace nf::layouts
