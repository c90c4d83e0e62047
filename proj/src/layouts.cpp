#include "nearfield/layouts.hpp"

#include <chrono>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <string>
#include <ostream>

#include "nearfield/error.hpp"

namespace nf::layouts {
namespace {

using Clock = std::chrono::steady_clock;

void check_inputs(const geometry::QuadTree& tree, const PointSet& points) {
  if (tree.num_points() != points.n) {
    fail(ErrorCode::InvalidArgument, "tree was built for a different point set");
  }
  if (points.n > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max())) {
    fail(ErrorCode::InvalidArgument, "point count exceeds 32-bit index range");
  }
}

// Little-endian is assumed for the host; static_assert keeps that honest.
static_assert(std::endian::native == std::endian::little,
              "dump format writes host memory directly");

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void put_array(std::ostream& out, const std::vector<T>& values) {
  put<std::uint64_t>(out, values.size());
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(T)));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) fail(ErrorCode::Io, "layout dump truncated");
  return value;
}

template <typename T>
std::vector<T> get_array(std::istream& in) {
  const auto count = get<std::uint64_t>(in);
  if (count > (std::uint64_t{1} << 40) / sizeof(T)) {
    fail(ErrorCode::Io, "layout dump array length implausible");
  }
  std::vector<T> values(count);
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(count * sizeof(T)));
  if (!in) fail(ErrorCode::Io, "layout dump truncated");
  return values;
}

void put_header(std::ostream& out, LayoutKind kind, std::size_t n, int level,
                int ct, std::size_t t) {
  out.write("NFL1", 4);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(kind));
  put<std::int64_t>(out, static_cast<std::int64_t>(n));
  put<std::int64_t>(out, level);
  put<std::int64_t>(out, ct);
  put<std::int64_t>(out, static_cast<std::int64_t>(t));
}

struct Header {
  LayoutKind kind;
  std::int64_t n, level, ct, t;
};

Header get_header(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "NFL1", 4) != 0) {
    fail(ErrorCode::Io, "not a layout dump (bad magic)");
  }
  Header h{};
  const auto kind = get<std::uint8_t>(in);
  if (kind > 1) fail(ErrorCode::Io, "unknown layout kind in dump");
  h.kind = static_cast<LayoutKind>(kind);
  h.n = get<std::int64_t>(in);
  h.level = get<std::int64_t>(in);
  h.ct = get<std::int64_t>(in);
  h.t = get<std::int64_t>(in);
  if (h.n < 0 || h.level < 1 || h.level > geometry::kMaxLevel || h.ct < 1 ||
      h.t < 0) {
    fail(ErrorCode::Io, "layout dump header out of range");
  }
  return h;
}

template <typename Layout>
void write_file(const std::string& path, const Layout& layout) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot open " + path + " for writing");
  write_dump(out, layout);
  out.flush();
  if (!out) fail(ErrorCode::Io, "write to " + path + " failed");
}

}  // namespace

std::uint64_t indexing_formula_bytes(std::uint64_t n, int level,
                                     std::uint64_t t) {
  const std::uint64_t four_pow_l = std::uint64_t{1} << (2 * level);
  return 40 * n + four_pow_l * (2 + 10 * t);
}

std::uint64_t repetition_formula_bytes(std::uint64_t n, int ct) {
  return 8 * n * (3 + 27 * static_cast<std::uint64_t>(ct));
}

IndexingLayout build_indexing(const geometry::QuadTree& tree,
                              const PointSet& points) {
  check_inputs(tree, points);
  const auto start = Clock::now();

  IndexingLayout out;
  const std::size_t n = points.n;
  const std::size_t boxes = tree.num_boxes();
  const int level = tree.level();

  out.src_coords = points.src_xy;
  out.tgt_coords = points.tgt_xy;
  out.src_potentials = points.src_potential;

  out.tgt_idx.reserve(n);
  out.tgt_offsets.resize(boxes + 1);
  out.nei_src_offsets.resize(boxes + 1);
  out.nei_src_idx.reserve(9 * n);

  for (geometry::Morton box = 0; box < boxes; ++box) {
    out.tgt_offsets[box] = static_cast<std::int32_t>(out.tgt_idx.size());
    for (auto j : tree.targets(box)) {
      out.tgt_idx.push_back(static_cast<std::int32_t>(j));
    }
    out.nei_src_offsets[box] = static_cast<std::int32_t>(out.nei_src_idx.size());
    for (auto nb : geometry::neighbors_e1(box, level)) {
      for (auto s : tree.sources(nb)) {
        out.nei_src_idx.push_back(static_cast<std::int32_t>(s));
      }
    }
  }
  if (out.nei_src_idx.size() >
      static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max())) {
    fail(ErrorCode::InvalidArgument, "neighbor index array exceeds 32-bit offsets");
  }
  out.tgt_offsets[boxes] = static_cast<std::int32_t>(out.tgt_idx.size());
  out.nei_src_offsets[boxes] = static_cast<std::int32_t>(out.nei_src_idx.size());

  out.build_seconds =
      std::chrono::duration<double>(Clock::now() - start).count();

  out.n = n;
  out.level = level;
  out.ct = tree.ct();
  out.t = tree.max_occupancy();
  out.reported_bytes = indexing_formula_bytes(n, level, out.t);
  out.actual_bytes =
      sizeof(double) * (out.src_coords.size() + out.tgt_coords.size() +
                        out.src_potentials.size()) +
      sizeof(std::int32_t) * (out.tgt_idx.size() + out.tgt_offsets.size() +
                              out.nei_src_idx.size() +
                              out.nei_src_offsets.size());
  return out;
}

RepetitionLayout build_repetition(const geometry::QuadTree& tree,
                                  const PointSet& points, int capacity) {
  check_inputs(tree, points);
  if (capacity < 0) fail(ErrorCode::InvalidArgument, "negative record capacity");
  const int ct = capacity == 0 ? tree.ct() : capacity;
  const auto start = Clock::now();

  RepetitionLayout out;
  const std::size_t n = points.n;
  const int level = tree.level();
  const std::size_t stride = repetition_stride(ct);
  out.records.assign(n * stride, 0.0);

  for (geometry::Morton box = 0; box < tree.num_boxes(); ++box) {
    const auto targets = tree.targets(box);
    if (targets.empty()) continue;
    const auto nbrs = geometry::neighbors_e1(box, level);
    for (auto j : targets) {
      double* rec = out.records.data() + j * stride;
      rec[0] = points.tgt_xy[2 * j];
      rec[1] = points.tgt_xy[2 * j + 1];
      double* slot = rec + kRecordHeaderSlots;
      std::uint32_t count = 0;
      for (auto nb : nbrs) {
        for (auto s : tree.sources(nb)) {
          if (slot + kSlotsPerSource > rec + stride) {
            fail(ErrorCode::InvalidArgument,
                 "box neighborhood exceeds the 9*CT record capacity (CT=" +
                     std::to_string(ct) + ")");
          }
          slot[0] = points.src_xy[2 * s];
          slot[1] = points.src_xy[2 * s + 1];
          slot[2] = points.src_potential[s];
          slot += kSlotsPerSource;
          ++count;
        }
      }
      rec[2] = encode_count(count);
    }
  }

  out.build_seconds =
      std::chrono::duration<double>(Clock::now() - start).count();

  out.n = n;
  out.level = level;
  out.ct = ct;
  out.t = tree.max_occupancy();
  out.stride = stride;
  out.reported_bytes = repetition_formula_bytes(n, ct);
  return out;
}

void write_dump(std::ostream& out, const IndexingLayout& layout) {
  put_header(out, LayoutKind::Indexing, layout.n, layout.level, layout.ct,
             layout.t);
  put_array(out, layout.src_coords);
  put_array(out, layout.tgt_coords);
  put_array(out, layout.tgt_idx);
  put_array(out, layout.tgt_offsets);
  put_array(out, layout.nei_src_idx);
  put_array(out, layout.nei_src_offsets);
  put_array(out, layout.src_potentials);
}

void write_dump(std::ostream& out, const RepetitionLayout& layout) {
  put_header(out, LayoutKind::Repetition, layout.n, layout.level, layout.ct,
             layout.t);
  put_array(out, layout.records);
}

void write_dump_file(const std::string& path, const IndexingLayout& layout) {
  write_file(path, layout);
}

void write_dump_file(const std::string& path, const RepetitionLayout& layout) {
  write_file(path, layout);
}

LayoutKind peek_dump_kind(std::istream& in) {
  const auto pos = in.tellg();
  const Header h = get_header(in);
  in.seekg(pos);
  return h.kind;
}

IndexingLayout read_indexing_dump(std::istream& in) {
  const Header h = get_header(in);
  if (h.kind != LayoutKind::Indexing) {
    fail(ErrorCode::Io, "dump holds a repetition layout, not indexing");
  }
  IndexingLayout out;
  out.n = static_cast<std::size_t>(h.n);
  out.level = static_cast<int>(h.level);
  out.ct = static_cast<int>(h.ct);
  out.t = static_cast<std::size_t>(h.t);
  out.src_coords = get_array<double>(in);
  out.tgt_coords = get_array<double>(in);
  out.tgt_idx = get_array<std::int32_t>(in);
  out.tgt_offsets = get_array<std::int32_t>(in);
  out.nei_src_idx = get_array<std::int32_t>(in);
  out.nei_src_offsets = get_array<std::int32_t>(in);
  out.src_potentials = get_array<double>(in);
  out.reported_bytes = indexing_formula_bytes(out.n, out.level, out.t);
  out.actual_bytes =
      sizeof(double) * (out.src_coords.size() + out.tgt_coords.size() +
                        out.src_potentials.size()) +
      sizeof(std::int32_t) * (out.tgt_idx.size() + out.tgt_offsets.size() +
                              out.nei_src_idx.size() +
                              out.nei_src_offsets.size());
  return out;
}

RepetitionLayout read_repetition_dump(std::istream& in) {
  const Header h = get_header(in);
  if (h.kind != LayoutKind::Repetition) {
    fail(ErrorCode::Io, "dump holds an indexing layout, not repetition");
  }
  RepetitionLayout out;
  out.n = static_cast<std::size_t>(h.n);
  out.level = static_cast<int>(h.level);
  out.ct = static_cast<int>(h.ct);
  out.t = static_cast<std::size_t>(h.t);
  out.stride = repetition_stride(out.ct);
  out.records = get_array<double>(in);
  if (out.records.size() != out.n * out.stride) {
    fail(ErrorCode::Io, "repetition dump record block has the wrong size");
  }
  out.reported_bytes = repetition_formula_bytes(out.n, out.ct);
  return out;
}

}  // namespace nf::layouts
