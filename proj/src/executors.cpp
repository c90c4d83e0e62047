#include "nearfield/executors.hpp"

#include <algorithm>
#include <chrono>
#include <string>
#include <thread>

#include "nearfield/error.hpp"

namespace nf::exec {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

[[noreturn]] void corrupt(const std::string& what) {
  fail(ErrorCode::LayoutCorrupt, what);
}

void check_offsets(const std::vector<std::int32_t>& offsets,
                   std::size_t array_size, const char* name) {
  if (offsets.empty()) corrupt(std::string(name) + " is empty");
  if (offsets.front() != 0) corrupt(std::string(name) + "[0] != 0");
  for (std::size_t k = 1; k < offsets.size(); ++k) {
    if (offsets[k] < offsets[k - 1]) {
      corrupt(std::string(name) + " decreases at box " + std::to_string(k - 1));
    }
  }
  if (static_cast<std::size_t>(offsets.back()) != array_size) {
    corrupt(std::string(name) + " sentinel does not match its index array");
  }
}

void check_indices(const std::vector<std::int32_t>& idx, std::size_t n,
                   const char* name) {
  for (auto v : idx) {
    if (v < 0 || static_cast<std::size_t>(v) >= n) {
      corrupt(std::string(name) + " holds out-of-range index " +
              std::to_string(v));
    }
  }
}

}  // namespace

void parallel_for(const ParallelContext& ctx, std::size_t count,
                  const std::function<void(std::size_t, std::size_t)>& chunk) {
  const std::size_t width =
      std::clamp<std::size_t>(ctx.width, 1, std::max<std::size_t>(count, 1));
  if (width == 1) {
    chunk(0, count);
    return;
  }
  const std::size_t base = count / width;
  const std::size_t extra = count % width;
  std::vector<std::jthread> workers;
  workers.reserve(width - 1);
  std::size_t begin = 0;
  std::pair<std::size_t, std::size_t> own{0, 0};
  for (std::size_t w = 0; w < width; ++w) {
    const std::size_t end = begin + base + (w < extra ? 1 : 0);
    if (w == 0) {
      own = {begin, end};
    } else {
      workers.emplace_back([&chunk, begin, end] { chunk(begin, end); });
    }
    begin = end;
  }
  chunk(own.first, own.second);
}

void validate(const layouts::IndexingLayout& layout) {
  const std::size_t n = layout.n;
  if (layout.src_coords.size() != 2 * n || layout.tgt_coords.size() != 2 * n ||
      layout.src_potentials.size() != n) {
    corrupt("indexing layout point arrays do not match N");
  }
  if (layout.tgt_offsets.size() != layout.nei_src_offsets.size()) {
    corrupt("indexing layout offset arrays differ in length");
  }
  check_offsets(layout.tgt_offsets, layout.tgt_idx.size(), "tgt_offsets");
  check_offsets(layout.nei_src_offsets, layout.nei_src_idx.size(),
                "nei_src_offsets");
  check_indices(layout.tgt_idx, n, "tgt_idx");
  check_indices(layout.nei_src_idx, n, "nei_src_idx");
}

void validate(const layouts::RepetitionLayout& layout) {
  if (layout.ct < 1 || layout.stride != layouts::repetition_stride(layout.ct)) {
    corrupt("repetition stride does not match 3 + 27 CT");
  }
  if (layout.records.size() != layout.n * layout.stride) {
    corrupt("repetition record block is not N * stride slots");
  }
  const std::uint64_t cap = 9 * static_cast<std::uint64_t>(layout.ct);
  for (std::size_t j = 0; j < layout.n; ++j) {
    const auto count =
        layouts::decode_count(layout.records[j * layout.stride + 2]);
    if (count > cap) {
      corrupt("record " + std::to_string(j) + " claims " +
              std::to_string(count) + " sources, more than 9*CT = " +
              std::to_string(cap));
    }
  }
}

NearFieldResult run_baseline(const geometry::QuadTree& tree,
                             const PointSet& points, const KernelConfig& cfg) {
  if (tree.num_points() != points.n) {
    fail(ErrorCode::InvalidArgument, "tree was built for a different point set");
  }
  NearFieldResult out;
  out.tgt_potentials.assign(points.n, 0.0);
  out.work_items = 1;
  const auto start = Clock::now();
  const int level = tree.level();
  for (geometry::Morton box = 0; box < tree.num_boxes(); ++box) {
    const auto targets = tree.targets(box);
    if (targets.empty()) continue;
    const auto nbrs = geometry::neighbors_e1(box, level);
    for (auto j : targets) {
      const double tx = points.tgt_xy[2 * j];
      const double ty = points.tgt_xy[2 * j + 1];
      double acc = 0.0;
      for (auto nb : nbrs) {
        for (auto s : tree.sources(nb)) {
          acc += pair_potential(tx, ty, points.src_xy[2 * s],
                                points.src_xy[2 * s + 1],
                                points.src_potential[s], cfg);
        }
      }
      out.tgt_potentials[j] = acc;
    }
  }
  out.wall_time = seconds_since(start);
  return out;
}

NearFieldResult run_indexing(const layouts::IndexingLayout& layout,
                             const KernelConfig& cfg,
                             const ParallelContext& ctx) {
  validate(layout);
  NearFieldResult out;
  out.tgt_potentials.assign(layout.n, 0.0);
  const std::size_t boxes = layout.num_boxes();
  out.work_items = boxes;

  const double* src = layout.src_coords.data();
  const double* tgt = layout.tgt_coords.data();
  const double* q = layout.src_potentials.data();
  const std::int32_t* tgt_idx = layout.tgt_idx.data();
  const std::int32_t* tgt_off = layout.tgt_offsets.data();
  const std::int32_t* nei_idx = layout.nei_src_idx.data();
  const std::int32_t* nei_off = layout.nei_src_offsets.data();
  double* result = out.tgt_potentials.data();

  const auto start = Clock::now();
  parallel_for(ctx, boxes, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const std::int32_t t_lo = tgt_off[k], t_hi = tgt_off[k + 1];
      const std::int32_t s_lo = nei_off[k], s_hi = nei_off[k + 1];
      for (std::int32_t ti = t_lo; ti < t_hi; ++ti) {
        const std::int32_t j = tgt_idx[ti];
        const double tx = tgt[2 * j], ty = tgt[2 * j + 1];
        double acc = 0.0;
        for (std::int32_t si = s_lo; si < s_hi; ++si) {
          const std::int32_t s = nei_idx[si];
          acc += pair_potential(tx, ty, src[2 * s], src[2 * s + 1], q[s], cfg);
        }
        result[j] = acc;
      }
    }
  });
  out.wall_time = seconds_since(start);
  return out;
}

NearFieldResult run_repetition(const layouts::RepetitionLayout& layout,
                               const KernelConfig& cfg,
                               const ParallelContext& ctx) {
  validate(layout);
  NearFieldResult out;
  out.tgt_potentials.assign(layout.n, 0.0);
  out.work_items = layout.n;

  const double* records = layout.records.data();
  const std::size_t stride = layout.stride;
  double* result = out.tgt_potentials.data();

  const auto start = Clock::now();
  parallel_for(ctx, layout.n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const double* rec = records + j * stride;
      const double tx = rec[0], ty = rec[1];
      const auto count = layouts::decode_count(rec[2]);
      const double* slot = rec + layouts::kRecordHeaderSlots;
      double acc = 0.0;
      for (std::uint64_t s = 0; s < count; ++s, slot += layouts::kSlotsPerSource) {
        acc += pair_potential(tx, ty, slot[0], slot[1], slot[2], cfg);
      }
      result[j] = acc;
    }
  });
  out.wall_time = seconds_since(start);
  return out;
}

}  // namespace nf::exec
