#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "nearfield/geometry.hpp"
#include "nearfield/kernel.hpp"
#include "nearfield/layouts.hpp"

namespace nf::exec {

/// Data-parallel backend: `width` OS threads with static chunking of the
/// work-item range. Width 1 runs inline on the caller's thread.
struct ParallelContext {
  unsigned width = 1;
};

/// Splits [0, count) into `width` contiguous chunks and calls chunk(begin,
/// end) once per chunk, one thread each. chunk must not throw.
void parallel_for(const ParallelContext& ctx, std::size_t count,
                  const std::function<void(std::size_t, std::size_t)>& chunk);

struct NearFieldResult {
  std::vector<double> tgt_potentials;
  double wall_time = 0.0;  // seconds, parallel region only
  std::size_t work_items = 0;
};

/// Sequential reference: boxes in Morton order, each target against the
/// sources of its E1 block.
NearFieldResult run_baseline(const geometry::QuadTree& tree,
                             const PointSet& points, const KernelConfig& cfg);

/// One work-item per box. Throws LayoutCorrupt on malformed offsets or
/// out-of-range indices.
NearFieldResult run_indexing(const layouts::IndexingLayout& layout,
                             const KernelConfig& cfg,
                             const ParallelContext& ctx = {});

/// One work-item per target record. Throws LayoutCorrupt when a record's
/// count exceeds 9 * CT.
NearFieldResult run_repetition(const layouts::RepetitionLayout& layout,
                               const KernelConfig& cfg,
                               const ParallelContext& ctx = {});

void validate(const layouts::IndexingLayout& layout);
void validate(const layouts::RepetitionLayout& layout);

}  // namespace nf::exec
