#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nearfield/layouts.hpp"

namespace nf::exec {

enum class Method { Indexing, Repetition };

/// Region ids of the flat address space. The indexing layout's seven arrays
/// are placed back to back in declaration order starting at byte 0; the
/// repetition layout is the single record block.
enum class Region : std::uint8_t {
  SrcCoords = 0,
  TgtCoords = 1,
  TgtIdx = 2,
  TgtOffsets = 3,
  NeiSrcIdx = 4,
  NeiSrcOffsets = 5,
  SrcPotentials = 6,
  Records = 7,
};

struct AccessEvent {
  std::uint64_t offset;  // absolute byte offset in the flat address space
  std::uint32_t length;
  Region region;
};

/// Ordered read events per work-item, stored CSR-style.
struct AccessTrace {
  Method method = Method::Indexing;
  std::vector<AccessEvent> events;
  std::vector<std::size_t> item_offsets{0};  // work-items + 1
  std::uint64_t total_bytes = 0;             // extent of the address space

  std::size_t work_items() const { return item_offsets.size() - 1; }
  std::span<const AccessEvent> item(std::size_t k) const {
    return {events.data() + item_offsets[k],
            item_offsets[k + 1] - item_offsets[k]};
  }
};

/// Byte offset of each indexing region in the flat address space.
std::vector<std::uint64_t> indexing_region_bases(
    const layouts::IndexingLayout& layout);

/// Replays the read pattern of run_indexing / run_repetition. Validation
/// errors match the executor's.
AccessTrace trace_run(const layouts::IndexingLayout& layout);
AccessTrace trace_run(const layouts::RepetitionLayout& layout);

/// Per-work-item bank accounting shared by the exact miss-ratio metric and
/// its streaming variant.
struct BankCounts {
  std::uint64_t bank_bytes = 0;
  std::size_t work_items = 0;
  std::uint64_t total_runs = 0;       // sum over items of contiguous bank runs
  std::uint64_t occupied_banks = 0;   // distinct banks read by any item
  std::uint64_t layout_banks = 0;     // ceil(total_bytes / bank_bytes)
};

BankCounts count_banks(const AccessTrace& trace, std::uint64_t bank_bytes);

/// Same accounting without materializing the trace.
BankCounts count_banks(const layouts::IndexingLayout& layout,
                       std::uint64_t bank_bytes);
BankCounts count_banks(const layouts::RepetitionLayout& layout,
                       std::uint64_t bank_bytes);

}  // namespace nf::exec
