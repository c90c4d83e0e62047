#include "nearfield/trace.hpp"

#include <algorithm>

#include "nearfield/error.hpp"
#include "nearfield/executors.hpp"

namespace nf::exec {
namespace {

constexpr std::uint64_t kInt = sizeof(std::int32_t);
constexpr std::uint64_t kDouble = sizeof(double);

// Walks the executor's reads in order. Sink provides begin_item(k),
// read(region, offset, length) and end_item().
template <typename Sink>
void replay(const layouts::IndexingLayout& layout, Sink& sink) {
  const auto base = indexing_region_bases(layout);
  auto at = [&](Region r, std::uint64_t byte) {
    return base[static_cast<std::size_t>(r)] + byte;
  };
  for (std::size_t k = 0; k < layout.num_boxes(); ++k) {
    sink.begin_item(k);
    sink.read(Region::TgtOffsets, at(Region::TgtOffsets, k * kInt), 2 * kInt);
    sink.read(Region::NeiSrcOffsets, at(Region::NeiSrcOffsets, k * kInt),
              2 * kInt);
    const auto t_lo = layout.tgt_offsets[k], t_hi = layout.tgt_offsets[k + 1];
    const auto s_lo = layout.nei_src_offsets[k],
               s_hi = layout.nei_src_offsets[k + 1];
    for (auto ti = t_lo; ti < t_hi; ++ti) {
      const std::uint64_t j = static_cast<std::uint64_t>(layout.tgt_idx[ti]);
      sink.read(Region::TgtIdx, at(Region::TgtIdx, ti * kInt), kInt);
      sink.read(Region::TgtCoords, at(Region::TgtCoords, 2 * j * kDouble),
                2 * kDouble);
      for (auto si = s_lo; si < s_hi; ++si) {
        const std::uint64_t s =
            static_cast<std::uint64_t>(layout.nei_src_idx[si]);
        sink.read(Region::NeiSrcIdx, at(Region::NeiSrcIdx, si * kInt), kInt);
        sink.read(Region::SrcCoords, at(Region::SrcCoords, 2 * s * kDouble),
                  2 * kDouble);
        sink.read(Region::SrcPotentials,
                  at(Region::SrcPotentials, s * kDouble), kDouble);
      }
    }
    sink.end_item();
  }
}

template <typename Sink>
void replay(const layouts::RepetitionLayout& layout, Sink& sink) {
  const std::uint64_t record_bytes = layout.stride * kDouble;
  constexpr std::uint64_t header = layouts::kRecordHeaderSlots * kDouble;
  constexpr std::uint64_t triple = layouts::kSlotsPerSource * kDouble;
  for (std::size_t j = 0; j < layout.n; ++j) {
    sink.begin_item(j);
    const std::uint64_t start = j * record_bytes;
    sink.read(Region::Records, start, header);
    const auto count = layouts::decode_count(layout.records[j * layout.stride + 2]);
    for (std::uint64_t s = 0; s < count; ++s) {
      sink.read(Region::Records, start + header + s * triple, triple);
    }
    sink.end_item();
  }
}

std::uint64_t extent(const layouts::IndexingLayout& layout) {
  return indexing_region_bases(layout).back();
}
std::uint64_t extent(const layouts::RepetitionLayout& layout) {
  return layout.records.size() * kDouble;
}

struct TraceSink {
  AccessTrace& trace;
  void begin_item(std::size_t) {}
  void read(Region r, std::uint64_t offset, std::uint64_t length) {
    trace.events.push_back({offset, static_cast<std::uint32_t>(length), r});
  }
  void end_item() { trace.item_offsets.push_back(trace.events.size()); }
};

// Banks touched by the current item are gathered, then collapsed into
// maximal runs of consecutive bank indices.
class BankSink {
 public:
  BankSink(std::uint64_t bank_bytes, std::uint64_t total_bytes)
      : seen_((total_bytes + bank_bytes - 1) / bank_bytes, false) {
    counts_.bank_bytes = bank_bytes;
    counts_.layout_banks = seen_.size();
  }

  void begin_item(std::size_t) { banks_.clear(); }

  void read(Region, std::uint64_t offset, std::uint64_t length) {
    if (length == 0) return;
    const std::uint64_t first = offset / counts_.bank_bytes;
    const std::uint64_t last = (offset + length - 1) / counts_.bank_bytes;
    for (std::uint64_t b = first; b <= last; ++b) banks_.push_back(b);
  }

  void end_item() {
    ++counts_.work_items;
    std::sort(banks_.begin(), banks_.end());
    banks_.erase(std::unique(banks_.begin(), banks_.end()), banks_.end());
    for (std::size_t k = 0; k < banks_.size(); ++k) {
      if (k == 0 || banks_[k] != banks_[k - 1] + 1) ++counts_.total_runs;
      if (banks_[k] < seen_.size() && !seen_[banks_[k]]) {
        seen_[banks_[k]] = true;
        ++counts_.occupied_banks;
      }
    }
  }

  BankCounts result() const { return counts_; }

 private:
  BankCounts counts_;
  std::vector<std::uint64_t> banks_;
  std::vector<bool> seen_;
};

void check_bank_bytes(std::uint64_t bank_bytes) {
  if (bank_bytes == 0) fail(ErrorCode::InvalidArgument, "bank size must be > 0");
}

template <typename Layout>
BankCounts stream_banks(const Layout& layout, std::uint64_t bank_bytes) {
  check_bank_bytes(bank_bytes);
  validate(layout);
  BankSink sink(bank_bytes, extent(layout));
  replay(layout, sink);
  return sink.result();
}

}  // namespace

std::vector<std::uint64_t> indexing_region_bases(
    const layouts::IndexingLayout& layout) {
  const std::uint64_t sizes[] = {
      layout.src_coords.size() * kDouble,   layout.tgt_coords.size() * kDouble,
      layout.tgt_idx.size() * kInt,         layout.tgt_offsets.size() * kInt,
      layout.nei_src_idx.size() * kInt,     layout.nei_src_offsets.size() * kInt,
      layout.src_potentials.size() * kDouble,
  };
  std::vector<std::uint64_t> bases(std::size(sizes) + 1, 0);
  for (std::size_t r = 0; r < std::size(sizes); ++r) {
    bases[r + 1] = bases[r] + sizes[r];
  }
  return bases;
}

AccessTrace trace_run(const layouts::IndexingLayout& layout) {
  validate(layout);
  AccessTrace trace;
  trace.method = Method::Indexing;
  trace.total_bytes = extent(layout);
  TraceSink sink{trace};
  replay(layout, sink);
  return trace;
}

AccessTrace trace_run(const layouts::RepetitionLayout& layout) {
  validate(layout);
  AccessTrace trace;
  trace.method = Method::Repetition;
  trace.total_bytes = extent(layout);
  TraceSink sink{trace};
  replay(layout, sink);
  return trace;
}

BankCounts count_banks(const AccessTrace& trace, std::uint64_t bank_bytes) {
  check_bank_bytes(bank_bytes);
  BankSink sink(bank_bytes, trace.total_bytes);
  for (std::size_t k = 0; k < trace.work_items(); ++k) {
    sink.begin_item(k);
    for (const auto& e : trace.item(k)) sink.read(e.region, e.offset, e.length);
    sink.end_item();
  }
  return sink.result();
}

BankCounts count_banks(const layouts::IndexingLayout& layout,
                       std::uint64_t bank_bytes) {
  return stream_banks(layout, bank_bytes);
}

BankCounts count_banks(const layouts::RepetitionLayout& layout,
                       std::uint64_t bank_bytes) {
  return stream_banks(layout, bank_bytes);
}

}  // namespace nf::exec
