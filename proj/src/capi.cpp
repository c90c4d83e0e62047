#include "nearfield/nearfield.h"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <new>
#include <string>

#include "nearfield/bench.hpp"
#include "nearfield/error.hpp"
#include "nearfield/executors.hpp"
#include "nearfield/layouts.hpp"
#include "nearfield/perf_model.hpp"
#include "nearfield/trace.hpp"

struct nf_points {
  nf::PointSet value;
};
struct nf_tree {
  nf::geometry::QuadTree value;
};
struct nf_indexing {
  nf::layouts::IndexingLayout value;
};
struct nf_repetition {
  nf::layouts::RepetitionLayout value;
};
struct nf_rows {
  std::vector<nf::bench::BenchRow> value;
};

namespace {

thread_local std::string g_last_error;

nf_status to_status(nf::ErrorCode code) {
  switch (code) {
    case nf::ErrorCode::InvalidArgument: return NF_ERR_INVALID_ARGUMENT;
    case nf::ErrorCode::ConstructionFailure: return NF_ERR_CONSTRUCTION_FAILURE;
    case nf::ErrorCode::LayoutCorrupt: return NF_ERR_LAYOUT_CORRUPT;
    case nf::ErrorCode::UndefinedMetric: return NF_ERR_UNDEFINED_METRIC;
    case nf::ErrorCode::InsufficientData: return NF_ERR_INSUFFICIENT_DATA;
    case nf::ErrorCode::Io: return NF_ERR_IO;
  }
  return NF_ERR_INTERNAL;
}

// Runs body, translating exceptions into status codes.
template <typename F>
nf_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return NF_OK;
  } catch (const nf::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return NF_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return NF_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) nf::fail(nf::ErrorCode::InvalidArgument, what);
}

nf::KernelConfig kernel_config(double epsilon) {
  nf::KernelConfig cfg;
  if (epsilon > 0) cfg.epsilon = epsilon;
  return cfg;
}

void copy_reason(char* dst, std::size_t len, const std::string& src) {
  const std::size_t k = std::min(len - 1, src.size());
  std::memcpy(dst, src.data(), k);
  dst[k] = '\0';
}

nf_bench_row to_c(const nf::bench::BenchRow& r) {
  nf_bench_row c{};
  c.n = r.n;
  c.ct = r.ct;
  c.l = r.l;
  c.i = r.i;
  c.t = r.t;
  c.d = r.d;
  c.bytes_idx = r.bytes_idx;
  c.bytes_rep = r.bytes_rep;
  c.collect_idx_s = r.collect_idx_s;
  c.collect_rep_s = r.collect_rep_s;
  c.kernel_idx_s = r.kernel_idx_s;
  c.kernel_rep_s = r.kernel_rep_s;
  c.base1_s = r.base1_s;
  c.base2_s = r.base2_s;
  c.x_collect = r.x_collect;
  c.x_kernel = r.x_kernel;
  c.x_total = r.x_total;
  c.pred_x_collect = r.pred_x_collect;
  c.pred_x_kernel = r.pred_x_kernel;
  c.pred_x_total = r.pred_x_total;
  c.miss_exact_idx = r.miss_exact_idx;
  c.miss_exact_rep = r.miss_exact_rep;
  c.skipped = r.skipped ? 1 : 0;
  copy_reason(c.reason, sizeof c.reason, r.skip_reason);
  return c;
}

nf::bench::BenchRow from_c(const nf_bench_row& c) {
  nf::bench::BenchRow r;
  r.n = c.n;
  r.ct = c.ct;
  r.l = c.l;
  r.i = c.i;
  r.t = c.t;
  r.d = c.d;
  r.bytes_idx = c.bytes_idx;
  r.bytes_rep = c.bytes_rep;
  r.collect_idx_s = c.collect_idx_s;
  r.collect_rep_s = c.collect_rep_s;
  r.kernel_idx_s = c.kernel_idx_s;
  r.kernel_rep_s = c.kernel_rep_s;
  r.base1_s = c.base1_s;
  r.base2_s = c.base2_s;
  r.x_collect = c.x_collect;
  r.x_kernel = c.x_kernel;
  r.x_total = c.x_total;
  r.pred_x_collect = c.pred_x_collect;
  r.pred_x_kernel = c.pred_x_kernel;
  r.pred_x_total = c.pred_x_total;
  r.miss_exact_idx = c.miss_exact_idx;
  r.miss_exact_rep = c.miss_exact_rep;
  r.skipped = c.skipped != 0;
  r.skip_reason = std::string(c.reason, strnlen(c.reason, sizeof c.reason));
  return r;
}

nf::model::ProblemShape to_shape(const nf_shape& s) {
  nf::model::ProblemShape out;
  out.n = s.n;
  out.ct = s.ct;
  out.l = s.l;
  out.t = s.t;
  out.d = s.d > 0 ? s.d : s.n / nf::model::four_pow(s.l - 1);
  out.i = s.i;
  return out;
}

nf::model::HardwareParams to_hw(const nf_hardware& h) {
  return {h.m_indexing, h.m_repetition, h.o1, h.bank_bytes, h.total_cores,
          h.find_nei_cost};
}

nf::model::ModelCoefficients to_coeff(const nf_coefficients& c) {
  return {c.alpha, c.beta, c.gamma, c.lambda_ram, c.lambda_gpu};
}

void fill_miss(const nf::exec::BankCounts& counts, nf_miss_ratio* out) {
  const auto r = nf::model::miss_ratio_from_counts(counts);
  out->per_item = r.per_item;
  out->summed = r.summed;
  out->total_runs = counts.total_runs;
  out->occupied_banks = counts.occupied_banks;
  out->layout_banks = counts.layout_banks;
  out->work_items = counts.work_items;
}

nf_status membership(const nf_tree* tree, uint64_t box, bool sources,
                     uint32_t* out, size_t capacity, size_t* count) {
  return guarded([&] {
    require(tree && count, "null argument");
    require(box < tree->value.num_boxes(), "box index out of range");
    const auto span =
        sources ? tree->value.sources(box) : tree->value.targets(box);
    *count = span.size();
    if (out) {
      require(capacity >= span.size(), "output buffer too small");
      std::copy(span.begin(), span.end(), out);
    }
  });
}

}  // namespace

extern "C" {

const char* nf_version(void) { return "1.0.0"; }

const char* nf_status_name(nf_status status) {
  switch (status) {
    case NF_OK: return "ok";
    case NF_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case NF_ERR_CONSTRUCTION_FAILURE: return "construction-failure";
    case NF_ERR_LAYOUT_CORRUPT: return "layout-corrupt";
    case NF_ERR_UNDEFINED_METRIC: return "undefined-metric";
    case NF_ERR_INSUFFICIENT_DATA: return "insufficient-data";
    case NF_ERR_IO: return "io-error";
    case NF_ERR_INTERNAL: return "internal-error";
  }
  return "unknown";
}

const char* nf_last_error(void) { return g_last_error.c_str(); }

nf_status nf_points_generate(size_t n, uint64_t seed, nf_points** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = new nf_points{nf::generate_points(n, seed)};
  });
}

nf_status nf_points_create(size_t n, const double* src_xy, const double* tgt_xy,
                           const double* src_potential, nf_points** out) {
  return guarded([&] {
    require(out && src_xy && tgt_xy && src_potential, "null argument");
    require(n >= 1, "n must be >= 1");
    nf::PointSet p;
    p.n = n;
    p.src_xy.assign(src_xy, src_xy + 2 * n);
    p.tgt_xy.assign(tgt_xy, tgt_xy + 2 * n);
    p.src_potential.assign(src_potential, src_potential + n);
    for (double v : p.src_xy) require(v >= 0.0 && v <= 1.0, "coordinate outside [0,1]");
    for (double v : p.tgt_xy) require(v >= 0.0 && v <= 1.0, "coordinate outside [0,1]");
    *out = new nf_points{std::move(p)};
  });
}

void nf_points_destroy(nf_points* points) { delete points; }

size_t nf_points_count(const nf_points* points) {
  return points ? points->value.n : 0;
}
const double* nf_points_src_xy(const nf_points* points) {
  return points ? points->value.src_xy.data() : nullptr;
}
const double* nf_points_tgt_xy(const nf_points* points) {
  return points ? points->value.tgt_xy.data() : nullptr;
}
const double* nf_points_src_potential(const nf_points* points) {
  return points ? points->value.src_potential.data() : nullptr;
}

nf_status nf_tree_build(const nf_points* points, int ct, int l_start,
                        int max_level, nf_tree** out) {
  return guarded([&] {
    require(points && out, "null argument");
    const int cap = max_level > 0 ? max_level : nf::geometry::kMaxLevel;
    *out = new nf_tree{nf::geometry::build_tree(points->value, ct, l_start, cap)};
  });
}

nf_status nf_tree_build_at_level(const nf_points* points, int ct, int level,
                                 nf_tree** out) {
  return guarded([&] {
    require(points && out, "null argument");
    *out = new nf_tree{nf::geometry::build_at_level(points->value, ct, level)};
  });
}

nf_status nf_tree_adjust(const nf_tree* tree, const nf_points* points,
                         int delta, nf_tree** out) {
  return guarded([&] {
    require(tree && points && out, "null argument");
    *out = new nf_tree{
        nf::geometry::adjust_height(tree->value, points->value, delta)};
  });
}

void nf_tree_destroy(nf_tree* tree) { delete tree; }

nf_status nf_tree_stats_get(const nf_tree* tree, nf_tree_stats* out) {
  return guarded([&] {
    require(tree && out, "null argument");
    const auto s = nf::geometry::stats(tree->value);
    *out = {s.t, s.d, s.b_count, s.l, s.n};
  });
}

nf_status nf_tree_box_sources(const nf_tree* tree, uint64_t box, uint32_t* out,
                              size_t capacity, size_t* count) {
  return membership(tree, box, true, out, capacity, count);
}

nf_status nf_tree_box_targets(const nf_tree* tree, uint64_t box, uint32_t* out,
                              size_t capacity, size_t* count) {
  return membership(tree, box, false, out, capacity, count);
}

nf_status nf_morton_encode(uint32_t ix, uint32_t iy, int level, uint64_t* out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    *out = nf::geometry::morton_encode(ix, iy, level);
  });
}

nf_status nf_morton_decode(uint64_t code, int level, uint32_t* ix,
                           uint32_t* iy) {
  return guarded([&] {
    require(ix && iy, "null argument");
    const auto c = nf::geometry::morton_decode(code, level);
    *ix = c.ix;
    *iy = c.iy;
  });
}

nf_status nf_neighbors_e1(uint64_t box, int level, uint64_t out[9],
                          size_t* count) {
  return guarded([&] {
    require(out && count, "null argument");
    const auto nb = nf::geometry::neighbors_e1(box, level);
    std::copy(nb.begin(), nb.end(), out);
    *count = nb.size();
  });
}

nf_status nf_indexing_build(const nf_tree* tree, const nf_points* points,
                            nf_indexing** out) {
  return guarded([&] {
    require(tree && points && out, "null argument");
    *out = new nf_indexing{nf::layouts::build_indexing(tree->value, points->value)};
  });
}

void nf_indexing_destroy(nf_indexing* layout) { delete layout; }

nf_status nf_indexing_info(const nf_indexing* layout, nf_layout_info* out) {
  return guarded([&] {
    require(layout && out, "null argument");
    const auto& l = layout->value;
    *out = {l.n, l.level, l.ct, l.t, l.reported_bytes, l.actual_bytes,
            l.build_seconds, l.num_boxes(), 0};
  });
}

nf_status nf_indexing_dump(const nf_indexing* layout, const char* path) {
  return guarded([&] {
    require(layout && path, "null argument");
    nf::layouts::write_dump_file(path, layout->value);
  });
}

nf_status nf_indexing_load(const char* path, nf_indexing** out) {
  return guarded([&] {
    require(path && out, "null argument");
    std::ifstream in(path, std::ios::binary);
    if (!in) nf::fail(nf::ErrorCode::Io, std::string("cannot open ") + path);
    *out = new nf_indexing{nf::layouts::read_indexing_dump(in)};
  });
}

nf_status nf_repetition_build(const nf_tree* tree, const nf_points* points,
                              int capacity, nf_repetition** out) {
  return guarded([&] {
    require(tree && points && out, "null argument");
    *out = new nf_repetition{
        nf::layouts::build_repetition(tree->value, points->value, capacity)};
  });
}

void nf_repetition_destroy(nf_repetition* layout) { delete layout; }

nf_status nf_repetition_info(const nf_repetition* layout, nf_layout_info* out) {
  return guarded([&] {
    require(layout && out, "null argument");
    const auto& l = layout->value;
    *out = {l.n, l.level, l.ct, l.t, l.reported_bytes,
            l.records.size() * sizeof(double), l.build_seconds, l.n, l.stride};
  });
}

nf_status nf_repetition_dump(const nf_repetition* layout, const char* path) {
  return guarded([&] {
    require(layout && path, "null argument");
    nf::layouts::write_dump_file(path, layout->value);
  });
}

nf_status nf_repetition_load(const char* path, nf_repetition** out) {
  return guarded([&] {
    require(path && out, "null argument");
    std::ifstream in(path, std::ios::binary);
    if (!in) nf::fail(nf::ErrorCode::Io, std::string("cannot open ") + path);
    *out = new nf_repetition{nf::layouts::read_repetition_dump(in)};
  });
}

namespace {

nf_status deliver(const nf::exec::NearFieldResult& r, double* out,
                  size_t out_len, nf_run_info* info) {
  require(out_len >= r.tgt_potentials.size(), "output buffer shorter than N");
  std::copy(r.tgt_potentials.begin(), r.tgt_potentials.end(), out);
  if (info) *info = {r.wall_time, r.work_items};
  return NF_OK;
}

}  // namespace

nf_status nf_run_baseline(const nf_tree* tree, const nf_points* points,
                          double epsilon, double* out, size_t out_len,
                          nf_run_info* info) {
  return guarded([&] {
    require(tree && points && out, "null argument");
    deliver(nf::exec::run_baseline(tree->value, points->value,
                                   kernel_config(epsilon)),
            out, out_len, info);
  });
}

nf_status nf_run_indexing(const nf_indexing* layout, double epsilon,
                          unsigned width, double* out, size_t out_len,
                          nf_run_info* info) {
  return guarded([&] {
    require(layout && out, "null argument");
    deliver(nf::exec::run_indexing(layout->value, kernel_config(epsilon),
                                   {std::max(width, 1u)}),
            out, out_len, info);
  });
}

nf_status nf_run_repetition(const nf_repetition* layout, double epsilon,
                            unsigned width, double* out, size_t out_len,
                            nf_run_info* info) {
  return guarded([&] {
    require(layout && out, "null argument");
    deliver(nf::exec::run_repetition(layout->value, kernel_config(epsilon),
                                     {std::max(width, 1u)}),
            out, out_len, info);
  });
}

nf_status nf_miss_ratio_indexing(const nf_indexing* layout, uint64_t bank_bytes,
                                 nf_miss_ratio* out) {
  return guarded([&] {
    require(layout && out, "null argument");
    const auto b = bank_bytes ? bank_bytes : nf::model::kDefaultBankBytes;
    fill_miss(nf::exec::count_banks(layout->value, b), out);
  });
}

nf_status nf_miss_ratio_repetition(const nf_repetition* layout,
                                   uint64_t bank_bytes, nf_miss_ratio* out) {
  return guarded([&] {
    require(layout && out, "null argument");
    const auto b = bank_bytes ? bank_bytes : nf::model::kDefaultBankBytes;
    fill_miss(nf::exec::count_banks(layout->value, b), out);
  });
}

void nf_model_constants_get(nf_model_constants* out) {
  if (!out) return;
  namespace m = nf::model;
  *out = {m::kCollectVolumeDivisor,   m::kKernelSpeedupConstant,
          m::kKernelSpeedupConstantExact, m::kMissQuotientNumerator,
          m::kIndexingThreadMissBytes, m::kDefaultBankBytes};
}

void nf_model_reference_coefficients(nf_coefficients* out) {
  if (!out) return;
  const auto c = nf::model::reference_coefficients();
  *out = {c.alpha, c.beta, c.gamma, c.lambda_ram, c.lambda_gpu};
}

void nf_model_default_hardware(nf_hardware* out) {
  if (!out) return;
  const nf::model::HardwareParams h;
  *out = {h.m_indexing, h.m_repetition, h.o1, h.bank_bytes, h.total_cores,
          h.find_nei_cost};
}

nf_status nf_model_evaluate(const nf_shape* shape, const nf_hardware* hw,
                            const nf_coefficients* coeff, nf_model_report* out) {
  return guarded([&] {
    require(shape && hw && coeff && out, "null argument");
    require(shape->n > 0 && shape->l >= 1 && shape->ct >= 1, "invalid shape");
    namespace m = nf::model;
    const auto s = to_shape(*shape);
    const auto h = to_hw(*hw);
    const auto c = to_coeff(*coeff);
    nf_model_report r{};
    r.collect_time_indexing = m::collect_time_indexing(s, h);
    r.collect_time_repetition = m::collect_time_repetition(s, h);
    r.memory_indexing = m::memory_indexing(s);
    r.memory_repetition = m::memory_repetition(s);
    r.kernel_time_indexing = m::kernel_time_indexing(s, h);
    r.kernel_time_indexing_expanded = m::kernel_time_indexing_expanded(s, h);
    r.kernel_time_repetition = m::kernel_time_repetition(s, h);
    r.miss_ratio_indexing_model = m::miss_ratio_indexing_model(s);
    r.miss_ratio_indexing_floor = m::miss_ratio_indexing_floor(s, h.bank_bytes);
    r.miss_ratio_repetition_model = m::miss_ratio_repetition_model(s);
    r.miss_ratio_quotient = m::miss_ratio_quotient(s);
    r.miss_ratio_quotient_bound = m::miss_ratio_quotient_bound(s.n);
    r.volume_ratio = m::volume_ratio(s);
    r.speedup_collect = m::speedup_collect(c, s);
    r.speedup_transfer = m::speedup_transfer(s);
    r.speedup_kernel = m::speedup_kernel(c, s);
    r.speedup_total = m::speedup_total(c, s);
    r.speedup_total_adjusted = m::speedup_total_adjusted(c, s, s.i);
    r.speedup_total_adjusted_normalized =
        m::speedup_total_adjusted_normalized(c, s.i);
    r.kernel_break_even_n = m::kernel_break_even_n(c.lambda_gpu, s.t, s.d);
    *out = r;
  });
}

void nf_experiment_default_options(nf_experiment_options* out) {
  if (!out) return;
  const nf::bench::ExperimentOptions o;
  nf_coefficients c;
  nf_model_reference_coefficients(&c);
  *out = {o.ct, o.l_start, o.repeats, o.seed, o.width, c, o.bank_bytes,
          o.miss_ratio ? 1 : 0, o.kernel.epsilon};
}

void nf_grid_default_budget(nf_grid_budget* out) {
  if (!out) return;
  const nf::bench::GridBudget b;
  *out = {b.max_n, b.max_level, 4, 11};
}

nf_status nf_plan_cells(nf_plan_kind kind, double scale,
                        const nf_grid_budget* budget, nf_plan_cell* out,
                        size_t capacity, size_t* count) {
  return guarded([&] {
    require(count != nullptr, "null argument");
    require(scale > 0, "scale must be positive");
    nf::bench::SweepPlan plan;
    switch (kind) {
      case NF_PLAN_COLLECT_SWEEP: plan = nf::bench::plan_collect_sweep(scale); break;
      case NF_PLAN_KERNEL_SWEEP: plan = nf::bench::plan_kernel_sweep(scale); break;
      case NF_PLAN_GRID: plan = nf::bench::plan_grid(); break;
      default: require(false, "unknown plan kind");
    }
    nf_grid_budget b;
    nf_grid_default_budget(&b);
    if (budget) b = *budget;
    if (kind == NF_PLAN_GRID) {
      std::erase_if(plan.levels,
                    [&](int l) { return l < b.level_min || l > b.level_max; });
      require(!plan.levels.empty(), "grid level range is empty");
    }
    const auto cells = nf::bench::expand(plan, {b.max_n, b.max_level});
    *count = cells.size();
    if (!out) return;
    require(capacity >= cells.size(), "output buffer too small");
    for (std::size_t k = 0; k < cells.size(); ++k) {
      nf_plan_cell c{};
      c.n = cells[k].n;
      c.level = cells[k].level;
      c.i = cells[k].i;
      c.skipped = cells[k].skip_reason ? 1 : 0;
      copy_reason(c.reason, sizeof c.reason, cells[k].skip_reason.value_or(""));
      out[k] = c;
    }
  });
}

nf_status nf_run_experiment(const nf_plan_cell* cell,
                            const nf_experiment_options* options,
                            nf_bench_row* out, char* audit, size_t audit_len) {
  return guarded([&] {
    require(cell && options && out, "null argument");
    nf::bench::PlanCell pc;
    pc.n = cell->n;
    pc.level = cell->level;
    pc.i = cell->i;
    if (cell->skipped) {
      pc.skip_reason = std::string(cell->reason, strnlen(cell->reason, sizeof cell->reason));
    }
    nf::bench::ExperimentOptions o;
    o.ct = options->ct;
    o.l_start = options->l_start;
    o.repeats = options->repeats;
    o.seed = options->seed;
    o.width = std::max(options->width, 1u);
    o.coefficients = to_coeff(options->coefficients);
    o.bank_bytes = options->bank_bytes ? options->bank_bytes
                                       : nf::model::kDefaultBankBytes;
    o.miss_ratio = options->miss_ratio != 0;
    o.kernel = kernel_config(options->epsilon);
    const auto outcome = nf::bench::run_experiment(pc, o);
    *out = to_c(outcome.row);
    if (audit && audit_len > 0) {
      std::string joined;
      for (const auto& e : outcome.audit) {
        if (!joined.empty()) joined += ',';
        joined += e;
      }
      copy_reason(audit, audit_len, joined);
    }
  });
}

nf_status nf_rows_create(nf_rows** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    *out = new nf_rows{};
  });
}

void nf_rows_destroy(nf_rows* rows) { delete rows; }

nf_status nf_rows_append(nf_rows* rows, const nf_bench_row* row) {
  return guarded([&] {
    require(rows && row, "null argument");
    rows->value.push_back(from_c(*row));
  });
}

size_t nf_rows_count(const nf_rows* rows) {
  return rows ? rows->value.size() : 0;
}

nf_status nf_rows_get(const nf_rows* rows, size_t index, nf_bench_row* out) {
  return guarded([&] {
    require(rows && out, "null argument");
    require(index < rows->value.size(), "row index out of range");
    *out = to_c(rows->value[index]);
  });
}

nf_status nf_rows_write_csv(const nf_rows* rows, const char* path) {
  return guarded([&] {
    require(rows && path, "null argument");
    nf::bench::write_csv_file(path, rows->value);
  });
}

nf_status nf_rows_write_skip_log(const nf_rows* rows, const char* path) {
  return guarded([&] {
    require(rows && path, "null argument");
    std::ofstream out(path, std::ios::binary);
    if (!out) nf::fail(nf::ErrorCode::Io, std::string("cannot open ") + path);
    nf::bench::write_skip_log(out, rows->value);
    if (!out) nf::fail(nf::ErrorCode::Io, std::string("write failed: ") + path);
  });
}

nf_status nf_rows_read_csv(const char* path, nf_rows** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new nf_rows{nf::bench::read_csv_file(path)};
  });
}

nf_status nf_fit(const nf_rows* rows, int trim, nf_fit_result* out) {
  return guarded([&] {
    require(rows && out, "null argument");
    const auto records = nf::bench::to_records(rows->value);
    nf::calib::FitOptions opts;
    opts.trim = trim != 0;
    const auto c = nf::calib::calibrate(records, opts);
    auto stats = [](const nf::calib::LambdaEstimate& e) {
      return nf_lambda_stats{e.mean, e.min, e.max, e.used, e.skipped};
    };
    *out = {c.weights.alpha,        c.weights.beta,
            c.weights.gamma,        c.weights.residual_rms,
            c.weights.records_used, stats(c.lambda_ram),
            stats(c.lambda_gpu)};
  });
}

void nf_verify_default_config(nf_verify_config* out) {
  if (!out) return;
  const nf::bench::VerifyConfig v;
  *out = {v.instances, v.seed, v.width, v.rel_tol, v.abs_tol};
}

nf_status nf_verify(const nf_verify_config* config, nf_verify_report* out,
                    nf_line_callback on_line, void* user) {
  return guarded([&] {
    require(config && out, "null argument");
    nf::bench::VerifyConfig v;
    v.instances = config->instances;
    v.seed = config->seed;
    v.width = std::max(config->width, 1u);
    v.rel_tol = config->rel_tol;
    v.abs_tol = config->abs_tol;
    const auto report = nf::bench::verify(v);
    if (on_line) {
      for (const auto& line : report.lines) on_line(line.c_str(), user);
    }
    *out = {report.instances, report.failures, report.max_rel_error};
  });
}

}  // extern "C"
