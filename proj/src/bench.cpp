#include "nearfield/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "nearfield/error.hpp"
#include "nearfield/layouts.hpp"

namespace nf::bench {
namespace {

using Clock = std::chrono::steady_clock;

// Repetition layouts above this size are skipped rather than allocated.
constexpr std::uint64_t kMaxRepetitionBytes = std::uint64_t{1} << 30;

std::vector<std::size_t> schedule(std::size_t lo, std::size_t hi,
                                  std::size_t step) {
  std::vector<std::size_t> out;
  for (std::size_t n = lo; n <= hi; n += step) out.push_back(n);
  return out;
}

std::vector<std::size_t> scaled(std::vector<std::size_t> ns, double scale) {
  for (auto& n : ns) n = scale_n(n, scale);
  return ns;
}

std::string format_float(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

BenchRow skipped_row(const PlanCell& cell, int ct, std::string reason) {
  BenchRow row;
  row.n = cell.n;
  row.ct = ct;
  row.l = cell.level > 0 ? cell.level + cell.i : 0;
  row.i = cell.i;
  row.skipped = true;
  row.skip_reason = std::move(reason);
  return row;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

template <typename T>
T parse_number(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    T v{};
    if constexpr (std::is_floating_point_v<T>) {
      v = static_cast<T>(std::stod(s, &used));
    } else if constexpr (std::is_signed_v<T>) {
      v = static_cast<T>(std::stoll(s, &used));
    } else {
      v = static_cast<T>(std::stoull(s, &used));
    }
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::Io, "csv line " + std::to_string(line) +
                            ": cannot parse field '" + s + "'");
  }
}

}  // namespace

const char* const kCsvHeader[kCsvColumns] = {
    "n",          "ct",           "l",             "i",
    "t",          "d",            "bytes_idx",     "bytes_rep",
    "collect_idx_s", "collect_rep_s", "kernel_idx_s", "kernel_rep_s",
    "base1_s",    "base2_s",      "x_collect",     "x_kernel",
    "x_total",    "pred_x_collect", "pred_x_kernel", "pred_x_total",
    "miss_exact_idx", "miss_exact_rep"};

std::size_t scale_n(std::size_t n, double scale) {
  const double v = std::floor(static_cast<double>(n) * scale);
  return std::max<std::size_t>(100, static_cast<std::size_t>(std::max(v, 0.0)));
}

SweepPlan plan_collect_sweep(double scale) {
  SweepPlan p;
  p.kind = PlanKind::CollectSweep;
  p.n_values = schedule(5000, 100000, 5000);
  const auto tail = schedule(150000, 350000, 50000);
  p.n_values.insert(p.n_values.end(), tail.begin(), tail.end());
  p.n_values = scaled(std::move(p.n_values), scale);
  return p;
}

SweepPlan plan_kernel_sweep(double scale) {
  SweepPlan p;
  p.kind = PlanKind::KernelSweep;
  p.n_values = schedule(1000, 100000, 1000);
  const auto tail = schedule(150000, 1000000, 50000);
  p.n_values.insert(p.n_values.end(), tail.begin(), tail.end());
  p.n_values = scaled(std::move(p.n_values), scale);
  return p;
}

SweepPlan plan_grid() {
  SweepPlan p;
  p.kind = PlanKind::Grid;
  p.i_values = {-3, -2, -1, 0, 1, 2, 3};
  for (int l = 4; l <= 11; ++l) p.levels.push_back(l);
  for (int l : p.levels) p.n_values.push_back(std::size_t{1} << (2 * l));
  return p;
}

std::vector<PlanCell> expand(const SweepPlan& plan, const GridBudget& budget) {
  if (plan.n_values.empty()) fail(ErrorCode::InvalidArgument, "plan has no N values");
  if (plan.repeats < 1) fail(ErrorCode::InvalidArgument, "repeats must be >= 1");
  const std::vector<int> i_values =
      plan.i_values.empty() ? std::vector<int>{0} : plan.i_values;
  std::vector<PlanCell> cells;
  if (!plan.levels.empty()) {
    for (int l : plan.levels) {
      for (int i : i_values) {
        PlanCell c{std::size_t{1} << (2 * l), l, i, std::nullopt};
        if (l + i < 1) {
          c.skip_reason = "L+i=" + std::to_string(l + i) + " is below 1";
        } else if (c.n > budget.max_n) {
          c.skip_reason = "N=" + std::to_string(c.n) + " exceeds budget " +
                          std::to_string(budget.max_n);
        } else if (l + i > budget.max_level) {
          c.skip_reason = "L+i=" + std::to_string(l + i) +
                          " exceeds level budget " +
                          std::to_string(budget.max_level);
        }
        cells.push_back(std::move(c));
      }
    }
    return cells;
  }
  for (auto n : plan.n_values) {
    for (int i : i_values) cells.push_back({n, 0, i, std::nullopt});
  }
  return cells;
}

ExperimentOutcome run_experiment(const PlanCell& cell,
                                 const ExperimentOptions& options) {
  ExperimentOutcome out;
  if (options.repeats < 1) fail(ErrorCode::InvalidArgument, "repeats must be >= 1");
  if (cell.skip_reason) {
    out.row = skipped_row(cell, options.ct, *cell.skip_reason);
    return out;
  }

  const PointSet points = generate_points(cell.n, options.seed);
  geometry::QuadTree tree;
  try {
    tree = cell.level > 0
               ? geometry::build_at_level(points, options.ct, cell.level)
               : geometry::build_tree(points, options.ct, options.l_start);
    if (cell.i != 0) tree = geometry::adjust_height(tree, points, cell.i);
  } catch (const Error& e) {
    out.row = skipped_row(cell, options.ct, e.what());
    return out;
  }
  out.tree = geometry::stats(tree);

  // An adjusted tree is re-clustered with CT' = t', so records are sized by
  // its occupancy: deeper trees shrink them, shallower ones must grow them.
  const int capacity =
      cell.i == 0 ? std::max<int>(options.ct, static_cast<int>(out.tree.t))
                  : static_cast<int>(out.tree.t);
  const std::uint64_t rep_bytes =
      layouts::repetition_formula_bytes(cell.n, capacity);
  if (rep_bytes > kMaxRepetitionBytes) {
    out.row = skipped_row(cell, options.ct,
                          "repetition layout needs " + std::to_string(rep_bytes) +
                              " bytes, over the memory budget");
    out.row.l = out.tree.l;
    return out;
  }

  const exec::ParallelContext ctx{options.width};
  const KernelConfig& cfg = options.kernel;

  {
    const auto idx = layouts::build_indexing(tree, points);
    exec::run_indexing(idx, cfg, ctx);
    out.audit.emplace_back("warmup:indexing");
    const auto rep = layouts::build_repetition(tree, points, capacity);
    exec::run_repetition(rep, cfg, ctx);
    out.audit.emplace_back("warmup:repetition");
  }

  calib::MeasuredTimes sum;
  for (int r = 0; r < options.repeats; ++r) {
    sum.base_time_1 += exec::run_baseline(tree, points, cfg).wall_time;
    out.audit.emplace_back("base");

    {
      const auto start = Clock::now();
      const auto idx = layouts::build_indexing(tree, points);
      sum.collect_time_idx +=
          std::chrono::duration<double>(Clock::now() - start).count();
      sum.kernel_time_idx += exec::run_indexing(idx, cfg, ctx).wall_time;
      sum.bytes_idx = idx.reported_bytes;
    }
    out.audit.emplace_back("indexing");

    sum.base_time_2 += exec::run_baseline(tree, points, cfg).wall_time;
    out.audit.emplace_back("base");

    {
      const auto start = Clock::now();
      const auto rep = layouts::build_repetition(tree, points, capacity);
      sum.collect_time_rep +=
          std::chrono::duration<double>(Clock::now() - start).count();
      sum.kernel_time_rep += exec::run_repetition(rep, cfg, ctx).wall_time;
      sum.bytes_rep = rep.reported_bytes;
    }
    out.audit.emplace_back("repetition");
  }

  const double reps = options.repeats;
  calib::MeasuredTimes avg = sum;
  avg.collect_time_idx /= reps;
  avg.collect_time_rep /= reps;
  avg.kernel_time_idx /= reps;
  avg.kernel_time_rep /= reps;
  avg.base_time_1 /= reps;
  avg.base_time_2 /= reps;

  auto& rec = out.record;
  rec.shape = model::make_shape(static_cast<double>(cell.n), capacity,
                                out.tree.l, static_cast<double>(out.tree.t),
                                cell.i);
  rec.measured = avg;
  rec.derived = calib::derive_speedups(avg);

  BenchRow& row = out.row;
  row.n = cell.n;
  row.ct = capacity;  // record capacity actually used
  row.l = out.tree.l;
  row.i = cell.i;
  row.t = out.tree.t;
  row.d = out.tree.d;
  row.bytes_idx = avg.bytes_idx;
  row.bytes_rep = avg.bytes_rep;
  row.collect_idx_s = avg.collect_time_idx;
  row.collect_rep_s = avg.collect_time_rep;
  row.kernel_idx_s = avg.kernel_time_idx;
  row.kernel_rep_s = avg.kernel_time_rep;
  row.base1_s = avg.base_time_1;
  row.base2_s = avg.base_time_2;
  row.x_collect = rec.derived.x_collect;
  row.x_kernel = rec.derived.x_kernel;
  row.x_total = rec.derived.x_total;
  if (out.tree.t > 0) {
    row.pred_x_collect = model::speedup_collect(options.coefficients, rec.shape);
    row.pred_x_kernel = model::speedup_kernel(options.coefficients, rec.shape);
    row.pred_x_total = model::speedup_total(options.coefficients, rec.shape);
  }

  if (options.miss_ratio) {
    const auto idx = layouts::build_indexing(tree, points);
    row.miss_exact_idx =
        model::miss_ratio_from_counts(exec::count_banks(idx, options.bank_bytes))
            .per_item;
    const auto rep = layouts::build_repetition(tree, points, capacity);
    row.miss_exact_rep =
        model::miss_ratio_from_counts(exec::count_banks(rep, options.bank_bytes))
            .per_item;
  }
  return out;
}

void write_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  for (std::size_t c = 0; c < kCsvColumns; ++c) {
    out << (c ? "," : "") << kCsvHeader[c];
  }
  out << '\n';
  for (const auto& r : rows) {
    if (r.skipped) {
      out << r.n << ',' << r.ct << ',' << r.l << ',' << r.i;
      for (std::size_t c = 4; c < kCsvColumns; ++c) out << ',';
      out << '\n';
      continue;
    }
    const std::string fields[kCsvColumns] = {
        std::to_string(r.n),          std::to_string(r.ct),
        std::to_string(r.l),          std::to_string(r.i),
        std::to_string(r.t),          format_float(r.d),
        std::to_string(r.bytes_idx),  std::to_string(r.bytes_rep),
        format_float(r.collect_idx_s), format_float(r.collect_rep_s),
        format_float(r.kernel_idx_s), format_float(r.kernel_rep_s),
        format_float(r.base1_s),      format_float(r.base2_s),
        format_float(r.x_collect),    format_float(r.x_kernel),
        format_float(r.x_total),      format_float(r.pred_x_collect),
        format_float(r.pred_x_kernel), format_float(r.pred_x_total),
        format_float(r.miss_exact_idx), format_float(r.miss_exact_rep)};
    for (std::size_t c = 0; c < kCsvColumns; ++c) {
      out << (c ? "," : "") << fields[c];
    }
    out << '\n';
  }
}

void write_csv_file(const std::string& path, const std::vector<BenchRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot open " + path + " for writing");
  write_csv(out, rows);
  out.flush();
  if (!out) fail(ErrorCode::Io, "write to " + path + " failed");
}

std::vector<BenchRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::Io, "csv is empty (no header)");
  const auto header = split(line, ',');
  if (header.size() != kCsvColumns) {
    fail(ErrorCode::Io, "csv header has " + std::to_string(header.size()) +
                            " columns, expected " + std::to_string(kCsvColumns));
  }
  for (std::size_t c = 0; c < kCsvColumns; ++c) {
    if (header[c] != kCsvHeader[c]) {
      fail(ErrorCode::Io, "csv column " + std::to_string(c) + " is '" +
                              header[c] + "', expected '" + kCsvHeader[c] + "'");
    }
  }
  std::vector<BenchRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != kCsvColumns) {
      fail(ErrorCode::Io, "csv line " + std::to_string(line_no) + " has " +
                              std::to_string(f.size()) + " fields");
    }
    BenchRow r;
    r.n = parse_number<std::size_t>(f[0], line_no);
    r.ct = parse_number<int>(f[1], line_no);
    r.l = parse_number<int>(f[2], line_no);
    r.i = parse_number<int>(f[3], line_no);
    if (f[4].empty()) {
      r.skipped = true;
      rows.push_back(std::move(r));
      continue;
    }
    r.t = parse_number<std::size_t>(f[4], line_no);
    r.d = parse_number<double>(f[5], line_no);
    r.bytes_idx = parse_number<std::uint64_t>(f[6], line_no);
    r.bytes_rep = parse_number<std::uint64_t>(f[7], line_no);
    double* floats[] = {&r.collect_idx_s, &r.collect_rep_s, &r.kernel_idx_s,
                        &r.kernel_rep_s,  &r.base1_s,       &r.base2_s,
                        &r.x_collect,     &r.x_kernel,      &r.x_total,
                        &r.pred_x_collect, &r.pred_x_kernel, &r.pred_x_total,
                        &r.miss_exact_idx, &r.miss_exact_rep};
    for (std::size_t k = 0; k < std::size(floats); ++k) {
      *floats[k] = parse_number<double>(f[8 + k], line_no);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<BenchRow> read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  return parse_csv(in);
}

void write_skip_log(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "n,l,i,reason\n";
  for (const auto& r : rows) {
    if (!r.skipped) continue;
    std::string reason = r.skip_reason;
    std::replace(reason.begin(), reason.end(), ',', ';');
    std::replace(reason.begin(), reason.end(), '\n', ' ');
    out << r.n << ',' << r.l << ',' << r.i << ',' << reason << '\n';
  }
}

std::vector<calib::ExperimentRecord> to_records(const std::vector<BenchRow>& rows) {
  std::vector<calib::ExperimentRecord> out;
  for (const auto& r : rows) {
    if (r.skipped) continue;
    calib::ExperimentRecord rec;
    rec.shape.n = static_cast<double>(r.n);
    rec.shape.ct = r.ct;
    rec.shape.l = r.l;
    rec.shape.t = static_cast<double>(r.t);
    rec.shape.d = r.d;
    rec.shape.i = r.i;
    rec.measured = {r.collect_idx_s, r.collect_rep_s, r.kernel_idx_s,
                    r.kernel_rep_s,  r.base1_s,       r.base2_s,
                    r.bytes_idx,     r.bytes_rep};
    rec.derived = {r.x_collect, r.x_kernel, r.x_total};
    out.push_back(rec);
  }
  return out;
}

bool close_enough(double a, double b, double rel_tol, double abs_tol) {
  const double diff = std::abs(a - b);
  return diff <= abs_tol || diff <= rel_tol * std::max(std::abs(a), std::abs(b));
}

VerifyReport verify(const VerifyConfig& config) {
  if (config.n_values.empty() || config.ct_values.empty()) {
    fail(ErrorCode::InvalidArgument, "verify needs N and CT values");
  }
  VerifyReport report;
  const KernelConfig cfg;
  const exec::ParallelContext ctx{config.width};
  for (std::size_t k = 0; k < config.instances; ++k) {
    const std::size_t n = config.n_values[k % config.n_values.size()];
    const int ct =
        config.ct_values[(k / config.n_values.size()) % config.ct_values.size()];
    const std::uint64_t seed = config.seed + 7919 * k;

    const auto points = generate_points(n, seed);
    const auto tree = geometry::build_tree(points, ct);
    const auto base = exec::run_baseline(tree, points, cfg);
    const auto idx = exec::run_indexing(layouts::build_indexing(tree, points), cfg, ctx);
    const auto rep =
        exec::run_repetition(layouts::build_repetition(tree, points), cfg, ctx);

    std::size_t mismatches = 0;
    double worst = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const double b = base.tgt_potentials[j];
      for (double v : {idx.tgt_potentials[j], rep.tgt_potentials[j]}) {
        const double scale = std::max(std::abs(b), std::abs(v));
        if (scale > 0) worst = std::max(worst, std::abs(v - b) / scale);
        if (!close_enough(v, b, config.rel_tol, config.abs_tol)) ++mismatches;
      }
    }
    report.max_rel_error = std::max(report.max_rel_error, worst);
    ++report.instances;
    if (mismatches) ++report.failures;

    std::ostringstream line;
    line << (mismatches ? "FAIL" : "PASS") << " instance " << k << " n=" << n
         << " ct=" << ct << " seed=" << seed << " L=" << tree.level()
         << " max_rel_err=" << worst << " mismatches=" << mismatches;
    report.lines.push_back(line.str());
  }
  return report;
}

}  // namespace nf::bench
