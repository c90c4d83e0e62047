#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nearfield/calibration.hpp"
#include "nearfield/executors.hpp"
#include "nearfield/perf_model.hpp"

namespace nf::bench {

enum class PlanKind { CollectSweep, KernelSweep, Grid, Custom };

struct SweepPlan {
  PlanKind kind = PlanKind::Custom;
  std::vector<std::size_t> n_values;
  std::vector<int> i_values{0};
  std::vector<int> levels;  // grid rows; empty for N sweeps
  int ct = 15;
  int l_start = geometry::kDefaultStartLevel;
  int repeats = 20;
  std::uint64_t seed = 1;
  unsigned width = 1;
};

/// Divides every N by 1/scale, floored, never below 100.
std::size_t scale_n(std::size_t n, double scale);

SweepPlan plan_collect_sweep(double scale = 1.0);
SweepPlan plan_kernel_sweep(double scale = 1.0);
/// L in 4..11, i in -3..3, N = 4^L.
SweepPlan plan_grid();

struct GridBudget {
  std::size_t max_n = std::size_t{1} << 20;
  int max_level = 12;
};

/// One experiment to run. `level` > 0 pins the tree to that level instead of
/// running the clustering loop from l_start.
struct PlanCell {
  std::size_t n = 0;
  int level = 0;
  int i = 0;
  std::optional<std::string> skip_reason;
};

std::vector<PlanCell> expand(const SweepPlan& plan, const GridBudget& budget = {});

/// One CSV row. Skipped rows carry only n, ct, l, i and the reason.
struct BenchRow {
  std::size_t n = 0;
  int ct = 0;
  int l = 0;
  int i = 0;
  std::size_t t = 0;
  double d = 0;
  std::uint64_t bytes_idx = 0;
  std::uint64_t bytes_rep = 0;
  double collect_idx_s = 0;
  double collect_rep_s = 0;
  double kernel_idx_s = 0;
  double kernel_rep_s = 0;
  double base1_s = 0;
  double base2_s = 0;
  double x_collect = 0;
  double x_kernel = 0;
  double x_total = 0;
  double pred_x_collect = 0;
  double pred_x_kernel = 0;
  double pred_x_total = 0;
  double miss_exact_idx = 0;
  double miss_exact_rep = 0;

  bool skipped = false;
  std::string skip_reason;
};

struct ExperimentOptions {
  int ct = 15;
  int l_start = geometry::kDefaultStartLevel;
  int repeats = 20;
  std::uint64_t seed = 1;
  unsigned width = 1;
  model::ModelCoefficients coefficients = model::reference_coefficients();
  std::uint64_t bank_bytes = model::kDefaultBankBytes;
  bool miss_ratio = true;
  KernelConfig kernel;
};

struct ExperimentOutcome {
  BenchRow row;
  calib::ExperimentRecord record;
  geometry::TreeStats tree;  // shared by every method in the experiment
  std::vector<std::string> audit;
};

/// Builds the tree once, warms up each parallel executor once untimed, then
/// per repeat times base, indexing, base, repetition. Times are averaged
/// over repeats and the two-baseline ratios computed from the averages.
/// Construction failures come back as a skipped row with the reason.
ExperimentOutcome run_experiment(const PlanCell& cell,
                                 const ExperimentOptions& options);

constexpr std::size_t kCsvColumns = 22;
extern const char* const kCsvHeader[kCsvColumns];

void write_csv(std::ostream& out, const std::vector<BenchRow>& rows);
void write_csv_file(const std::string& path, const std::vector<BenchRow>& rows);
std::vector<BenchRow> parse_csv(std::istream& in);
std::vector<BenchRow> read_csv_file(const std::string& path);

/// n,l,i,reason for every skipped row.
void write_skip_log(std::ostream& out, const std::vector<BenchRow>& rows);

/// Completed rows as calibration records.
std::vector<calib::ExperimentRecord> to_records(const std::vector<BenchRow>& rows);

struct VerifyConfig {
  std::size_t instances = 50;
  std::vector<std::size_t> n_values{100, 1000, 10000};
  std::vector<int> ct_values{4, 15};
  std::uint64_t seed = 1;
  unsigned width = 1;
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
};

struct VerifyReport {
  std::size_t instances = 0;
  std::size_t failures = 0;
  double max_rel_error = 0;
  std::vector<std::string> lines;
  bool ok() const { return failures == 0 && instances > 0; }
};

bool close_enough(double a, double b, double rel_tol, double abs_tol);

/// Runs baseline, indexing and repetition on random instances and compares
/// them element-wise.
VerifyReport verify(const VerifyConfig& config);

}  // namespace nf::bench
