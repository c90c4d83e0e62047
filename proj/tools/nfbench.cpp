// nfbench: experiment driver for the near-field layout library.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nearfield/nearfield.h"

namespace {

using nlohmann::json;

struct Globals {
  std::uint64_t seed = 1;
  std::optional<int> repeats;
  double scale = 1.0;
  unsigned width = 1;
  std::string out;
};

// Thrown on any failed library call; main turns it into exit code 1.
struct LibraryFailure {
  std::string message;
};

void check(nf_status s, const char* what) {
  if (s != NF_OK) {
    throw LibraryFailure{std::string(what) + ": " + nf_status_name(s) + ": " +
                         nf_last_error()};
  }
}

struct RowsHandle {
  nf_rows* p = nullptr;
  RowsHandle() { check(nf_rows_create(&p), "rows"); }
  explicit RowsHandle(nf_rows* q) : p(q) {}
  ~RowsHandle() { nf_rows_destroy(p); }
  RowsHandle(const RowsHandle&) = delete;
  RowsHandle& operator=(const RowsHandle&) = delete;
};

std::vector<nf_plan_cell> plan(nf_plan_kind kind, double scale,
                               const nf_grid_budget* budget) {
  std::size_t count = 0;
  check(nf_plan_cells(kind, scale, budget, nullptr, 0, &count), "plan");
  std::vector<nf_plan_cell> cells(count);
  check(nf_plan_cells(kind, scale, budget, cells.data(), cells.size(), &count),
        "plan");
  return cells;
}

void run_plan(const std::vector<nf_plan_cell>& cells,
              const nf_experiment_options& opts, const std::string& out,
              bool skip_log) {
  RowsHandle rows;
  std::size_t k = 0;
  for (const auto& cell : cells) {
    ++k;
    nf_bench_row row{};
    char audit[512];
    check(nf_run_experiment(&cell, &opts, &row, audit, sizeof audit),
          "experiment");
    if (row.skipped) {
      std::fprintf(stderr, "[%zu/%zu] n=%zu l=%d i=%d skipped: %s\n", k,
                   cells.size(), row.n, row.l, row.i, row.reason);
    } else {
      std::fprintf(stderr,
                   "[%zu/%zu] n=%zu l=%d i=%d t=%zu x_collect=%.3f "
                   "x_kernel=%.3f x_total=%.3f\n",
                   k, cells.size(), row.n, row.l, row.i, row.t, row.x_collect,
                   row.x_kernel, row.x_total);
    }
    check(nf_rows_append(rows.p, &row), "append");
  }
  check(nf_rows_write_csv(rows.p, out.c_str()), "write csv");
  if (skip_log) {
    const std::string log = out + ".skipped.csv";
    check(nf_rows_write_skip_log(rows.p, log.c_str()), "write skip log");
  }
}

nf_experiment_options experiment_options(const Globals& g, int ct) {
  nf_experiment_options opts;
  nf_experiment_default_options(&opts);
  opts.seed = g.seed;
  opts.width = g.width;
  opts.ct = ct;
  if (g.repeats) opts.repeats = *g.repeats;
  return opts;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << '\n';
    return;
  }
  std::ofstream f(path);
  if (!f) throw LibraryFailure{"cannot open " + path};
  f << text << '\n';
}

json lambda_json(const nf_lambda_stats& s) {
  return {{"mean", s.mean}, {"min", s.min}, {"max", s.max}};
}

nf_coefficients load_coefficients(const std::string& path) {
  nf_coefficients c;
  nf_model_reference_coefficients(&c);
  if (path.empty()) return c;
  std::ifstream f(path);
  if (!f) throw LibraryFailure{"cannot open " + path};
  const json doc = json::parse(f);
  auto pick = [&](const char* key, double& dst) {
    if (!doc.contains(key)) return;
    const auto& v = doc.at(key);
    dst = v.is_object() ? v.at("mean").get<double>() : v.get<double>();
  };
  pick("alpha", c.alpha);
  pick("beta", c.beta);
  pick("gamma", c.gamma);
  pick("lambda_ram", c.lambda_ram);
  pick("lambda_gpu", c.lambda_gpu);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Near-field layout benchmarks: Indexing (SoA) vs Repetition (AoS)"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Base RNG seed");
  app.add_option("--repeats", g.repeats, "Timed repeats per experiment")
      ->check(CLI::PositiveNumber);
  app.add_option("--scale", g.scale, "Shrink factor applied to N schedules")
      ->check(CLI::PositiveNumber);
  app.add_option("--backend-width", g.width, "Worker threads for executors")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output path (CSV or JSON)");

  auto* verify = app.add_subcommand("verify", "Cross-check the three executors");
  std::size_t instances = 50;
  verify->add_option("--instances", instances, "Random instances")
      ->check(CLI::PositiveNumber);

  int ct = 15;
  auto* collect = app.add_subcommand("sweep-collect", "Collection-phase N sweep");
  collect->add_option("--ct", ct, "Clustering threshold");
  auto* kernel = app.add_subcommand("sweep-kernel", "Kernel-phase N sweep");
  kernel->add_option("--ct", ct, "Clustering threshold");

  auto* grid = app.add_subcommand("grid", "L x i grid with N = 4^L");
  nf_grid_budget budget;
  nf_grid_default_budget(&budget);
  grid->add_option("--l-min", budget.level_min, "Lowest grid level");
  grid->add_option("--l-max", budget.level_max, "Highest grid level");
  grid->add_option("--max-n", budget.max_n, "Skip cells with larger N");
  grid->add_option("--max-level", budget.max_level, "Skip cells with L+i above this");

  auto* fit = app.add_subcommand("fit", "Fit alpha, beta, gamma and lambdas from a CSV");
  std::string csv;
  bool trim = false;
  fit->add_option("--csv", csv, "Bench CSV")->required()->check(CLI::ExistingFile);
  fit->add_flag("--trim", trim, "Refit without the 5% largest residuals at each end");

  auto* predict = app.add_subcommand("predict", "Evaluate the performance model");
  nf_shape shape{0, 15, 0, 15, 0, 0};
  nf_hardware hw;
  nf_model_default_hardware(&hw);
  std::string coeffs;
  predict->add_option("--n", shape.n, "Points")->required();
  predict->add_option("--ct", shape.ct, "Clustering threshold");
  predict->add_option("--l", shape.l, "Tree level")->required();
  predict->add_option("--t", shape.t, "Max points per box");
  predict->add_option("--d", shape.d, "Mean points per box (default N/4^(L-1))");
  predict->add_option("--i", shape.i, "Height adjustment");
  predict->add_option("--coeffs", coeffs, "JSON written by fit")
      ->check(CLI::ExistingFile);
  predict->add_option("--m-indexing", hw.m_indexing, "Seconds per indexing memory op");
  predict->add_option("--m-repetition", hw.m_repetition, "Seconds per repetition memory op");
  predict->add_option("--o1", hw.o1, "Seconds per pair evaluation");
  predict->add_option("--bank-bytes", hw.bank_bytes, "Memory bank size");
  predict->add_option("--cores", hw.total_cores, "Parallel cores");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) {
      nf_verify_config cfg;
      nf_verify_default_config(&cfg);
      cfg.instances = instances;
      cfg.seed = g.seed;
      cfg.width = g.width;
      nf_verify_report report{};
      check(nf_verify(&cfg, &report,
                      [](const char* line, void*) { std::puts(line); }, nullptr),
            "verify");
      std::printf("verify: %zu instances, %zu failures, max rel error %.3g\n",
                  report.instances, report.failures, report.max_rel_error);
      return report.failures == 0 && report.instances > 0 ? 0 : 2;
    }
    if (*collect || *kernel) {
      const auto kind = *collect ? NF_PLAN_COLLECT_SWEEP : NF_PLAN_KERNEL_SWEEP;
      const std::string out = g.out.empty()
                                  ? (*collect ? "collect.csv" : "kernel.csv")
                                  : g.out;
      run_plan(plan(kind, g.scale, nullptr), experiment_options(g, ct), out,
               false);
      return 0;
    }
    if (*grid) {
      const std::string out = g.out.empty() ? "grid.csv" : g.out;
      run_plan(plan(NF_PLAN_GRID, 1.0, &budget), experiment_options(g, 15), out,
               true);
      return 0;
    }
    if (*fit) {
      nf_rows* raw = nullptr;
      check(nf_rows_read_csv(csv.c_str(), &raw), "read csv");
      RowsHandle rows(raw);
      nf_fit_result r{};
      check(nf_fit(rows.p, trim ? 1 : 0, &r), "fit");
      const json doc = {{"alpha", r.alpha},
                        {"beta", r.beta},
                        {"gamma", r.gamma},
                        {"lambda_ram", lambda_json(r.lambda_ram)},
                        {"lambda_gpu", lambda_json(r.lambda_gpu)},
                        {"residual_rms", r.residual_rms}};
      emit(g.out, doc.dump(2));
      return 0;
    }
    if (*predict) {
      const nf_coefficients c = load_coefficients(coeffs);
      nf_model_report r{};
      check(nf_model_evaluate(&shape, &hw, &c, &r), "predict");
      json doc = {
          {"collect_time_indexing", r.collect_time_indexing},
          {"collect_time_repetition", r.collect_time_repetition},
          {"memory_indexing", r.memory_indexing},
          {"memory_repetition", r.memory_repetition},
          {"kernel_time_indexing", r.kernel_time_indexing},
          {"kernel_time_repetition", r.kernel_time_repetition},
          {"miss_ratio_indexing", r.miss_ratio_indexing_model},
          {"miss_ratio_indexing_floor", r.miss_ratio_indexing_floor},
          {"miss_ratio_repetition", r.miss_ratio_repetition_model},
          {"miss_ratio_quotient", r.miss_ratio_quotient},
          {"volume_ratio", r.volume_ratio},
          {"speedup_collect", r.speedup_collect},
          {"speedup_transfer", r.speedup_transfer},
          {"speedup_kernel", r.speedup_kernel},
          {"speedup_total", r.speedup_total},
          {"speedup_total_adjusted", r.speedup_total_adjusted},
          {"speedup_total_adjusted_normalized", r.speedup_total_adjusted_normalized},
          {"kernel_break_even_n", r.kernel_break_even_n}};
      if (shape.i == 1) doc["published_adjusted_claim"] = NF_PUBLISHED_ADJUSTED_CLAIM_I1;
      emit(g.out, doc.dump(2));
      return 0;
    }
  } catch (const LibraryFailure& e) {
    std::fprintf(stderr, "nfbench: %s\n", e.message.c_str());
    return 1;
  } catch (const json::exception& e) {
    std::fprintf(stderr, "nfbench: bad coefficient file: %s\n", e.what());
    return 1;
  }
  return 0;
}
