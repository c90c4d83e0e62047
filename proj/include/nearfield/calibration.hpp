#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nearfield/perf_model.hpp"

namespace nf::calib {

struct MeasuredTimes {
  double collect_time_idx = 0;
  double collect_time_rep = 0;
  double kernel_time_idx = 0;
  double kernel_time_rep = 0;
  double base_time_1 = 0;
  double base_time_2 = 0;
  std::uint64_t bytes_idx = 0;
  std::uint64_t bytes_rep = 0;
};

struct DerivedSpeedups {
  double x_collect = 0;
  double x_kernel = 0;
  double x_total = 0;
};

struct ExperimentRecord {
  model::ProblemShape shape;
  MeasuredTimes measured;
  DerivedSpeedups derived;
};

/// Two-baseline protocol: (T_idx / T_base1) * (T_base2 / T_rep), applied to
/// collection, kernel, and collection + kernel.
DerivedSpeedups derive_speedups(const MeasuredTimes& m);

struct FitOptions {
  bool trim = false;  // drop top/bottom 5% residuals, refit once
  double tolerance = 1e-10;
  std::size_t max_iterations = 100000;
};

struct ComponentWeights {
  double alpha = 0;
  double beta = 0;
  double gamma = 0;
  double residual_rms = 0;
  std::size_t records_used = 0;
  std::size_t iterations = 0;
};

/// Nonnegative least squares of x_total against
/// alpha * x_collect + gamma * x_transfer + beta * x_kernel, where
/// x_transfer = 1 / (21.6 d). Throws InsufficientData for fewer than three
/// records or a rank-deficient design.
ComponentWeights fit_component_weights(std::span<const ExperimentRecord> records,
                                       const FitOptions& options = {});

struct LambdaEstimate {
  double mean = 0;
  double min = 0;
  double max = 0;
  std::size_t used = 0;
  std::size_t skipped = 0;
  std::vector<std::string> warnings;
};

/// lambda_ram = x_collect * 21.6 * t * d per record.
LambdaEstimate estimate_lambda_ram(std::span<const ExperimentRecord> records);
/// lambda_gpu = x_kernel * n * d / (55.3 * t) per record.
LambdaEstimate estimate_lambda_gpu(std::span<const ExperimentRecord> records);

struct Calibration {
  ComponentWeights weights;
  LambdaEstimate lambda_ram;
  LambdaEstimate lambda_gpu;
};

Calibration calibrate(std::span<const ExperimentRecord> records,
                      const FitOptions& options = {});

/// {alpha, beta, gamma, lambda_ram:{mean,min,max}, lambda_gpu:{...},
/// residual_rms}
std::string to_json(const Calibration& c);

}  // namespace nf::calib
