#include "nearfield/calibration.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "nearfield/error.hpp"

namespace nf::calib {
namespace {

struct Design {
  Eigen::MatrixXd a;  // columns: x_collect, x_transfer, x_kernel
  Eigen::VectorXd y;
};

Design make_design(std::span<const ExperimentRecord> records,
                   std::span<const std::size_t> rows) {
  Design d{Eigen::MatrixXd(rows.size(), 3), Eigen::VectorXd(rows.size())};
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& rec = records[rows[r]];
    d.a(r, 0) = rec.derived.x_collect;
    d.a(r, 1) = model::speedup_transfer(rec.shape);
    d.a(r, 2) = rec.derived.x_kernel;
    d.y(r) = rec.derived.x_total;
  }
  return d;
}

// Projected gradient on 0.5 * |A x - y|^2 subject to x >= 0, fixed step
// 1 / ||A^T A||. Warm-started from the clipped unconstrained solution, which
// is already optimal whenever it is feasible.
ComponentWeights solve_nnls(const Design& d, const FitOptions& options) {
  if (d.a.rows() < 3) {
    fail(ErrorCode::InsufficientData, "need at least 3 records to fit weights");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(d.a);
  qr.setThreshold(1e-12);
  if (qr.rank() < 3) {
    fail(ErrorCode::InsufficientData,
         "design is rank deficient: component speedups do not vary "
         "independently across records");
  }
  Eigen::Vector3d x = qr.solve(d.y).cwiseMax(0.0);

  const Eigen::Matrix3d gram = d.a.transpose() * d.a;
  const Eigen::Vector3d aty = d.a.transpose() * d.y;
  const double lipschitz =
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(gram).eigenvalues().maxCoeff();
  const double step = 1.0 / lipschitz;

  std::size_t it = 0;
  for (; it < options.max_iterations; ++it) {
    const Eigen::Vector3d next = (x - step * (gram * x - aty)).cwiseMax(0.0);
    const double change = (next - x).cwiseAbs().maxCoeff();
    x = next;
    if (change < options.tolerance) {
      ++it;
      break;
    }
  }

  ComponentWeights w;
  w.alpha = x(0);
  w.gamma = x(1);
  w.beta = x(2);
  const Eigen::VectorXd resid = d.a * x - d.y;
  w.residual_rms = std::sqrt(resid.squaredNorm() / static_cast<double>(resid.size()));
  w.records_used = static_cast<std::size_t>(d.a.rows());
  w.iterations = it;
  return w;
}

LambdaEstimate summarize(std::vector<double> values, std::size_t skipped,
                         std::vector<std::string> warnings, const char* name) {
  if (values.empty()) {
    fail(ErrorCode::InsufficientData,
         std::string("no usable records to estimate ") + name);
  }
  LambdaEstimate e;
  e.used = values.size();
  e.skipped = skipped;
  e.warnings = std::move(warnings);
  e.mean = std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  e.min = *lo;
  e.max = *hi;
  return e;
}

}  // namespace

DerivedSpeedups derive_speedups(const MeasuredTimes& m) {
  auto ratio = [&](double idx, double rep) {
    return (idx / m.base_time_1) * (m.base_time_2 / rep);
  };
  DerivedSpeedups d;
  d.x_collect = ratio(m.collect_time_idx, m.collect_time_rep);
  d.x_kernel = ratio(m.kernel_time_idx, m.kernel_time_rep);
  d.x_total = ratio(m.collect_time_idx + m.kernel_time_idx,
                    m.collect_time_rep + m.kernel_time_rep);
  return d;
}

ComponentWeights fit_component_weights(std::span<const ExperimentRecord> records,
                                       const FitOptions& options) {
  std::vector<std::size_t> rows(records.size());
  std::iota(rows.begin(), rows.end(), 0);
  ComponentWeights w = solve_nnls(make_design(records, rows), options);
  if (!options.trim) return w;

  const std::size_t drop = records.size() / 20;
  if (drop == 0) return w;
  std::vector<double> resid(records.size());
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    resid[r] = w.alpha * rec.derived.x_collect +
               w.gamma * model::speedup_transfer(rec.shape) +
               w.beta * rec.derived.x_kernel - rec.derived.x_total;
  }
  std::sort(rows.begin(), rows.end(),
            [&](std::size_t a, std::size_t b) { return resid[a] < resid[b]; });
  std::vector<std::size_t> kept(rows.begin() + static_cast<std::ptrdiff_t>(drop),
                                rows.end() - static_cast<std::ptrdiff_t>(drop));
  std::sort(kept.begin(), kept.end());
  return solve_nnls(make_design(records, kept), options);
}

LambdaEstimate estimate_lambda_ram(std::span<const ExperimentRecord> records) {
  std::vector<double> values;
  std::vector<std::string> warnings;
  std::size_t skipped = 0;
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& s = records[r].shape;
    if (!(s.t > 0) || !(s.d > 0)) {
      ++skipped;
      warnings.push_back("record " + std::to_string(r) +
                         ": t or d is zero, skipped for lambda_ram");
      continue;
    }
    values.push_back(records[r].derived.x_collect *
                     model::kCollectVolumeDivisor * s.t * s.d);
  }
  return summarize(std::move(values), skipped, std::move(warnings), "lambda_ram");
}

LambdaEstimate estimate_lambda_gpu(std::span<const ExperimentRecord> records) {
  std::vector<double> values;
  std::vector<std::string> warnings;
  std::size_t skipped = 0;
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& s = records[r].shape;
    if (!(s.t > 0) || !(s.d > 0)) {
      ++skipped;
      warnings.push_back("record " + std::to_string(r) +
                         ": t or d is zero, skipped for lambda_gpu");
      continue;
    }
    values.push_back(records[r].derived.x_kernel * s.n * s.d /
                     (model::kKernelSpeedupConstant * s.t));
  }
  return summarize(std::move(values), skipped, std::move(warnings), "lambda_gpu");
}

Calibration calibrate(std::span<const ExperimentRecord> records,
                      const FitOptions& options) {
  return {fit_component_weights(records, options), estimate_lambda_ram(records),
          estimate_lambda_gpu(records)};
}

std::string to_json(const Calibration& c) {
  auto stats = [](const LambdaEstimate& e) {
    return nlohmann::json{{"mean", e.mean}, {"min", e.min}, {"max", e.max}};
  };
  const nlohmann::json doc = {
      {"alpha", c.weights.alpha},
      {"beta", c.weights.beta},
      {"gamma", c.weights.gamma},
      {"lambda_ram", stats(c.lambda_ram)},
      {"lambda_gpu", stats(c.lambda_gpu)},
      {"residual_rms", c.weights.residual_rms},
  };
  return doc.dump(2);
}

}  // namespace nf::calib
