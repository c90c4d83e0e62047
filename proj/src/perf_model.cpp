#include "nearfield/perf_model.hpp"

#include <cmath>

#include "nearfield/error.hpp"

namespace nf::model {

ModelCoefficients reference_coefficients() {
  return {0.82, 0.09, 0.18, 108.0, 640.0};
}

double four_pow(int e) { return std::ldexp(1.0, 2 * e); }

ProblemShape make_shape(double n, int ct, int l, double t, int i) {
  ProblemShape s;
  s.n = n;
  s.ct = ct;
  s.l = l;
  s.t = t;
  s.d = n / four_pow(l - 1);
  s.i = i;
  return s;
}

double collect_time_indexing(const ProblemShape& s, const HardwareParams& hw) {
  const double m = hw.m_indexing;
  // The bare additive 3 in the per-box factor is three memory operations.
  return s.n * (7.0 * m) +
         four_pow(s.l - 1) * (m * (11.0 + 19.0 * s.t) + 3.0 * m +
                              hw.find_nei_cost);
}

double collect_time_repetition(const ProblemShape& s, const HardwareParams& hw) {
  const double m = hw.m_repetition;
  return four_pow(s.l - 1) * (m + 11.0 * s.t * m + 45.0 * m * s.t * s.t +
                              s.t * hw.find_nei_cost);
}

std::uint64_t memory_indexing(const ProblemShape& s) {
  const auto n = static_cast<std::uint64_t>(s.n);
  const auto t = static_cast<std::uint64_t>(s.t);
  return 40 * n + (std::uint64_t{1} << (2 * s.l)) * (2 + 10 * t);
}

std::uint64_t memory_repetition(const ProblemShape& s) {
  const auto n = static_cast<std::uint64_t>(s.n);
  return 8 * n * (3 + 27 * static_cast<std::uint64_t>(s.ct));
}

double kernel_time_indexing(const ProblemShape& s, const HardwareParams& hw) {
  const double t = s.t;
  return 4.0 * hw.m_indexing * (11.25 * t * t + t + 1.0) + 9.0 * t * t * hw.o1;
}

double kernel_time_indexing_expanded(const ProblemShape& s,
                                     const HardwareParams& hw) {
  const double m = hw.m_indexing;
  const double t = s.t;
  return 4.0 * m + t * (3.0 * m + 9.0 * t * (5.0 * m + hw.o1) + m);
}

double kernel_time_repetition(const ProblemShape& s, const HardwareParams& hw) {
  const double m = hw.m_repetition;
  return 3.0 * m + 9.0 * s.t * (4.0 * m + hw.o1);
}

double kernel_speedup_from_times(const ProblemShape& s,
                                 const HardwareParams& hw) {
  return kernel_time_indexing(s, hw) / kernel_time_repetition(s, hw) *
         (four_pow(s.l - 1) / hw.total_cores) * (hw.total_cores / s.n);
}

double miss_ratio_indexing_thread_floor(const ProblemShape& s,
                                        std::uint64_t bank_bytes) {
  if (bank_bytes == 0) fail(ErrorCode::InvalidArgument, "bank size must be > 0");
  const double b = static_cast<double>(bank_bytes);
  const double touched = 2.0 + std::floor(kIndexingThreadMissBytes * s.t / b);
  const double banks =
      std::floor(static_cast<double>(memory_indexing(s)) / b);
  return touched / banks;
}

double miss_ratio_indexing_thread_approx(const ProblemShape& s) {
  return kIndexingThreadMissBytes * s.t /
         static_cast<double>(memory_indexing(s));
}

double miss_ratio_indexing_floor(const ProblemShape& s,
                                 std::uint64_t bank_bytes) {
  return miss_ratio_indexing_thread_floor(s, bank_bytes) * four_pow(s.l - 1);
}

double miss_ratio_indexing_model(const ProblemShape& s) {
  return miss_ratio_indexing_thread_approx(s) * four_pow(s.l - 1);
}

double miss_ratio_repetition_model(const ProblemShape& s) { return 1.0 / s.n; }

double miss_ratio_quotient(const ProblemShape& s) {
  return miss_ratio_repetition_model(s) / miss_ratio_indexing_model(s);
}

double miss_ratio_quotient_bound(double n) {
  return kMissQuotientNumerator / n;
}

MissRatio miss_ratio_from_counts(const exec::BankCounts& counts) {
  if (counts.work_items == 0 || counts.occupied_banks == 0) {
    fail(ErrorCode::UndefinedMetric,
         "miss ratio undefined: trace has no work-items or no reads");
  }
  MissRatio r;
  r.counts = counts;
  const double banks = static_cast<double>(counts.occupied_banks);
  r.summed = static_cast<double>(counts.total_runs) / banks;
  r.per_item = r.summed / static_cast<double>(counts.work_items);
  return r;
}

MissRatio miss_ratio_exact_report(const exec::AccessTrace& trace,
                                  std::uint64_t bank_bytes) {
  return miss_ratio_from_counts(exec::count_banks(trace, bank_bytes));
}

double miss_ratio_exact(const exec::AccessTrace& trace,
                        std::uint64_t bank_bytes) {
  return miss_ratio_exact_report(trace, bank_bytes).per_item;
}

double volume_ratio(const ProblemShape& s) {
  const double result = 8.0 * s.n;
  return (static_cast<double>(memory_indexing(s)) + result) /
         (static_cast<double>(memory_repetition(s)) + result);
}

double speedup_collect(const ModelCoefficients& c, const ProblemShape& s) {
  return c.lambda_ram / (kCollectVolumeDivisor * s.t * s.d);
}

double speedup_transfer(const ProblemShape& s) {
  return 1.0 / (kCollectVolumeDivisor * s.d);
}

double speedup_kernel(const ModelCoefficients& c, const ProblemShape& s) {
  return kKernelSpeedupConstant * c.lambda_gpu * s.t / (s.n * s.d);
}

double speedup_total(const ModelCoefficients& c, const ProblemShape& s) {
  return c.alpha * c.lambda_ram / (kCollectVolumeDivisor * s.d * s.t) +
         c.gamma / (kCollectVolumeDivisor * s.d) +
         c.beta * (kKernelSpeedupConstant * c.lambda_gpu * s.t / (s.n * s.d));
}

double speedup_total_adjusted(const ModelCoefficients& c, const ProblemShape& s,
                              int i) {
  const double f = four_pow(i);
  return c.alpha * c.lambda_ram * (f * f) /
             (kCollectVolumeDivisor * s.d * s.t) +
         c.gamma * f / (kCollectVolumeDivisor * s.d) +
         c.beta * (kKernelSpeedupConstant * c.lambda_gpu * s.t / (s.n * s.d));
}

double speedup_total_adjusted_normalized(const ModelCoefficients& c, int i) {
  const double f = four_pow(i);
  return f * f * c.alpha + f * c.gamma + c.beta;
}

ProblemShape adjusted_shape(const ProblemShape& s, int i) {
  ProblemShape out = s;
  const double f = four_pow(i);
  out.l = s.l + i;
  out.t = s.t / f;
  out.d = s.d / f;
  out.i = s.i + i;
  return out;
}

double kernel_break_even_n(double lambda_gpu, double t, double d) {
  return kKernelSpeedupConstant * lambda_gpu * t / d;
}

}  // namespace nf::model
