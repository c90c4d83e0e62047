#include "nearfield/kernel.hpp"

#include <chrono>
#include <random>
#include <vector>

namespace nf {

double measure_o1_cost(std::size_t evaluations) {
  if (evaluations == 0) return 0.0;
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> xs(1024);
  for (auto& v : xs) v = unit(rng);

  KernelConfig cfg;
  volatile double sink = 0.0;
  double acc = 0.0;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t k = 0; k < evaluations; ++k) {
    const std::size_t j = k & 1023;
    acc += pair_potential(xs[j], xs[(j + 1) & 1023], xs[(j + 7) & 1023],
                          xs[(j + 13) & 1023], 1.0, cfg);
  }
  const auto stop = std::chrono::steady_clock::now();
  sink = acc;
  (void)sink;
  return std::chrono::duration<double>(stop - start).count() /
         static_cast<double>(evaluations);
}

}  // namespace nf
