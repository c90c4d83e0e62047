#pragma once

#include <cmath>
#include <optional>

namespace nf {

struct KernelConfig {
  double epsilon = 1e-12;
  std::optional<double> o1_cost;  // measured seconds per evaluation
};

/// 2D Laplace interaction q * ln(1/r). Pairs closer than epsilon contribute 0.
inline double pair_potential(double tx, double ty, double sx, double sy,
                             double q, const KernelConfig& cfg) {
  const double dx = tx - sx;
  const double dy = ty - sy;
  const double r = std::sqrt(dx * dx + dy * dy);
  if (!(r >= cfg.epsilon)) return 0.0;
  return -q * std::log(r);
}

/// Average wall-clock seconds of one pair_potential call over `evaluations`.
double measure_o1_cost(std::size_t evaluations = 1u << 20);

}  // namespace nf
