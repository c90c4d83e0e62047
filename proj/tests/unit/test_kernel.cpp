#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nearfield/kernel.hpp"

using nf::KernelConfig;
using nf::pair_potential;

TEST_CASE("pair_potential hand values") {
  const KernelConfig cfg;
  CHECK(pair_potential(0.0, 0.0, 1.0, 0.0, 3.7, cfg) == 0.0);
  CHECK(pair_potential(0.25, 0.5, 0.25, 0.5, 1.0, cfg) == 0.0);
  const double r = std::exp(-1.0);
  CHECK(pair_potential(0.0, 0.0, 0.0, r, 2.0, cfg) == doctest::Approx(2.0).epsilon(1e-15));
  // q ln(1/r) at r = 0.5
  CHECK(pair_potential(0.1, 0.1, 0.4, 0.5, -1.5, cfg) ==
        doctest::Approx(-1.5 * std::log(1.0 / 0.5)).epsilon(1e-15));
}

TEST_CASE("epsilon guard") {
  KernelConfig cfg;
  cfg.epsilon = 1e-3;
  CHECK(pair_potential(0.0, 0.0, 5e-4, 0.0, 1.0, cfg) == 0.0);
  CHECK(pair_potential(0.0, 0.0, 2e-3, 0.0, 1.0, cfg) ==
        doctest::Approx(-std::log(2e-3)));
  CHECK(pair_potential(0.0, 0.0, std::nan(""), 0.0, 1.0, cfg) == 0.0);
}

TEST_CASE("symmetric in target and source position") {
  const KernelConfig cfg;
  CHECK(pair_potential(0.1, 0.7, 0.3, 0.2, 1.0, cfg) ==
        pair_potential(0.3, 0.2, 0.1, 0.7, 1.0, cfg));
}

TEST_CASE("measure_o1_cost is positive") {
  CHECK(nf::measure_o1_cost(1u << 12) > 0.0);
}
