#pragma once

#include "sgsample/random.hpp"

#include <array>
#include <span>

namespace sgsample {

/// sum_j x_j^2 / 4000 + prod_j cos(x_j / sqrt(j)) + 1. With `standard_sign` the
/// product enters with a minus sign (the usual benchmark form, minimum 0 at 0).
double griewank(std::span<const double> x, bool standard_sign = false);

/// -a exp(-b sqrt(mean x_j^2)) + a + e - exp(mean cos(c x_j)).
double ackley(std::span<const double> x, double a = 20.0, double b = 0.2,
              double c = 6.283185307179586);

struct FitzHughParams {
  double alpha = 0.75;
  double beta = 0.75;
  double gamma = 20.0;
  double step = 0.25;
  double noise_variance = 1e-4;

  void validate() const;
};

using State2 = std::array<double, 2>;

/// (v - v^3/3 - w + a, (v - beta w + alpha) / gamma).
State2 fitzhugh_drift(const State2& state, double current, const FitzHughParams& params);

/// x + tau f(x, a) + sqrt(tau) eps with eps ~ N(0, sigma_eps^2 I).
State2 euler_maruyama_step(const State2& state, double current, const FitzHughParams& params, Rng& rng);

}  // namespace sgsample
