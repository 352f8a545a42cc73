#include "sgsample/testfns.hpp"

#include "sgsample/error.hpp"

#include <cmath>
#include <numbers>

namespace sgsample {

double griewank(std::span<const double> x, bool standard_sign) {
  double sum = 0.0;
  double prod = 1.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    sum += x[j] * x[j] / 4000.0;
    prod *= std::cos(x[j] / std::sqrt(static_cast<double>(j + 1)));
  }
  return standard_sign ? sum - prod + 1.0 : sum + prod + 1.0;
}

double ackley(std::span<const double> x, double a, double b, double c) {
  if (x.empty()) return 0.0;
  const double d = static_cast<double>(x.size());
  double sq = 0.0;
  double cs = 0.0;
  for (double xi : x) {
    sq += xi * xi;
    cs += std::cos(c * xi);
  }
  return -a * std::exp(-b * std::sqrt(sq / d)) + a + std::numbers::e - std::exp(cs / d);
}

void FitzHughParams::validate() const {
  if (!(step > 0.0)) throw InvalidArgumentError("FitzHugh step must be positive");
  if (gamma == 0.0) throw InvalidArgumentError("FitzHugh gamma must be non-zero");
  if (!(noise_variance >= 0.0)) throw InvalidArgumentError("FitzHugh noise variance must be non-negative");
}

State2 fitzhugh_drift(const State2& state, double current, const FitzHughParams& params) {
  const double v = state[0];
  const double w = state[1];
  return {v - v * v * v / 3.0 - w + current, (v - params.beta * w + params.alpha) / params.gamma};
}

State2 euler_maruyama_step(const State2& state, double current, const FitzHughParams& params, Rng& rng) {
  const State2 f = fitzhugh_drift(state, current, params);
  const double root_tau = std::sqrt(params.step);
  const double sd = std::sqrt(params.noise_variance);
  State2 next;
  for (std::size_t i = 0; i < 2; ++i) next[i] = state[i] + params.step * f[i] + root_tau * sd * rng.normal();
  return next;
}

}  // namespace sgsample
