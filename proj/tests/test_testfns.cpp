#include "doctest.h"

#include "sgsample/error.hpp"
#include "sgsample/testfns.hpp"

#include <cmath>
#include <vector>

using namespace sgsample;

TEST_CASE("griewank") {
  const std::vector<double> zero{0.0, 0.0};
  CHECK(griewank(zero) == doctest::Approx(2.0));
  CHECK(griewank(zero, true) == doctest::Approx(0.0));
  const std::vector<double> out_of_domain{2.0 * M_PI};
  CHECK(std::isfinite(griewank(out_of_domain)));
  const std::vector<double> x{1.0, -2.0, 3.0};
  const double sq = (1.0 + 4.0 + 9.0) / 4000.0;
  const double prod = std::cos(1.0) * std::cos(-2.0 / std::sqrt(2.0)) * std::cos(3.0 / std::sqrt(3.0));
  CHECK(griewank(x) == doctest::Approx(sq + prod + 1.0));
  CHECK(griewank(x, true) == doctest::Approx(sq - prod + 1.0));
  const std::vector<double> minus_x{-1.0, 2.0, -3.0};
  CHECK(griewank(minus_x) == doctest::Approx(griewank(x)));
}

TEST_CASE("ackley") {
  const std::vector<double> zero{0.0, 0.0};
  CHECK(std::abs(ackley(zero)) < 1e-12);
  const std::vector<double> five{5.0, 5.0};
  const double expected = -20.0 * std::exp(-0.2 * 5.0) + 20.0 + std::exp(1.0) - std::exp(std::cos(10.0 * M_PI));
  CHECK(ackley(five) == doctest::Approx(expected));
  // At (5, 5) both cosines equal one, leaving 20 (1 - e^-1).
  CHECK(ackley(five) == doctest::Approx(20.0 * (1.0 - std::exp(-1.0))).epsilon(1e-12));
  const std::vector<double> neg{-5.0, -5.0}, mixed{1.3, -0.4}, mixed_neg{-1.3, 0.4};
  CHECK(ackley(neg) == doctest::Approx(ackley(five)));
  CHECK(ackley(mixed) == doctest::Approx(ackley(mixed_neg)));
}

TEST_CASE("fitzhugh drift") {
  FitzHughParams p;
  const State2 a = fitzhugh_drift({0.0, 0.0}, 0.0, p);
  CHECK(a[0] == doctest::Approx(0.0));
  CHECK(a[1] == doctest::Approx(0.0375));
  const State2 b = fitzhugh_drift({-2.5, -1.0}, 0.0, p);
  CHECK(b[0] == doctest::Approx(3.708333333333333));
  CHECK(b[1] == doctest::Approx(-0.05));
  const State2 c = fitzhugh_drift({0.0, 0.0}, 0.4, p);
  CHECK(c[0] == doctest::Approx(0.4));
}

TEST_CASE("euler maruyama step") {
  FitzHughParams p;
  p.noise_variance = 0.0;
  Rng rng(1, 0);
  const State2 s = euler_maruyama_step({-2.5, -1.0}, 0.0, p, rng);
  CHECK(s[0] == doctest::Approx(-1.5729).epsilon(1e-4));
  CHECK(s[1] == doctest::Approx(-1.0125));

  // A fixed point of the drift stays put without noise: v = -1.2, w = (v + alpha) / beta.
  const double v = -1.2, w = (v + p.alpha) / p.beta;
  const double current = -(v - v * v * v / 3.0 - w);
  const State2 f = euler_maruyama_step({v, w}, current, p, rng);
  CHECK(f[0] == doctest::Approx(v));
  CHECK(f[1] == doctest::Approx(w));

  FitzHughParams noisy;
  Rng r1(4, 2), r2(4, 2);
  CHECK(euler_maruyama_step({0.1, 0.2}, 0.5, noisy, r1) == euler_maruyama_step({0.1, 0.2}, 0.5, noisy, r2));

  FitzHughParams bad;
  bad.step = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgumentError);
}
