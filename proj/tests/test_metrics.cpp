#include "doctest.h"
#include "test_support.hpp"

#include "sgsample/error.hpp"
#include "sgsample/metrics.hpp"

#include <cmath>

using namespace sgsample;

namespace {

GaussianMoments gaussian(Vector mean, Matrix cov) { return GaussianMoments{std::move(mean), std::move(cov)}; }

GaussianMoments random_gaussian(Rng& rng, Eigen::Index m) {
  return gaussian(rng.normal_vector(m), testsupport::random_spd(rng, m, 0.1));
}

}  // namespace

TEST_CASE("w2 examples") {
  const GaussianMoments a = gaussian(Eigen::Vector2d(1, 2), Matrix::Identity(2, 2) * 3.0);
  CHECK(w2_gaussian(a, a).distance <= 1e-8);

  const GaussianMoments z = gaussian(Vector::Zero(1), Matrix::Identity(1, 1));
  const GaussianMoments o = gaussian(Vector::Ones(1), Matrix::Identity(1, 1));
  CHECK(std::abs(w2_gaussian(z, o).distance - 1.0) <= 1e-8);
  CHECK(w2_gaussian(z, o).mean_term == doctest::Approx(1.0));

  const GaussianMoments d14 = gaussian(Vector::Zero(2), Eigen::Vector2d(1, 4).asDiagonal());
  const GaussianMoments d11 = gaussian(Vector::Zero(2), Matrix::Identity(2, 2));
  CHECK(std::abs(w2_gaussian(d14, d11).distance - 1.0) <= 1e-8);
}

TEST_CASE("w2 is a metric on random Gaussians") {
  Rng rng(5, 0);
  for (int i = 0; i < 50; ++i) {
    const GaussianMoments a = random_gaussian(rng, 5), b = random_gaussian(rng, 5), c = random_gaussian(rng, 5);
    const double ab = w2_gaussian(a, b).distance;
    CHECK(std::abs(ab - w2_gaussian(b, a).distance) <= 1e-8);
    CHECK(ab <= w2_gaussian(a, c).distance + w2_gaussian(c, b).distance + 1e-8);
    CHECK(ab >= 0.0);
  }
}

TEST_CASE("w2 scales linearly and matches the commuting closed form") {
  Rng rng(6, 0);
  const GaussianMoments a = random_gaussian(rng, 4), b = random_gaussian(rng, 4);
  const double s = 2.5;
  const GaussianMoments as = gaussian(s * a.mean, s * s * a.covariance);
  const GaussianMoments bs = gaussian(s * b.mean, s * s * b.covariance);
  CHECK(w2_gaussian(as, bs).distance == doctest::Approx(s * w2_gaussian(a, b).distance).epsilon(1e-8));

  // Commuting covariances: sum (sqrt(l1) - sqrt(l2))^2 in a shared eigenbasis.
  const Matrix q = Eigen::HouseholderQR<Matrix>(testsupport::random_matrix(rng, 4, 4)).householderQ();
  const Vector l1 = Eigen::Vector4d(1, 2, 3, 4), l2 = Eigen::Vector4d(0.5, 5, 3, 1);
  const GaussianMoments c1 = gaussian(Vector::Zero(4), q * l1.asDiagonal() * q.transpose());
  const GaussianMoments c2 = gaussian(Vector::Zero(4), q * l2.asDiagonal() * q.transpose());
  const double expected = std::sqrt((l1.cwiseSqrt() - l2.cwiseSqrt()).squaredNorm());
  CHECK(w2_gaussian(c1, c2).distance == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("w2 input checks") {
  const GaussianMoments a = gaussian(Vector::Zero(2), Matrix::Identity(2, 2));
  const GaussianMoments b = gaussian(Vector::Zero(3), Matrix::Identity(3, 3));
  CHECK_THROWS_AS(w2_gaussian(a, b), InputShapeError);
  Matrix asym = Matrix::Identity(2, 2);
  asym(0, 1) = 0.3;
  CHECK_THROWS_AS(w2_gaussian(a, gaussian(Vector::Zero(2), asym)), InputShapeError);
  // Slightly indefinite covariances are clipped and counted.
  Matrix indef = Eigen::Vector2d(1, -1e-3).asDiagonal();
  const W2Result r = w2_gaussian(a, gaussian(Vector::Zero(2), indef));
  CHECK(r.clipped_eigs >= 1);
  CHECK(std::isfinite(r.distance));
}

TEST_CASE("empirical moments") {
  Matrix two(2, 2);
  two << 0, 0, 2, 2;
  const GaussianMoments m = empirical_moments(two);
  CHECK(m.mean == Eigen::Vector2d(1, 1));
  CHECK(m.covariance == (Matrix(2, 2) << 2, 2, 2, 2).finished());

  CHECK(empirical_moments(Matrix::Constant(5, 3, 1.5)).covariance.isZero());
  CHECK_THROWS_AS(empirical_moments(Matrix::Zero(1, 3)), InvalidArgumentError);

  Rng rng(7, 0);
  const Matrix draws = rng.normal_vector(100000);
  const GaussianMoments s = empirical_moments(draws);
  CHECK(std::abs(s.mean(0)) < 0.013);
  CHECK(std::abs(s.covariance(0, 0) - 1.0) < 0.015);
}

TEST_CASE("gaussian sampling and the Monte-Carlo floor") {
  Rng rng(8, 0);
  const GaussianMoments t = random_gaussian(rng, 6);
  const int n = 20000;
  const Matrix draws = sample_gaussian(t, 3, n);
  const GaussianMoments e = empirical_moments(draws);
  CHECK(testsupport::covariance_z_scores(e.covariance, t.covariance, n).max_z < 5.0);
  CHECK(testsupport::mean_z_score(e.mean, t.mean, t.covariance, n) < 5.0);

  const double f_small = monte_carlo_floor(t, 500, 1);
  const double f_large = monte_carlo_floor(t, 50000, 1);
  CHECK(f_large < f_small);
  CHECK(f_large > 0.0);
  CHECK(monte_carlo_floor(t, 500, 1) == f_small);
}
