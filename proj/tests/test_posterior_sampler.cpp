#include "doctest.h"
#include "test_support.hpp"

#include "sgsample/error.hpp"
#include "sgsample/metrics.hpp"
#include "sgsample/posterior_sampler.hpp"

#include <cmath>
#include <memory>

using namespace sgsample;
using testsupport::covariance_z_scores;

namespace {

Observations random_observations(Rng& rng, Eigen::Index n, int d, double noise) {
  Observations obs;
  obs.x = testsupport::unit_points(rng, n, d);
  obs.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) obs.y(i) = std::sin(3.0 * obs.x(i, 0)) + obs.x.row(i).sum();
  obs.noise_variance = noise;
  return obs;
}

std::shared_ptr<const SparseGrid> unit_grid(int eta, int d) {
  return std::make_shared<const SparseGrid>(build_sparse_grid(eta, d, Box::unit(d)));
}

double relative_frobenius(const Matrix& a, const Matrix& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST_CASE("observation validation") {
  Rng rng(1, 0);
  Observations obs = random_observations(rng, 5, 2, 1e-2);
  CHECK_NOTHROW(obs.validate(2));
  CHECK_THROWS_AS(obs.validate(3), InputShapeError);
  Observations dup = obs;
  dup.x.row(3) = dup.x.row(1);
  CHECK_THROWS_AS(dup.validate(2), InvalidArgumentError);
  Observations bad_noise = obs;
  bad_noise.noise_variance = 0.0;
  CHECK_THROWS_AS(bad_noise.validate(2), InvalidArgumentError);
  Observations short_y = obs;
  short_y.y.resize(4);
  CHECK_THROWS_AS(short_y.validate(2), InputShapeError);
}

TEST_CASE("exact posterior limits") {
  Rng rng(2, 0);
  const ProductKernel k = testsupport::matern32(2);
  const PointSet xstar = testsupport::unit_points(rng, 6, 2);

  Observations vague = random_observations(rng, 10, 2, 1e8);
  vague.mean = [](std::span<const double> x) { return 1.0 + x[1]; };
  const GaussianMoments prior_like = exact_posterior_moments(k, vague, xstar);
  const Vector mu = evaluate_mean(vague.mean, xstar);
  CHECK((prior_like.mean - mu).norm() <= 1e-6 * mu.norm());
  CHECK(relative_frobenius(prior_like.covariance, kernel_matrix(k, xstar, xstar)) <= 1e-6);

  Observations sharp = random_observations(rng, 10, 2, 1e-12);
  const GaussianMoments interp = exact_posterior_moments(k, sharp, sharp.x);
  CHECK((interp.mean - sharp.y).cwiseAbs().maxCoeff() <= 1e-4);
}

TEST_CASE("Matheron pushforward equals the conditional moments") {
  Rng rng(3, 0);
  const ProductKernel k = testsupport::matern32(2, 0.7);
  Observations obs = random_observations(rng, 16, 2, 0.05);
  obs.mean = [](std::span<const double> x) { return x[0] - 2.0 * x[1]; };
  const PointSet xstar = testsupport::unit_points(rng, 8, 2);
  const GaussianMoments exact = exact_posterior_moments(k, obs, xstar);
  const GaussianMoments push = matheron_pushforward_moments(k, obs, xstar);
  CHECK(relative_frobenius(push.covariance, exact.covariance) <= 1e-10);
  CHECK((push.mean - exact.mean).norm() <= 1e-10 * exact.mean.norm());
}

TEST_CASE("cholesky posterior sampling") {
  Rng rng(4, 0);
  const ProductKernel k = testsupport::matern32(2);
  const Observations obs = random_observations(rng, 12, 2, 1e-2);
  const PointSet xstar = testsupport::unit_points(rng, 10, 2);
  const int n = 10000;
  const SampleBatch b = sample_posterior_cholesky(k, obs, xstar, 5, n);
  const GaussianMoments target = exact_posterior_moments(k, obs, xstar);
  const GaussianMoments m = empirical_moments(b);
  CHECK(testsupport::mean_z_score(m.mean, target.mean, target.covariance, n) < 5.0);
  CHECK(covariance_z_scores(m.covariance, target.covariance, n).max_z < 5.0);
  CHECK(sample_posterior_cholesky(k, obs, xstar, 5, 20).values == b.values.topRows(20));

  // One test point: scalar normal with the posterior moments.
  const SampleBatch one = sample_posterior_cholesky(k, obs, xstar.topRows(1), 6, n);
  const GaussianMoments t1 = exact_posterior_moments(k, obs, xstar.topRows(1));
  const double se = std::sqrt(t1.covariance(0, 0) / n);
  CHECK(std::abs(one.values.mean() - t1.mean(0)) < 5.0 * se);
}

TEST_CASE("exact Matheron sampler") {
  Rng rng(5, 0);
  const ProductKernel k = testsupport::matern32(2);
  const Observations obs = random_observations(rng, 12, 2, 1e-2);
  const PointSet xstar = testsupport::unit_points(rng, 10, 2);
  ExactMatheronSampler s(k, obs, xstar);

  // Zero innovation: data equal to the prior draw plus its own noise.
  Rng draw(9, 1);
  const auto [fx, fs] = s.draw_prior(draw);
  const Vector eps = 0.1 * draw.normal_vector(12);
  Observations consistent = obs;
  consistent.y = fx + eps;
  ExactMatheronSampler s2(k, consistent, xstar);
  CHECK((s2.update(fx, fs, eps) - fs).cwiseAbs().maxCoeff() < 1e-12);

  const int n = 10000;
  const SampleBatch b = s.sample(11, n);
  const GaussianMoments target = exact_posterior_moments(k, obs, xstar);
  const GaussianMoments m = empirical_moments(b);
  CHECK(covariance_z_scores(m.covariance, target.covariance, n).max_z < 5.0);
  CHECK(testsupport::mean_z_score(m.mean, target.mean, target.covariance, n) < 5.0);
}

TEST_CASE("subset-of-regressors moments") {
  Rng rng(6, 0);
  const ProductKernel k = testsupport::matern32(2);
  const Observations obs = random_observations(rng, 15, 2, 1e-2);
  const PointSet xstar = testsupport::unit_points(rng, 7, 2);

  // Inducing set equal to the data reproduces the exact posterior mean.
  const GaussianMoments sor_x = sor_posterior_moments(k, obs, xstar, obs.x);
  const GaussianMoments exact = exact_posterior_moments(k, obs, xstar);
  CHECK((sor_x.mean - exact.mean).cwiseAbs().maxCoeff() <= 1e-8);

  const SparseGrid grid = build_sparse_grid(5, 2, Box::unit(2));
  const GaussianMoments sor = sor_posterior_moments(k, obs, xstar, grid);
  CHECK(asymmetry(sor.covariance) <= 1e-10);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sor.covariance);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-8);

  Observations vague = obs;
  vague.noise_variance = 1e10;
  CHECK(sor_posterior_moments(k, vague, xstar, grid).mean.cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("InSG posterior zero innovation stays within solver tolerance") {
  Rng rng(7, 0);
  const ProductKernel k = testsupport::matern32(2);
  const Observations obs = random_observations(rng, 40, 2, 1e-2);
  const PointSet xstar = testsupport::unit_points(rng, 9, 2);
  const auto grid = unit_grid(5, 2);
  InsgSolverOptions opt;
  opt.tol = 1e-8;
  InsgPosteriorSampler s(k, obs, grid, opt);
  const Matrix ksu = s.cross_covariance(xstar);
  Rng draw(3, 1);
  const Vector w = s.prior().draw_inducing(draw);
  const Vector fx = s.sor_operator().kux().transpose() * w;
  const Vector fs = ksu * w;
  const Vector eps = 0.1 * draw.normal_vector(40);
  Observations consistent = obs;
  consistent.y = fx + eps;
  InsgPosteriorSampler s2(k, consistent, grid, opt);
  const auto out = s2.update(ksu, fx, fs, eps);
  CHECK(out.converged);
  CHECK((out.values - fs).cwiseAbs().maxCoeff() <= 10 * opt.tol);
}

TEST_CASE("InSG posterior matches the subset-of-regressors oracle") {
  Rng rng(8, 0);
  const ProductKernel k = testsupport::matern32(2);
  const Observations obs = random_observations(rng, 64, 2, 1e-2);
  const PointSet xstar = testsupport::unit_points(rng, 12, 2);
  const auto grid = unit_grid(4, 2);
  InsgSolverOptions opt;
  opt.tol = 1e-10;
  const int n = 10000;
  const SampleBatch b = sample_posterior_insg(k, obs, xstar, grid, 21, n, opt);
  CHECK(b.unconverged == 0);
  CHECK(static_cast<int>(b.iterations.size()) == n);
  const GaussianMoments target = sor_posterior_moments(k, obs, xstar, *grid);
  const GaussianMoments m = empirical_moments(b);
  CHECK(covariance_z_scores(m.covariance, target.covariance, n).max_z < 5.0);
  CHECK(testsupport::mean_z_score(m.mean, target.mean, target.covariance, n) < 5.0);

  const SampleBatch again = sample_posterior_insg(k, obs, xstar, grid, 21, 25, opt, 3);
  CHECK(again.values == b.values.topRows(25));
}

TEST_CASE("InSG posterior flags unconverged replicates") {
  Rng rng(9, 0);
  const ProductKernel k = testsupport::matern32(2);
  const Observations obs = random_observations(rng, 64, 2, 1e-4);
  const PointSet xstar = testsupport::unit_points(rng, 4, 2);
  InsgSolverOptions opt;
  opt.tol = 1e-14;
  opt.max_iter = 1;
  opt.preconditioner = PreconditionerKind::kIdentity;
  const SampleBatch b = sample_posterior_insg(k, obs, xstar, unit_grid(5, 2), 1, 5, opt);
  CHECK(b.unconverged == 5);
  CHECK(b.values.allFinite());
}

TEST_CASE("decoupled RFF posterior runs and is reproducible") {
  Rng rng(10, 0);
  const ProductKernel k = testsupport::matern32(2);
  const Observations obs = random_observations(rng, 20, 2, 1e-2);
  const PointSet xstar = testsupport::unit_points(rng, 5, 2);
  const SampleBatch a = sample_posterior_rff(k, obs, xstar, 3, 64, 10);
  CHECK(a.values.rows() == 10);
  CHECK(a.values == sample_posterior_rff(k, obs, xstar, 3, 64, 10, 2).values);
}
