#include "doctest.h"
#include "test_support.hpp"

#include "sgsample/error.hpp"
#include "sgsample/linalg.hpp"
#include "sgsample/metrics.hpp"
#include "sgsample/prior_sampler.hpp"

#include <cmath>
#include <memory>

using namespace sgsample;
using testsupport::covariance_z_scores;

namespace {

std::shared_ptr<const SparseGrid> unit_grid(int eta, int d) {
  return std::make_shared<const SparseGrid>(build_sparse_grid(eta, d, Box::unit(d)));
}

Matrix sor_covariance(const ProductKernel& k, const PointSet& z, const SparseGrid& g) {
  const Matrix kzu = kernel_matrix(k, z, g.points());
  const Matrix kuu = kernel_matrix(k, g.points(), g.points());
  return kzu * kuu.ldlt().solve(kzu.transpose());
}

}  // namespace

TEST_CASE("cholesky prior with far-apart points is white noise") {
  const ProductKernel k = testsupport::matern32(1, 0.01);
  PointSet z(4, 1);
  z << 0, 1, 2, 3;
  const SampleBatch b = sample_prior_cholesky(k, z, {}, 7, 10000);
  const GaussianMoments m = empirical_moments(b);
  CHECK(covariance_z_scores(m.covariance, Matrix::Identity(4, 4), 10000).max_z < 5.0);
  CHECK(testsupport::mean_z_score(m.mean, Vector::Zero(4), Matrix::Identity(4, 4), 10000) < 5.0);
}

TEST_CASE("cholesky prior at one point is standard normal") {
  const ProductKernel k = testsupport::matern32(2);
  PointSet z(1, 2);
  z << 0.3, 0.4;
  const int n = 20000;
  const SampleBatch b = sample_prior_cholesky(k, z, {}, 8, n);
  CHECK(std::abs(b.values.mean()) < 4.0 / std::sqrt(n));
}

TEST_CASE("cholesky prior matches the kernel matrix and honours the mean") {
  Rng rng(2, 0);
  const ProductKernel k = testsupport::matern32(2, 0.5);
  const PointSet z = testsupport::unit_points(rng, 16, 2);
  const MeanFunction mean = [](std::span<const double> x) { return 3.0 + x[0]; };
  const SampleBatch b = sample_prior_cholesky(k, z, mean, 9, 10000, 2);
  const GaussianMoments m = empirical_moments(b);
  const Matrix kzz = kernel_matrix(k, z, z);
  CHECK(covariance_z_scores(m.covariance, kzz, 10000).max_z < 5.0);
  CHECK(testsupport::mean_z_score(m.mean, evaluate_mean(mean, z), kzz, 10000) < 5.0);
}

TEST_CASE("batches are deterministic and independent of thread count") {
  Rng rng(3, 0);
  const ProductKernel k = testsupport::matern32(2);
  const PointSet z = testsupport::unit_points(rng, 10, 2);
  const auto grid = unit_grid(4, 2);
  CHECK(sample_prior_cholesky(k, z, {}, 5, 30, 1).values == sample_prior_cholesky(k, z, {}, 5, 30, 3).values);
  CHECK(sample_prior_insg(k, z, grid, {}, 5, 30, 1).values == sample_prior_insg(k, z, grid, {}, 5, 30, 3).values);
  CHECK(sample_prior_rff(k, z, {}, 5, 64, 30, 1).values == sample_prior_rff(k, z, {}, 5, 64, 30, 4).values);
  CHECK(sample_prior_insg(k, z, grid, {}, 5, 30).values != sample_prior_insg(k, z, grid, {}, 6, 30).values);
  // Row k depends only on (seed, k).
  const Matrix all = sample_prior_insg(k, z, grid, {}, 5, 30).values;
  CHECK(all.topRows(10) == sample_prior_insg(k, z, grid, {}, 5, 10).values);
}

TEST_CASE("hierarchical inducing covariance is exactly the inverse kernel matrix") {
  for (auto [eta, d] : {std::pair{2, 2}, std::pair{4, 2}, std::pair{5, 2}, std::pair{5, 3}, std::pair{6, 4}}) {
    const ProductKernel k = testsupport::matern32(d);
    const auto grid = unit_grid(eta, d);
    InsgPriorSampler s(k, grid);
    const Matrix kuu = kernel_matrix(k, grid->points(), grid->points());
    const Matrix cov = s.inducing_covariance();
    CHECK_MESSAGE((cov * kuu - Matrix::Identity(grid->size(), grid->size())).cwiseAbs().maxCoeff() < 1e-8,
                  "eta=" << eta << " d=" << d);
  }
}

TEST_CASE("combination scheme covariance is the signed sum of component inverses") {
  const int eta = 4, d = 2;
  const ProductKernel k = testsupport::matern32(d);
  const auto grid = unit_grid(eta, d);
  InsgPriorSampler s(k, grid, InsgScheme::kCombination);
  Matrix expected = Matrix::Zero(grid->size(), grid->size());
  for (const auto& t : grid->smolyak_indices()) {
    const auto& pos = grid->scatter_indices(t);
    PointSet pts(static_cast<Eigen::Index>(pos.size()), d);
    for (std::size_t i = 0; i < pos.size(); ++i) pts.row(static_cast<Eigen::Index>(i)) = grid->points().row(pos[i]);
    const Matrix inv = kernel_matrix(k, pts, pts).inverse();
    const double c = static_cast<double>(smolyak_coefficient(t, eta, d));
    for (std::size_t a = 0; a < pos.size(); ++a)
      for (std::size_t b = 0; b < pos.size(); ++b)
        expected(pos[a], pos[b]) += c * c * inv(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  }
  CHECK((s.inducing_covariance() - expected).cwiseAbs().maxCoeff() <= 1e-10 * expected.cwiseAbs().maxCoeff());
}

TEST_CASE("empirical inducing covariance matches the inverse kernel matrix") {
  const ProductKernel k = testsupport::matern32(2);
  const auto grid = unit_grid(4, 2);  // 17 points
  REQUIRE(grid->size() == 17);
  InsgPriorSampler s(k, grid);
  const int n = 10000;
  Matrix draws(n, grid->size());
  for (int r = 0; r < n; ++r) {
    Rng rng(44, replicate_stream(static_cast<std::uint64_t>(r)));
    draws.row(r) = s.draw_inducing(rng).transpose();
  }
  const Matrix target = kernel_matrix(k, grid->points(), grid->points()).inverse();
  CHECK(covariance_z_scores(empirical_moments(draws).covariance, target, n).max_z < 5.0);
}

TEST_CASE("single inducing point gives a rank-one field") {
  const ProductKernel k = testsupport::matern32(2, std::sqrt(3.0), 2.0);
  const auto grid = unit_grid(2, 2);
  PointSet z(3, 2);
  z << 0.5, 0.5, 0.1, 0.2, 0.9, 0.6;
  const SampleBatch b = sample_prior_insg(k, z, grid, {}, 12, 50);
  const Matrix kzu = kernel_matrix(k, z, grid->points());
  for (Eigen::Index r = 0; r < b.replicates(); ++r) {
    const double scale = b.values(r, 0) / kzu(0, 0);
    CHECK((b.values.row(r).transpose() - scale * kzu).cwiseAbs().maxCoeff() < 1e-12);
  }
  // The value at the inducing point itself has variance K(u, u).
  const SampleBatch big = sample_prior_insg(k, z, grid, {}, 13, 20000);
  const double var = empirical_moments(big).covariance(0, 0);
  CHECK(std::abs(var - 2.0) < 5.0 * 2.0 * std::sqrt(2.0 / 20000));
}

TEST_CASE("InSG prior covariance matches the subset-of-regressors covariance") {
  Rng rng(17, 0);
  const ProductKernel k = testsupport::matern32(2);
  const auto grid = unit_grid(5, 2);
  const PointSet z = testsupport::unit_points(rng, 32, 2);
  const int n = 10000;
  const SampleBatch b = sample_prior_insg(k, z, grid, {}, 23, n);
  const GaussianMoments m = empirical_moments(b);
  const Matrix target = sor_covariance(k, z, *grid);
  const auto check = covariance_z_scores(m.covariance, target, n);
  CHECK(check.max_z < 5.0);
  CHECK(check.share_beyond_3 < 0.01);
  CHECK(testsupport::mean_z_score(m.mean, Vector::Zero(32), target, n) < 5.0);
}

TEST_CASE("subset-of-regressors covariance is dominated by the prior") {
  Rng rng(4, 0);
  for (int eta = 2; eta <= 7; ++eta) {
    const ProductKernel k = testsupport::matern32(2);
    const auto grid = unit_grid(eta, 2);
    const PointSet z = testsupport::unit_points(rng, 24, 2);
    const Matrix gap = kernel_matrix(k, z, z) - sor_covariance(k, z, *grid);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (gap + gap.transpose()));
    CHECK(eig.eigenvalues().minCoeff() >= -1e-8);
  }
}

TEST_CASE("random Fourier features") {
  const ProductKernel k = testsupport::matern32(2, 0.8, 1.5);
  PointSet z(2, 2);
  z << 0.1, 0.2, 0.4, 0.9;
  const int n = 10000;
  const SampleBatch b = sample_prior_rff(k, z, {}, 31, 64, n);
  const double var = empirical_moments(b).covariance(0, 0);
  // Var of the sample variance is bounded by E f^4 - var^2 <= 2 var^2 (fourth moment of a
  // sum of cosines is below the Gaussian one for F = 64 up to O(1/F)).
  CHECK(std::abs(var - 1.5) < 5.0 * 1.5 * std::sqrt(2.0 / n));

  CHECK(sample_prior_rff(k, z, {}, 31, 64, 20).values == sample_prior_rff(k, z, {}, 31, 64, 20).values);
  CHECK_THROWS_AS(sample_prior_rff(k, z, {}, 31, 0, 20), InvalidArgumentError);
}

TEST_CASE("random Fourier features converge to the kernel with many features") {
  const ProductKernel k = testsupport::matern32(1, 0.5);
  PointSet z(8, 1);
  for (int i = 0; i < 8; ++i) z(i, 0) = 0.15 * i;
  const SampleBatch b = sample_prior_rff(k, z, {}, 37, 4096, 10000);
  const Matrix kzz = kernel_matrix(k, z, z);
  CHECK((empirical_moments(b).covariance - kzz).cwiseAbs().maxCoeff() <= 0.05);
}

TEST_CASE("feature matrix expectation reproduces the kernel") {
  const ProductKernel k = testsupport::matern32(2, 0.9);
  PointSet z(3, 2);
  z << 0.0, 0.0, 0.3, 0.1, -0.2, 0.5;
  Rng rng(41, 0);
  const RffFeatures f = RffFeatures::draw(k, 200000, rng);
  const Matrix phi = f.feature_matrix(z);
  CHECK((phi * phi.transpose() - kernel_matrix(k, z, z)).cwiseAbs().maxCoeff() < 0.02);
}
