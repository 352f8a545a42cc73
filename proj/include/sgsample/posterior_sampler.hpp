#pragma once

#include "sgsample/krylov.hpp"
#include "sgsample/prior_sampler.hpp"

#include <memory>

namespace sgsample {

/// Noisy observations y_i = f(x_i) + eps_i with eps_i ~ N(0, noise_variance).
struct Observations {
  PointSet x;
  Vector y;
  double noise_variance = 1e-4;
  MeanFunction mean;

  Eigen::Index size() const { return x.rows(); }
  /// Throws InputShapeError / InvalidArgumentError.
  void validate(int dimension) const;
};

/// Exact GP posterior at xstar via Cholesky of K_XX + sigma_eps^2 I.
GaussianMoments exact_posterior_moments(const ProductKernel& kernel, const Observations& obs,
                                        const PointSet& xstar);

/// L g + mu with (mu, L L^T) the exact posterior and g an m-vector standard normal.
SampleBatch sample_posterior_cholesky(const ProductKernel& kernel, const Observations& obs,
                                      const PointSet& xstar, std::uint64_t seed, int n_samples,
                                      int threads = 1);

/// Matheron's update with an exact joint prior draw over (X, xstar).
class ExactMatheronSampler {
 public:
  ExactMatheronSampler(const ProductKernel& kernel, const Observations& obs, const PointSet& xstar);

  /// Joint prior draw (f_X, f_*) including the mean.
  std::pair<Vector, Vector> draw_prior(Rng& rng) const;

  /// f_* + K_{*,X} (K_XX + sigma_eps^2 I)^{-1} (y - f_X - eps).
  Vector update(const Vector& f_x, const Vector& f_star, const Vector& eps) const;

  SampleBatch sample(std::uint64_t seed, int n_samples, int threads = 1) const;

 private:
  Observations obs_;
  Eigen::Index m_;
  LowerTriangularFactor joint_;
  LowerTriangularFactor data_;
  Matrix k_star_x_;
  Vector mu_joint_;
};

SampleBatch sample_posterior_matheron_exact(const ProductKernel& kernel, const Observations& obs,
                                            const PointSet& xstar, std::uint64_t seed,
                                            int n_samples, int threads = 1);

/// Moments of Matheron's update obtained by pushing the joint prior and the noise
/// through the affine map, without simplifying; must equal the exact posterior.
GaussianMoments matheron_pushforward_moments(const ProductKernel& kernel, const Observations& obs,
                                             const PointSet& xstar);

/// Subset-of-regressors posterior with inducing points `inducing`, via a dense
/// factorization of Sigma_U = K_UU + sigma_eps^{-2} K_UX K_XU.
GaussianMoments sor_posterior_moments(const ProductKernel& kernel, const Observations& obs,
                                      const PointSet& xstar, const PointSet& inducing);

/// Same, with the sparse grid as the inducing set.
GaussianMoments sor_posterior_moments(const ProductKernel& kernel, const Observations& obs,
                                      const PointSet& xstar, const SparseGrid& grid);

struct InsgSolverOptions {
  double tol = 1e-8;
  int max_iter = 0;  // 0: 10 * n_sg
  PreconditionerKind preconditioner = PreconditionerKind::kTwoLevelAdditiveSchwarz;
  KuuStorage storage = KuuStorage::kAuto;
};

/// Sparse-grid posterior sampler: a shared inducing draw w gives the correlated
/// prior pair f_X = K_XU w + mu_X, f_* = K_*U w + mu_*; the Matheron correction
/// solves Sigma_U z = K_UX (y - f_X - eps) by PCG and returns
/// f_* + sigma_eps^{-2} K_*U z. The operator and preconditioner are built once.
class InsgPosteriorSampler {
 public:
  struct Draw {
    Vector values;
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
  };

  InsgPosteriorSampler(const ProductKernel& kernel, Observations obs,
                       std::shared_ptr<const SparseGrid> grid, InsgSolverOptions options = {});

  const SorOperator& sor_operator() const { return op_; }
  const Preconditioner& preconditioner() const { return precond_; }
  const InsgPriorSampler& prior() const { return prior_; }
  const Observations& observations() const { return obs_; }
  const InsgSolverOptions& options() const { return options_; }

  /// Kernel block K_{*,U} for a set of test points.
  Matrix cross_covariance(const PointSet& xstar) const;

  /// Matheron correction for given prior values and noise.
  Draw update(const Matrix& kstar_u, const Vector& f_x, const Vector& f_star, const Vector& eps) const;

  /// One posterior draw: inducing vector first, then the noise vector, from `rng`.
  Draw draw(const Matrix& kstar_u, const Vector& mu_star, Rng& rng) const;

  SampleBatch sample(const PointSet& xstar, std::uint64_t seed, int n_samples, int threads = 1) const;

 private:
  Observations obs_;
  InsgSolverOptions options_;
  InsgPriorSampler prior_;
  SorOperator op_;
  Preconditioner precond_;
  Vector mu_x_;
};

SampleBatch sample_posterior_insg(const ProductKernel& kernel, const Observations& obs,
                                  const PointSet& xstar, std::shared_ptr<const SparseGrid> grid,
                                  std::uint64_t seed, int n_samples,
                                  const InsgSolverOptions& options = {}, int threads = 1);

/// Decoupled sampler: random Fourier feature prior plus the exact Matheron update.
SampleBatch sample_posterior_rff(const ProductKernel& kernel, const Observations& obs,
                                 const PointSet& xstar, std::uint64_t seed, int n_features,
                                 int n_samples, int threads = 1);

}  // namespace sgsample
