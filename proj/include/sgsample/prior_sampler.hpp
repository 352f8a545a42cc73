#pragma once

#include "sgsample/kernels.hpp"
#include "sgsample/random.hpp"
#include "sgsample/sparse_grid.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace sgsample {

/// Replicate draws at a point set: one row of `values` per replicate.
///
/// Row k is generated from Rng(seed, replicate_stream(k)) only, so rows are
/// reproducible independently of thread count.
struct SampleBatch {
  PointSet points;
  Matrix values;
  std::uint64_t seed = 0;
  std::string method;

  // Solver bookkeeping for posterior samplers; empty otherwise.
  std::vector<int> iterations;
  int unconverged = 0;

  Eigen::Index replicates() const { return values.rows(); }
};

/// Draws prior samples L_Z g + mu_Z with L_Z = chol(K_ZZ).
SampleBatch sample_prior_cholesky(const ProductKernel& kernel, const PointSet& z,
                                  const MeanFunction& mean, std::uint64_t seed, int n_samples,
                                  int threads = 1);

enum class InsgScheme {
  /// Hierarchical increments of the sparse grid; covariance is exactly K_UU^{-1}.
  kHierarchical,
  /// Signed Smolyak sum over P(eta, d) with an independent N(0, I) draw per term.
  /// Its covariance is sum_t c_t^2 S_t^T K_t^{-1} S_t rather than K_UU^{-1}; kept
  /// for comparison.
  kCombination,
};

/// Inducing-point sampler on a sparse grid for separable kernels.
///
/// Draws a vector w over the grid with covariance K_UU^{-1} using only
/// one-dimensional Cholesky factors and Kronecker products; a prior draw at Z is
/// then K_{Z,U} w + mu_Z. The per-dimension factors are computed once in the
/// constructor and shared by all replicates.
class InsgPriorSampler {
 public:
  InsgPriorSampler(ProductKernel kernel, std::shared_ptr<const SparseGrid> grid,
                   InsgScheme scheme = InsgScheme::kHierarchical);

  const ProductKernel& kernel() const { return kernel_; }
  const SparseGrid& grid() const { return *grid_; }
  std::shared_ptr<const SparseGrid> grid_ptr() const { return grid_; }
  InsgScheme scheme() const { return scheme_; }
  Eigen::Index inducing_size() const { return grid_->size(); }

  /// One inducing vector distributed as N(0, K_UU^{-1}) (hierarchical scheme).
  Vector draw_inducing(Rng& rng) const;

  /// Exact covariance of draw_inducing, assembled densely. Validation only.
  Matrix inducing_covariance() const;

  /// Prior draws K_{Z,U} w + mu_Z.
  SampleBatch sample(const PointSet& z, const MeanFunction& mean, std::uint64_t seed,
                     int n_samples, int threads = 1) const;

 private:
  struct Term {
    std::vector<const Matrix*> factors;
    std::vector<Eigen::Index> positions;
    double coefficient = 1.0;
    Eigen::Index noise_size = 0;
  };

  void build_hierarchical();
  void build_combination();

  ProductKernel kernel_;
  std::shared_ptr<const SparseGrid> grid_;
  InsgScheme scheme_;
  // Cached factor blocks; stable addresses referenced by terms_.
  std::vector<std::unique_ptr<Matrix>> blocks_;
  std::vector<Term> terms_;
};

/// Convenience wrapper: builds the sampler and draws.
SampleBatch sample_prior_insg(const ProductKernel& kernel, const PointSet& z,
                              std::shared_ptr<const SparseGrid> grid, const MeanFunction& mean,
                              std::uint64_t seed, int n_samples, int threads = 1);

/// Random Fourier features of a product Matern kernel.
struct RffFeatures {
  Matrix frequencies;  // F x d
  Vector phases;       // F, uniform on [0, 2 pi)

  Eigen::Index count() const { return phases.size(); }

  /// Frequencies per dimension are t / omega_j with t ~ Student-t(2 nu_j), the
  /// spectral measure of the unit Matern correlation.
  static RffFeatures draw(const ProductKernel& kernel, int n_features, Rng& rng);

  /// Feature matrix Phi (n x F) with Phi_ik = sqrt(2 / F) cos(w_k . x_i + b_k).
  Matrix feature_matrix(const PointSet& x) const;
};

/// f(x) = sigma sqrt(2/F) sum_k cos(w_k . x + b_k) + mu(x), with fresh features per replicate.
SampleBatch sample_prior_rff(const ProductKernel& kernel, const PointSet& z,
                             const MeanFunction& mean, std::uint64_t seed, int n_features,
                             int n_samples, int threads = 1);

}  // namespace sgsample
