#pragma once

#include "sgsample/prior_sampler.hpp"

namespace sgsample {

struct W2Result {
  double distance = 0.0;
  double mean_term = 0.0;   // ||mu_1 - mu_2||^2
  double trace_term = 0.0;  // tr(S_1 + S_2 - 2 (S_1^{1/2} S_2 S_1^{1/2})^{1/2})
  int clipped_eigs = 0;
};

/// 2-Wasserstein distance between two Gaussians. Negative eigenvalues inside the
/// matrix square roots are set to zero; those below -1e-10 * trace / m are counted.
W2Result w2_gaussian(const GaussianMoments& a, const GaussianMoments& b);

/// Sample mean and unbiased, symmetrized sample covariance of the rows of `values`.
GaussianMoments empirical_moments(const Matrix& values);
GaussianMoments empirical_moments(const SampleBatch& batch);

/// Draws `n_samples` replicates from N(mean, covariance) with the usual stream layout.
Matrix sample_gaussian(const GaussianMoments& target, std::uint64_t seed, int n_samples);

/// W2 between the empirical moments of two independent batches of the given size
/// drawn from `target`: the distance an exact sampler reaches at that replicate count.
double monte_carlo_floor(const GaussianMoments& target, int n_samples, std::uint64_t seed);

}  // namespace sgsample
