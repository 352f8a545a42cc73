#include "sgsample/metrics.hpp"

#include "sgsample/error.hpp"
#include "sgsample/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace sgsample {

namespace {

constexpr double kSymmetryTol = 1e-8;
constexpr double kClipRelative = 1e-10;

struct Spectrum {
  Vector values;
  Matrix vectors;
};

// Eigen-decomposition with negative eigenvalues set to zero; counts the clips
// that exceed round-off relative to the average eigenvalue.
Spectrum clipped_spectrum(const Matrix& m, int& clipped) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
  if (es.info() != Eigen::Success) throw InvalidArgumentError("w2: eigen-decomposition failed");
  Vector lambda = es.eigenvalues();
  const double scale = std::abs(m.trace()) / static_cast<double>(std::max<Eigen::Index>(1, m.rows()));
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) < -kClipRelative * scale) ++clipped;
    if (lambda(i) < 0.0) lambda(i) = 0.0;
  }
  return {lambda, es.eigenvectors()};
}

void check_moments(const GaussianMoments& g) {
  if (g.covariance.rows() != g.mean.size() || g.covariance.cols() != g.mean.size())
    throw InputShapeError("w2: covariance shape does not match the mean");
  if (asymmetry(g.covariance) > kSymmetryTol) throw InputShapeError("w2: covariance is not symmetric");
}

}  // namespace

W2Result w2_gaussian(const GaussianMoments& a, const GaussianMoments& b) {
  check_moments(a);
  check_moments(b);
  if (a.dimension() != b.dimension()) throw InputShapeError("w2: dimension mismatch");

  W2Result out;
  out.mean_term = (a.mean - b.mean).squaredNorm();
  const Spectrum sa = clipped_spectrum(a.covariance, out.clipped_eigs);
  const Matrix root_a = sa.vectors * sa.values.cwiseSqrt().asDiagonal() * sa.vectors.transpose();
  const Matrix inner = root_a * b.covariance * root_a;
  const Spectrum si = clipped_spectrum(inner, out.clipped_eigs);
  out.trace_term = a.covariance.trace() + b.covariance.trace() - 2.0 * si.values.cwiseSqrt().sum();
  out.distance = std::sqrt(std::max(0.0, out.mean_term + out.trace_term));
  return out;
}

GaussianMoments empirical_moments(const Matrix& values) {
  const Eigen::Index n = values.rows();
  if (n < 2) throw InvalidArgumentError("empirical moments need at least two replicates");
  GaussianMoments out;
  out.mean = values.colwise().mean().transpose();
  const Matrix centered = values.rowwise() - out.mean.transpose();
  out.covariance = (centered.transpose() * centered) / static_cast<double>(n - 1);
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
  return out;
}

GaussianMoments empirical_moments(const SampleBatch& batch) { return empirical_moments(batch.values); }

namespace {

Matrix sample_gaussian_streams(const GaussianMoments& target, std::uint64_t seed, int n_samples,
                               std::uint64_t first_replicate) {
  const Matrix root = spd_sqrt(0.5 * (target.covariance + target.covariance.transpose()));
  Matrix out(n_samples, target.dimension());
  for (int k = 0; k < n_samples; ++k) {
    Rng rng(seed, replicate_stream(first_replicate + static_cast<std::uint64_t>(k)));
    out.row(k) = (root * rng.normal_vector(target.dimension()) + target.mean).transpose();
  }
  return out;
}

}  // namespace

Matrix sample_gaussian(const GaussianMoments& target, std::uint64_t seed, int n_samples) {
  if (n_samples < 0) throw InvalidArgumentError("n_samples must be non-negative");
  return sample_gaussian_streams(target, seed, n_samples, 0);
}

double monte_carlo_floor(const GaussianMoments& target, int n_samples, std::uint64_t seed) {
  if (n_samples < 2) throw InvalidArgumentError("Monte-Carlo floor needs at least two replicates");
  const auto n = static_cast<std::uint64_t>(n_samples);
  const GaussianMoments first = empirical_moments(sample_gaussian_streams(target, seed, n_samples, 0));
  const GaussianMoments second = empirical_moments(sample_gaussian_streams(target, seed, n_samples, n));
  return w2_gaussian(first, second).distance;
}

}  // namespace sgsample
