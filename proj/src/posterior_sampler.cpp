#include "sgsample/posterior_sampler.hpp"

#include "parallel.hpp"
#include "sgsample/error.hpp"

#include <algorithm>
#include <cmath>

namespace sgsample {

namespace {

void check_test_points(const ProductKernel& kernel, const PointSet& xstar) {
  if (xstar.rows() < 1) throw InputShapeError("need at least one test point");
  if (xstar.cols() != kernel.dimension()) throw InputShapeError("test points have the wrong dimension");
}

// Cholesky of K_XX + sigma_eps^2 I.
LowerTriangularFactor data_factor(const ProductKernel& kernel, const Observations& obs) {
  Matrix kxx = kernel_matrix(kernel, obs.x, obs.x);
  kxx.diagonal().array() += obs.noise_variance;
  return cholesky(kxx);
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

void Observations::validate(int dimension) const {
  if (x.rows() < 1) throw InputShapeError("observations: need at least one point");
  if (x.cols() != dimension) throw InputShapeError("observations: wrong point dimension");
  if (y.size() != x.rows()) throw InputShapeError("observations: y length differs from point count");
  if (!(noise_variance > 0.0) || !std::isfinite(noise_variance))
    throw InvalidArgumentError("observations: noise variance must be positive");
  if (!x.allFinite() || !y.allFinite()) throw InvalidArgumentError("observations: non-finite values");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) order[static_cast<std::size_t>(i)] = i;
  auto row_less = [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      if (x(a, j) != x(b, j)) return x(a, j) < x(b, j);
    return false;
  };
  std::sort(order.begin(), order.end(), row_less);
  for (std::size_t i = 1; i < order.size(); ++i)
    if (!row_less(order[i - 1], order[i])) throw InvalidArgumentError("observations: duplicate points");
}

GaussianMoments exact_posterior_moments(const ProductKernel& kernel, const Observations& obs,
                                        const PointSet& xstar) {
  obs.validate(kernel.dimension());
  check_test_points(kernel, xstar);
  const LowerTriangularFactor chol = data_factor(kernel, obs);
  const Matrix kxs = kernel_matrix(kernel, obs.x, xstar);
  const Vector resid = obs.y - evaluate_mean(obs.mean, obs.x);

  Matrix a = kxs;  // L^{-1} K_{X,*}
  chol.lower.triangularView<Eigen::Lower>().solveInPlace(a);
  Vector b = resid;
  chol.lower.triangularView<Eigen::Lower>().solveInPlace(b);

  GaussianMoments out;
  out.mean = evaluate_mean(obs.mean, xstar) + a.transpose() * b;
  out.covariance = symmetrized(kernel_matrix(kernel, xstar, xstar) - a.transpose() * a);
  return out;
}

SampleBatch sample_posterior_cholesky(const ProductKernel& kernel, const Observations& obs,
                                      const PointSet& xstar, std::uint64_t seed, int n_samples,
                                      int threads) {
  if (n_samples < 0) throw InvalidArgumentError("n_samples must be non-negative");
  const GaussianMoments post = exact_posterior_moments(kernel, obs, xstar);
  const LowerTriangularFactor chol = cholesky(post.covariance);
  SampleBatch batch{xstar, Matrix(n_samples, xstar.rows()), seed, "chol", {}, 0};
  detail::parallel_for(n_samples, threads, [&](int k) {
    Rng rng(seed, replicate_stream(static_cast<std::uint64_t>(k)));
    const Vector g = rng.normal_vector(xstar.rows());
    batch.values.row(k) = (chol.lower.triangularView<Eigen::Lower>() * g + post.mean).transpose();
  });
  return batch;
}

ExactMatheronSampler::ExactMatheronSampler(const ProductKernel& kernel, const Observations& obs,
                                           const PointSet& xstar)
    : obs_(obs), m_(xstar.rows()) {
  obs.validate(kernel.dimension());
  check_test_points(kernel, xstar);
  const Eigen::Index n = obs.size();
  PointSet joint(n + m_, kernel.dimension());
  joint << obs.x, xstar;
  joint_ = cholesky(kernel_matrix(kernel, joint, joint));
  data_ = data_factor(kernel, obs);
  k_star_x_ = kernel_matrix(kernel, xstar, obs.x);
  mu_joint_ = evaluate_mean(obs.mean, joint);
}

std::pair<Vector, Vector> ExactMatheronSampler::draw_prior(Rng& rng) const {
  const Vector g = rng.normal_vector(joint_.size());
  const Vector f = joint_.lower.triangularView<Eigen::Lower>() * g + mu_joint_;
  const Eigen::Index n = obs_.size();
  return {f.head(n), f.tail(m_)};
}

Vector ExactMatheronSampler::update(const Vector& f_x, const Vector& f_star, const Vector& eps) const {
  if (f_x.size() != obs_.size() || eps.size() != obs_.size() || f_star.size() != m_)
    throw InputShapeError("Matheron update: length mismatch");
  const Vector z = data_.solve(obs_.y - f_x - eps);
  return f_star + k_star_x_ * z;
}

SampleBatch ExactMatheronSampler::sample(std::uint64_t seed, int n_samples, int threads) const {
  if (n_samples < 0) throw InvalidArgumentError("n_samples must be non-negative");
  const double noise_sd = std::sqrt(obs_.noise_variance);
  SampleBatch batch{PointSet(), Matrix(n_samples, m_), seed, "matheron-exact", {}, 0};
  detail::parallel_for(n_samples, threads, [&](int k) {
    Rng rng(seed, replicate_stream(static_cast<std::uint64_t>(k)));
    const auto [f_x, f_star] = draw_prior(rng);
    const Vector eps = noise_sd * rng.normal_vector(obs_.size());
    batch.values.row(k) = update(f_x, f_star, eps).transpose();
  });
  return batch;
}

SampleBatch sample_posterior_matheron_exact(const ProductKernel& kernel, const Observations& obs,
                                            const PointSet& xstar, std::uint64_t seed,
                                            int n_samples, int threads) {
  SampleBatch batch = ExactMatheronSampler(kernel, obs, xstar).sample(seed, n_samples, threads);
  batch.points = xstar;
  return batch;
}

GaussianMoments matheron_pushforward_moments(const ProductKernel& kernel, const Observations& obs,
                                             const PointSet& xstar) {
  obs.validate(kernel.dimension());
  check_test_points(kernel, xstar);
  // The update is f_* - A f_X - A eps + A y with A = K_{*,X} (K_XX + sigma_eps^2 I)^{-1}.
  const LowerTriangularFactor chol = data_factor(kernel, obs);
  const Matrix kxx = kernel_matrix(kernel, obs.x, obs.x);
  const Matrix kxs = kernel_matrix(kernel, obs.x, xstar);
  const Matrix kss = kernel_matrix(kernel, xstar, xstar);
  Matrix at = kxs;  // A^T
  for (Eigen::Index c = 0; c < at.cols(); ++c) {
    Vector col = at.col(c);
    chol.solve_in_place(col);
    at.col(c) = col;
  }
  const Matrix a = at.transpose();
  const Vector mu_x = evaluate_mean(obs.mean, obs.x);
  const Vector mu_s = evaluate_mean(obs.mean, xstar);

  GaussianMoments out;
  out.mean = mu_s - a * mu_x + a * obs.y;
  const Matrix cross = a * kxs;  // A K_{X,*}
  out.covariance = kss - cross - cross.transpose() + a * kxx * at + obs.noise_variance * (a * at);
  out.covariance = symmetrized(out.covariance);
  return out;
}

GaussianMoments sor_posterior_moments(const ProductKernel& kernel, const Observations& obs,
                                      const PointSet& xstar, const PointSet& inducing) {
  obs.validate(kernel.dimension());
  check_test_points(kernel, xstar);
  if (inducing.cols() != kernel.dimension()) throw InputShapeError("inducing points have the wrong dimension");
  const double precision = 1.0 / obs.noise_variance;
  const Matrix kux = kernel_matrix(kernel, inducing, obs.x);
  const Matrix kus = kernel_matrix(kernel, inducing, xstar);
  Matrix sigma = kernel_matrix(kernel, inducing, inducing);
  sigma.noalias() += precision * (kux * kux.transpose());
  const LowerTriangularFactor chol = cholesky(symmetrized(sigma));

  Matrix a = kus;  // L^{-1} K_{U,*}
  chol.lower.triangularView<Eigen::Lower>().solveInPlace(a);
  Vector b = kux * (obs.y - evaluate_mean(obs.mean, obs.x));
  chol.lower.triangularView<Eigen::Lower>().solveInPlace(b);

  GaussianMoments out;
  out.mean = evaluate_mean(obs.mean, xstar) + precision * (a.transpose() * b);
  out.covariance = symmetrized(a.transpose() * a);
  return out;
}

GaussianMoments sor_posterior_moments(const ProductKernel& kernel, const Observations& obs,
                                      const PointSet& xstar, const SparseGrid& grid) {
  return sor_posterior_moments(kernel, obs, xstar, grid.points());
}

InsgPosteriorSampler::InsgPosteriorSampler(const ProductKernel& kernel, Observations obs,
                                           std::shared_ptr<const SparseGrid> grid,
                                           InsgSolverOptions options)
    : obs_((obs.validate(kernel.dimension()), std::move(obs))),
      options_(options),
      prior_(kernel, grid),
      op_(kernel, grid, obs_.x, obs_.noise_variance, options.storage),
      precond_(build_preconditioner(options.preconditioner, op_)),
      mu_x_(evaluate_mean(obs_.mean, obs_.x)) {}

Matrix InsgPosteriorSampler::cross_covariance(const PointSet& xstar) const {
  check_test_points(prior_.kernel(), xstar);
  return kernel_matrix(prior_.kernel(), xstar, prior_.grid().points());
}

InsgPosteriorSampler::Draw InsgPosteriorSampler::update(const Matrix& kstar_u, const Vector& f_x,
                                                        const Vector& f_star, const Vector& eps) const {
  if (f_x.size() != obs_.size() || eps.size() != obs_.size() || f_star.size() != kstar_u.rows() ||
      kstar_u.cols() != op_.size())
    throw InputShapeError("InSG update: length mismatch");
  const Vector v = op_.kux() * (obs_.y - f_x - eps);
  const PcgResult res = pcg(op_, precond_, v, PcgOptions{options_.tol, options_.max_iter});
  Draw out;
  out.values = f_star + op_.noise_precision() * (kstar_u * res.solution);
  out.iterations = res.iterations;
  out.residual = res.residual;
  out.converged = res.converged;
  return out;
}

InsgPosteriorSampler::Draw InsgPosteriorSampler::draw(const Matrix& kstar_u, const Vector& mu_star,
                                                      Rng& rng) const {
  const Vector w = prior_.draw_inducing(rng);
  const Vector f_x = op_.kux().transpose() * w + mu_x_;
  const Vector f_star = kstar_u * w + mu_star;
  const Vector eps = std::sqrt(obs_.noise_variance) * rng.normal_vector(obs_.size());
  return update(kstar_u, f_x, f_star, eps);
}

SampleBatch InsgPosteriorSampler::sample(const PointSet& xstar, std::uint64_t seed, int n_samples,
                                         int threads) const {
  if (n_samples < 0) throw InvalidArgumentError("n_samples must be non-negative");
  const Matrix ksu = cross_covariance(xstar);
  const Vector mu_s = evaluate_mean(obs_.mean, xstar);
  SampleBatch batch{xstar, Matrix(n_samples, xstar.rows()), seed, "insg",
                    std::vector<int>(static_cast<std::size_t>(n_samples), 0), 0};
  std::vector<char> converged(static_cast<std::size_t>(n_samples), 1);
  detail::parallel_for(n_samples, threads, [&](int k) {
    Rng rng(seed, replicate_stream(static_cast<std::uint64_t>(k)));
    const Draw d = draw(ksu, mu_s, rng);
    batch.values.row(k) = d.values.transpose();
    batch.iterations[static_cast<std::size_t>(k)] = d.iterations;
    converged[static_cast<std::size_t>(k)] = d.converged ? 1 : 0;
  });
  batch.unconverged = static_cast<int>(std::count(converged.begin(), converged.end(), 0));
  return batch;
}

SampleBatch sample_posterior_insg(const ProductKernel& kernel, const Observations& obs,
                                  const PointSet& xstar, std::shared_ptr<const SparseGrid> grid,
                                  std::uint64_t seed, int n_samples, const InsgSolverOptions& options,
                                  int threads) {
  return InsgPosteriorSampler(kernel, obs, std::move(grid), options).sample(xstar, seed, n_samples, threads);
}

SampleBatch sample_posterior_rff(const ProductKernel& kernel, const Observations& obs,
                                 const PointSet& xstar, std::uint64_t seed, int n_features,
                                 int n_samples, int threads) {
  obs.validate(kernel.dimension());
  check_test_points(kernel, xstar);
  if (n_samples < 0) throw InvalidArgumentError("n_samples must be non-negative");
  const LowerTriangularFactor chol = data_factor(kernel, obs);
  const Matrix ksx = kernel_matrix(kernel, xstar, obs.x);
  const Vector mu_x = evaluate_mean(obs.mean, obs.x);
  const Vector mu_s = evaluate_mean(obs.mean, xstar);
  const double sigma = std::sqrt(kernel.variance());
  const double noise_sd = std::sqrt(obs.noise_variance);
  SampleBatch batch{xstar, Matrix(n_samples, xstar.rows()), seed, "rff", {}, 0};
  detail::parallel_for(n_samples, threads, [&](int k) {
    Rng rng(seed, replicate_stream(static_cast<std::uint64_t>(k)));
    const RffFeatures features = RffFeatures::draw(kernel, n_features, rng);
    const Vector f_x = sigma * features.feature_matrix(obs.x).rowwise().sum() + mu_x;
    const Vector f_s = sigma * features.feature_matrix(xstar).rowwise().sum() + mu_s;
    const Vector eps = noise_sd * rng.normal_vector(obs.size());
    batch.values.row(k) = (f_s + ksx * chol.solve(obs.y - f_x - eps)).transpose();
  });
  return batch;
}

}  // namespace sgsample
