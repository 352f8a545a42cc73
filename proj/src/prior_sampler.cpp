#include "sgsample/prior_sampler.hpp"

#include "parallel.hpp"
#include "sgsample/error.hpp"
#include "sgsample/linalg.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

namespace sgsample {

namespace {

void check_points(const ProductKernel& kernel, const PointSet& z) {
  if (z.cols() != kernel.dimension())
    throw InputShapeError("evaluation points must have one column per kernel dimension");
}

// Level of the dyadic point i / 2^T in the nested hierarchy (1 for 1/2).
int point_level(std::int64_t i, int T) {
  return T - std::countr_zero(static_cast<std::uint64_t>(i));
}

}  // namespace

SampleBatch sample_prior_cholesky(const ProductKernel& kernel, const PointSet& z,
                                  const MeanFunction& mean, std::uint64_t seed, int n_samples,
                                  int threads) {
  check_points(kernel, z);
  if (n_samples < 0) throw InvalidArgumentError("n_samples must be non-negative");
  const LowerTriangularFactor chol = cholesky(kernel_matrix(kernel, z, z));
  const Vector mu = evaluate_mean(mean, z);

  SampleBatch batch{z, Matrix(n_samples, z.rows()), seed, "chol", {}, 0};
  detail::parallel_for(n_samples, threads, [&](int k) {
    Rng rng(seed, replicate_stream(static_cast<std::uint64_t>(k)));
    const Vector g = rng.normal_vector(z.rows());
    batch.values.row(k) = (chol.lower.triangularView<Eigen::Lower>() * g + mu).transpose();
  });
  return batch;
}

InsgPriorSampler::InsgPriorSampler(ProductKernel kernel, std::shared_ptr<const SparseGrid> grid,
                                   InsgScheme scheme)
    : kernel_(std::move(kernel)), grid_(std::move(grid)), scheme_(scheme) {
  if (!grid_) throw InvalidArgumentError("InSG sampler needs a sparse grid");
  if (grid_->dimension() != kernel_.dimension())
    throw InputShapeError("grid and kernel dimensions differ");
  if (scheme_ == InsgScheme::kHierarchical)
    build_hierarchical();
  else
    build_combination();
}

void InsgPriorSampler::build_hierarchical() {
  const SparseGrid& grid = *grid_;
  const int d = grid.dimension();
  const int eta = grid.level();
  const int T = grid.finest_level();
  const std::int64_t q = (std::int64_t{1} << T) - 1;

  // Per dimension: finest 1-d points sorted by (level, position), and the factor
  // B_j = L_j^{-T} of their correlation matrix. Because L_j of a leading block is
  // the leading block of L_j, the columns of B_j belonging to level l (rows of
  // levels <= l) factor the increment K_l^{-1} - E^T K_{l-1}^{-1} E.
  std::vector<std::vector<std::int64_t>> order(static_cast<std::size_t>(d));
  std::vector<Matrix> factor(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    auto& ord = order[static_cast<std::size_t>(j)];
    ord.resize(static_cast<std::size_t>(q));
    for (std::int64_t i = 1; i <= q; ++i) ord[static_cast<std::size_t>(i - 1)] = i;
    std::stable_sort(ord.begin(), ord.end(), [T](std::int64_t a, std::int64_t b) {
      return point_level(a, T) < point_level(b, T);
    });
    Vector x(q);
    for (std::int64_t r = 0; r < q; ++r)
      x(r) = grid.to_domain(std::ldexp(static_cast<double>(ord[static_cast<std::size_t>(r)]), -T), j);
    factor[static_cast<std::size_t>(j)] = inverse_covariance_factor(base_kernel_matrix(kernel_.base(j), x, x));
  }

  // blocks_[j * T + (l - 1)] = columns of level l, rows of levels <= l.
  blocks_.clear();
  for (int j = 0; j < d; ++j) {
    for (int l = 1; l <= T; ++l) {
      const Eigen::Index rows = (Eigen::Index{1} << l) - 1;
      const Eigen::Index first = (Eigen::Index{1} << (l - 1)) - 1;
      const Eigen::Index cols = Eigen::Index{1} << (l - 1);
      blocks_.push_back(std::make_unique<Matrix>(factor[static_cast<std::size_t>(j)].block(0, first, rows, cols)));
    }
  }

  terms_.clear();
  std::vector<std::int64_t> fine(static_cast<std::size_t>(d));
  for (const MultiIndex& l : hierarchical_index_set(eta, d)) {
    Term term;
    term.noise_size = 1;
    std::vector<Eigen::Index> extent(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
      const int lj = l.levels[static_cast<std::size_t>(j)];
      const Matrix* block = blocks_[static_cast<std::size_t>(j * T + lj - 1)].get();
      term.factors.push_back(block);
      term.noise_size *= block->cols();
      extent[static_cast<std::size_t>(j)] = block->rows();
    }
    // Rows of the Kronecker product enumerate U_l in hierarchical order per dimension.
    std::vector<Eigen::Index> r(static_cast<std::size_t>(d), 0);
    while (true) {
      for (int j = 0; j < d; ++j)
        fine[static_cast<std::size_t>(j)] = order[static_cast<std::size_t>(j)][static_cast<std::size_t>(r[static_cast<std::size_t>(j)])];
      const auto pos = grid.find(fine);
      if (!pos) throw LookupError("hierarchical increment leaves the sparse grid");
      term.positions.push_back(*pos);
      int j = d - 1;
      for (; j >= 0; --j) {
        auto& c = r[static_cast<std::size_t>(j)];
        if (++c < extent[static_cast<std::size_t>(j)]) break;
        c = 0;
      }
      if (j < 0) break;
    }
    terms_.push_back(std::move(term));
  }
}

void InsgPriorSampler::build_combination() {
  const SparseGrid& grid = *grid_;
  const int d = grid.dimension();
  const int eta = grid.level();
  const int T = grid.finest_level();

  // chol(K(U_{j,t}, U_{j,t})^{-1}) realized as L^{-T}, one per (dimension, level).
  blocks_.clear();
  for (int j = 0; j < d; ++j) {
    for (int t = 1; t <= T; ++t) {
      const auto pts = level_points(t);
      Vector x(static_cast<Eigen::Index>(pts.size()));
      for (std::size_t i = 0; i < pts.size(); ++i)
        x(static_cast<Eigen::Index>(i)) = grid.to_domain(pts[i].value(), j);
      blocks_.push_back(
          std::make_unique<Matrix>(inverse_covariance_factor(base_kernel_matrix(kernel_.base(j), x, x))));
    }
  }

  terms_.clear();
  for (const MultiIndex& t : grid.smolyak_indices()) {
    Term term;
    term.coefficient = static_cast<double>(smolyak_coefficient(t, eta, d));
    term.noise_size = 1;
    for (int j = 0; j < d; ++j) {
      const Matrix* block = blocks_[static_cast<std::size_t>(j * T + t.levels[static_cast<std::size_t>(j)] - 1)].get();
      term.factors.push_back(block);
      term.noise_size *= block->cols();
    }
    term.positions = grid.scatter_indices(t);
    terms_.push_back(std::move(term));
  }
}

Vector InsgPriorSampler::draw_inducing(Rng& rng) const {
  Vector w = Vector::Zero(grid_->size());
  Vector g;
  for (const Term& term : terms_) {
    g.resize(term.noise_size);
    rng.fill_normal(g);
    const Vector y = kron_matvec(std::span<const Matrix* const>(term.factors), g);
    for (std::size_t i = 0; i < term.positions.size(); ++i)
      w(term.positions[i]) += term.coefficient * y(static_cast<Eigen::Index>(i));
  }
  // The grid factors are unit-variance correlations; K_UU carries sigma^2.
  return w / std::sqrt(kernel_.variance());
}

Matrix InsgPriorSampler::inducing_covariance() const {
  const Eigen::Index n = grid_->size();
  Matrix cov = Matrix::Zero(n, n);
  for (const Term& term : terms_) {
    KroneckerFactors kf;
    for (const Matrix* f : term.factors) kf.factors.push_back(*f);
    const Matrix f = kf.dense();
    const Matrix local = (term.coefficient * term.coefficient) * (f * f.transpose());
    for (std::size_t a = 0; a < term.positions.size(); ++a)
      for (std::size_t b = 0; b < term.positions.size(); ++b)
        cov(term.positions[a], term.positions[b]) +=
            local(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  }
  return cov / kernel_.variance();
}

SampleBatch InsgPriorSampler::sample(const PointSet& z, const MeanFunction& mean,
                                     std::uint64_t seed, int n_samples, int threads) const {
  check_points(kernel_, z);
  if (n_samples < 0) throw InvalidArgumentError("n_samples must be non-negative");
  const Matrix kzu = kernel_matrix(kernel_, z, grid_->points());
  const Vector mu = evaluate_mean(mean, z);
  SampleBatch batch{z, Matrix(n_samples, z.rows()), seed, "insg", {}, 0};
  detail::parallel_for(n_samples, threads, [&](int k) {
    Rng rng(seed, replicate_stream(static_cast<std::uint64_t>(k)));
    const Vector w = draw_inducing(rng);
    batch.values.row(k) = (kzu * w + mu).transpose();
  });
  return batch;
}

SampleBatch sample_prior_insg(const ProductKernel& kernel, const PointSet& z,
                              std::shared_ptr<const SparseGrid> grid, const MeanFunction& mean,
                              std::uint64_t seed, int n_samples, int threads) {
  return InsgPriorSampler(kernel, std::move(grid)).sample(z, mean, seed, n_samples, threads);
}

RffFeatures RffFeatures::draw(const ProductKernel& kernel, int n_features, Rng& rng) {
  if (n_features < 1) throw InvalidArgumentError("RFF needs at least one feature");
  const int d = kernel.dimension();
  RffFeatures f;
  f.frequencies.resize(n_features, d);
  f.phases.resize(n_features);
  for (int k = 0; k < n_features; ++k) {
    for (int j = 0; j < d; ++j) {
      const MaternParams& p = kernel.base(j);
      f.frequencies(k, j) = rng.student_t(2.0 * p.smoothness) / p.lengthscale;
    }
    f.phases(k) = 2.0 * std::numbers::pi * rng.uniform();
  }
  return f;
}

Matrix RffFeatures::feature_matrix(const PointSet& x) const {
  const double scale = std::sqrt(2.0 / static_cast<double>(count()));
  Matrix arg = x * frequencies.transpose();
  arg.rowwise() += phases.transpose();
  return scale * arg.array().cos().matrix();
}

SampleBatch sample_prior_rff(const ProductKernel& kernel, const PointSet& z,
                             const MeanFunction& mean, std::uint64_t seed, int n_features,
                             int n_samples, int threads) {
  check_points(kernel, z);
  if (n_features < 1) throw InvalidArgumentError("RFF needs at least one feature");
  if (n_samples < 0) throw InvalidArgumentError("n_samples must be non-negative");
  const Vector mu = evaluate_mean(mean, z);
  const double sigma = std::sqrt(kernel.variance());
  SampleBatch batch{z, Matrix(n_samples, z.rows()), seed, "rff", {}, 0};
  detail::parallel_for(n_samples, threads, [&](int k) {
    Rng rng(seed, replicate_stream(static_cast<std::uint64_t>(k)));
    const RffFeatures features = RffFeatures::draw(kernel, n_features, rng);
    const Vector f = sigma * features.feature_matrix(z).rowwise().sum();
    batch.values.row(k) = (f + mu).transpose();
  });
  return batch;
}

}  // namespace sgsample
