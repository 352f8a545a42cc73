#include "sgsample/kernels.hpp"

#include "sgsample/error.hpp"

#include <cmath>
#include <string>

namespace sgsample {

Vector evaluate_mean(const MeanFunction& mean, const PointSet& points) {
  Vector out = Vector::Zero(points.rows());
  if (!mean) return out;
  std::vector<double> row(static_cast<std::size_t>(points.cols()));
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) row[static_cast<std::size_t>(j)] = points(i, j);
    out(i) = mean(row);
  }
  return out;
}

void MaternParams::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(variance)) throw InvalidArgumentError("Matern variance must be positive");
  if (!positive(lengthscale)) throw InvalidArgumentError("Matern lengthscale must be positive");
  if (!positive(smoothness)) throw InvalidArgumentError("Matern smoothness must be positive");
}

double matern_bessel(const MaternParams& params, double r) {
  if (r == 0.0) return params.variance;
  const double nu = params.smoothness;
  const double a = std::sqrt(2.0 * nu) * r / params.lengthscale;
  // K_nu underflows to zero well before the prefactor overflows.
  if (a > 700.0) return 0.0;
  const double log_pref = (1.0 - nu) * std::log(2.0) - std::lgamma(nu) + nu * std::log(a);
  return params.variance * std::exp(log_pref) * std::cyl_bessel_k(nu, a);
}

double matern_1d(const MaternParams& params, double x, double y) {
  const double r = std::abs(x - y);
  if (r == 0.0) return params.variance;
  const double nu = params.smoothness;
  const double a = std::sqrt(2.0 * nu) * r / params.lengthscale;
  if (nu == 0.5) return params.variance * std::exp(-a);
  if (nu == 1.5) return params.variance * (1.0 + a) * std::exp(-a);
  if (nu == 2.5) return params.variance * (1.0 + a + a * a / 3.0) * std::exp(-a);
  return matern_bessel(params, r);
}

ProductKernel::ProductKernel(int dimension, const MaternParams& base, double variance)
    : variance_(variance) {
  if (dimension < 1) throw InvalidArgumentError("kernel dimension must be >= 1");
  MaternParams unit = base;
  unit.variance = 1.0;
  unit.validate();
  per_dim_.assign(static_cast<std::size_t>(dimension), unit);
  if (!(variance > 0.0) || !std::isfinite(variance))
    throw InvalidArgumentError("kernel variance must be positive");
}

ProductKernel::ProductKernel(std::vector<MaternParams> per_dim, double variance)
    : per_dim_(std::move(per_dim)), variance_(variance) {
  if (per_dim_.empty()) throw InvalidArgumentError("kernel dimension must be >= 1");
  for (const auto& p : per_dim_) {
    p.validate();
    if (p.variance != 1.0)
      throw InvalidArgumentError("base correlations of a product kernel must have unit variance");
  }
  if (!(variance > 0.0) || !std::isfinite(variance))
    throw InvalidArgumentError("kernel variance must be positive");
}

double ProductKernel::operator()(std::span<const double> x, std::span<const double> y) const {
  return product_kernel(*this, x, y);
}

double product_kernel(const ProductKernel& kernel, std::span<const double> x,
                      std::span<const double> y) {
  const auto d = static_cast<std::size_t>(kernel.dimension());
  if (x.size() != d || y.size() != d)
    throw InputShapeError("product_kernel: expected points of dimension " + std::to_string(d));
  double value = kernel.variance();
  for (std::size_t j = 0; j < d; ++j) value *= matern_1d(kernel.per_dim()[j], x[j], y[j]);
  return value;
}

Matrix base_kernel_matrix(const MaternParams& base, const Vector& a, const Vector& b) {
  Matrix out(a.size(), b.size());
  for (Eigen::Index c = 0; c < b.size(); ++c)
    for (Eigen::Index r = 0; r < a.size(); ++r) out(r, c) = matern_1d(base, a(r), b(c));
  return out;
}

Matrix kernel_matrix(const ProductKernel& kernel, const PointSet& a, const PointSet& b) {
  const int d = kernel.dimension();
  if (a.cols() != d || b.cols() != d)
    throw InputShapeError("kernel_matrix: point sets must have " + std::to_string(d) + " columns");
  Matrix out = Matrix::Constant(a.rows(), b.rows(), kernel.variance());
  for (int j = 0; j < d; ++j) {
    const MaternParams& base = kernel.base(j);
    for (Eigen::Index c = 0; c < b.rows(); ++c) {
      const double bc = b(c, j);
      for (Eigen::Index r = 0; r < a.rows(); ++r) out(r, c) *= matern_1d(base, a(r, j), bc);
    }
  }
  return out;
}

}  // namespace sgsample
