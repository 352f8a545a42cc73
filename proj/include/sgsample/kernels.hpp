#pragma once

#include "sgsample/types.hpp"

#include <vector>

namespace sgsample {

/// One-dimensional Matern covariance parameters.
struct MaternParams {
  double variance = 1.0;     // sigma^2
  double lengthscale = 1.0;  // omega
  double smoothness = 1.5;   // nu

  /// Throws InvalidArgumentError unless all three fields are positive and finite.
  void validate() const;
};

/// Matern covariance between two scalars.
///
/// Closed forms are used for nu in {1/2, 3/2, 5/2}; other smoothness values go
/// through the modified Bessel function of the second kind. Returns the variance
/// exactly at zero distance.
double matern_1d(const MaternParams& params, double x, double y);

/// Matern covariance at distance r >= 0 using the Bessel representation for every nu.
double matern_bessel(const MaternParams& params, double r);

/// Separable kernel sigma^2 * prod_j K0_j(x_j, y_j) with unit-variance base correlations.
class ProductKernel {
 public:
  ProductKernel() = default;

  /// Same base correlation in every dimension. `base.variance` is ignored.
  ProductKernel(int dimension, const MaternParams& base, double variance);

  /// Per-dimension base correlations; each entry must carry variance 1.
  ProductKernel(std::vector<MaternParams> per_dim, double variance);

  int dimension() const { return static_cast<int>(per_dim_.size()); }
  double variance() const { return variance_; }
  const std::vector<MaternParams>& per_dim() const { return per_dim_; }
  const MaternParams& base(int j) const { return per_dim_.at(static_cast<std::size_t>(j)); }

  double operator()(std::span<const double> x, std::span<const double> y) const;

 private:
  std::vector<MaternParams> per_dim_;
  double variance_ = 1.0;
};

/// Covariance between two d-vectors. Throws InputShapeError on length mismatch.
double product_kernel(const ProductKernel& kernel, std::span<const double> x,
                      std::span<const double> y);

/// Entry (i, j) is product_kernel(A.row(i), B.row(j)).
Matrix kernel_matrix(const ProductKernel& kernel, const PointSet& a, const PointSet& b);

/// Unit-variance correlation matrix of one dimension's base kernel between two
/// coordinate lists.
Matrix base_kernel_matrix(const MaternParams& base, const Vector& a, const Vector& b);

}  // namespace sgsample
