#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>

namespace sgsample {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Point sets are stored one point per row (n x d).
using PointSet = Eigen::MatrixXd;

/// Prior mean function evaluated at a single point.
using MeanFunction = std::function<double(std::span<const double>)>;

/// Mean vector and covariance matrix of a Gaussian.
struct GaussianMoments {
  Vector mean;
  Matrix covariance;

  Eigen::Index dimension() const { return mean.size(); }
};

/// Evaluates `mean` at every row of `points`; an empty function means zero mean.
Vector evaluate_mean(const MeanFunction& mean, const PointSet& points);

}  // namespace sgsample
