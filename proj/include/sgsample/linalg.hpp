#pragma once

#include "sgsample/types.hpp"

#include <vector>

namespace sgsample {

/// Diagonal jitter schedule for Cholesky: 0 first, then
/// initial_relative * mean(diag), multiplied by `growth` until max_relative * mean(diag).
struct JitterPolicy {
  double initial_relative = 1e-10;
  double max_relative = 1e-6;
  double growth = 10.0;

  static JitterPolicy none() { return JitterPolicy{0.0, 0.0, 10.0}; }
};

/// L with L L^T = M + jitter * I.
struct LowerTriangularFactor {
  Matrix lower;
  double jitter = 0.0;

  Eigen::Index size() const { return lower.rows(); }
  /// Solves (L L^T) x = b in place.
  void solve_in_place(Eigen::Ref<Vector> b) const;
  Vector solve(const Vector& b) const;
};

/// Throws NotPositiveDefiniteError (with the failing pivot) when the largest jitter fails,
/// InputShapeError for non-square input.
LowerTriangularFactor cholesky(const Matrix& m, const JitterPolicy& policy = {});

/// Returns B = L^{-T} (upper triangular) with B B^T = M^{-1}, via triangular solves.
Matrix inverse_covariance_factor(const Matrix& m, const JitterPolicy& policy = {});

/// Dense factors A_1, ..., A_d representing A_1 (x) ... (x) A_d. Factors may be
/// rectangular; the Kronecker index runs with the first factor slowest.
struct KroneckerFactors {
  std::vector<Matrix> factors;

  Eigen::Index rows() const;
  Eigen::Index cols() const;
  Matrix dense() const;
};

/// (A_1 (x) ... (x) A_d) v without materializing the product.
Vector kron_matvec(const KroneckerFactors& factors, const Vector& v);

/// Same, reading factors by pointer so callers can reuse cached blocks.
Vector kron_matvec(std::span<const Matrix* const> factors, const Vector& v);

/// Principal square root of a symmetric PSD matrix; negative eigenvalues are clipped
/// to zero. `clipped`, when given, receives the number of clipped eigenvalues.
/// Throws InputShapeError when M is not square or is asymmetric beyond `symmetry_tol`
/// (relative to max |M_ij|).
Matrix spd_sqrt(const Matrix& m, int* clipped = nullptr, double symmetry_tol = 1e-8);

/// max |M - M^T| / max(1, max |M|).
double asymmetry(const Matrix& m);

}  // namespace sgsample
