#include "sgsample/linalg.hpp"

#include "sgsample/error.hpp"

#include <cmath>
#include <string>

namespace sgsample {

namespace {

// First non-positive pivot of an unblocked Cholesky, or -1.
Eigen::Index failing_pivot(const Matrix& m) {
  const Eigen::Index n = m.rows();
  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double s = m(j, j) - l.row(j).head(j).squaredNorm();
    if (!(s > 0.0) || !std::isfinite(s)) return j;
    l(j, j) = std::sqrt(s);
    for (Eigen::Index i = j + 1; i < n; ++i)
      l(i, j) = (m(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
  }
  return -1;
}

}  // namespace

void LowerTriangularFactor::solve_in_place(Eigen::Ref<Vector> b) const {
  lower.triangularView<Eigen::Lower>().solveInPlace(b);
  lower.transpose().triangularView<Eigen::Upper>().solveInPlace(b);
}

Vector LowerTriangularFactor::solve(const Vector& b) const {
  Vector x = b;
  solve_in_place(x);
  return x;
}

LowerTriangularFactor cholesky(const Matrix& m, const JitterPolicy& policy) {
  if (m.rows() != m.cols()) throw InputShapeError("cholesky: matrix must be square");
  const Eigen::Index n = m.rows();
  if (n == 0) return {Matrix(0, 0), 0.0};
  const double mean_diag = m.diagonal().mean();

  std::vector<double> schedule{0.0};
  if (policy.initial_relative > 0.0 && mean_diag > 0.0 && std::isfinite(mean_diag)) {
    for (double rel = policy.initial_relative; rel <= policy.max_relative * (1.0 + 1e-12);
         rel *= policy.growth)
      schedule.push_back(rel * mean_diag);
  }

  Matrix work;
  for (double lambda : schedule) {
    work = m;
    work.diagonal().array() += lambda;
    Eigen::LLT<Matrix, Eigen::Lower> llt(work);
    if (llt.info() == Eigen::Success) {
      Matrix l = llt.matrixL();
      if (l.allFinite()) return {std::move(l), lambda};
    }
  }
  const Eigen::Index pivot = failing_pivot(work);
  throw NotPositiveDefiniteError("cholesky: matrix of size " + std::to_string(n) +
                                     " is not positive definite after jitter " +
                                     std::to_string(schedule.back()) + " (pivot " +
                                     std::to_string(pivot) + ")",
                                 pivot);
}

Matrix inverse_covariance_factor(const Matrix& m, const JitterPolicy& policy) {
  const LowerTriangularFactor f = cholesky(m, policy);
  const Eigen::Index n = f.size();
  Matrix b = Matrix::Identity(n, n);
  f.lower.transpose().triangularView<Eigen::Upper>().solveInPlace(b);
  return b;
}

Eigen::Index KroneckerFactors::rows() const {
  Eigen::Index r = 1;
  for (const auto& f : factors) r *= f.rows();
  return r;
}

Eigen::Index KroneckerFactors::cols() const {
  Eigen::Index c = 1;
  for (const auto& f : factors) c *= f.cols();
  return c;
}

Matrix KroneckerFactors::dense() const {
  Matrix out = Matrix::Ones(1, 1);
  for (const auto& f : factors) {
    Matrix next(out.rows() * f.rows(), out.cols() * f.cols());
    for (Eigen::Index i = 0; i < out.rows(); ++i)
      for (Eigen::Index j = 0; j < out.cols(); ++j)
        next.block(i * f.rows(), j * f.cols(), f.rows(), f.cols()) = out(i, j) * f;
    out = std::move(next);
  }
  return out;
}

Vector kron_matvec(std::span<const Matrix* const> factors, const Vector& v) {
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  std::vector<Eigen::Index> dims;
  Eigen::Index expected = 1;
  for (const Matrix* f : factors) {
    dims.push_back(f->cols());
    expected *= f->cols();
  }
  if (v.size() != expected)
    throw InputShapeError("kron_matvec: vector length " + std::to_string(v.size()) +
                          " does not match " + std::to_string(expected));

  Vector cur = v;
  Vector next;
  const auto d = dims.size();
  for (std::size_t j = 0; j < d; ++j) {
    const Matrix& a = *factors[j];
    Eigen::Index left = 1, right = 1;
    for (std::size_t i = 0; i < j; ++i) left *= dims[i];
    for (std::size_t i = j + 1; i < d; ++i) right *= dims[i];
    next.resize(left * a.rows() * right);
    for (Eigen::Index l = 0; l < left; ++l) {
      Eigen::Map<const RowMajor> in(cur.data() + l * a.cols() * right, a.cols(), right);
      Eigen::Map<RowMajor> out(next.data() + l * a.rows() * right, a.rows(), right);
      out.noalias() = a * in;
    }
    dims[j] = a.rows();
    cur.swap(next);
  }
  return cur;
}

Vector kron_matvec(const KroneckerFactors& factors, const Vector& v) {
  std::vector<const Matrix*> ptrs;
  ptrs.reserve(factors.factors.size());
  for (const auto& f : factors.factors) ptrs.push_back(&f);
  return kron_matvec(std::span<const Matrix* const>(ptrs), v);
}

double asymmetry(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

Matrix spd_sqrt(const Matrix& m, int* clipped, double symmetry_tol) {
  if (m.rows() != m.cols()) throw InputShapeError("spd_sqrt: matrix must be square");
  if (asymmetry(m) > symmetry_tol) throw InputShapeError("spd_sqrt: matrix is not symmetric");
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  Vector lambda = eig.eigenvalues();
  int count = 0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) < 0.0) {
      lambda(i) = 0.0;
      ++count;
    }
  }
  if (clipped) *clipped = count;
  const Matrix& q = eig.eigenvectors();
  return q * lambda.cwiseSqrt().asDiagonal() * q.transpose();
}

}  // namespace sgsample
