#pragma once

#include "sgsample/kernels.hpp"
#include "sgsample/linalg.hpp"
#include "sgsample/sparse_grid.hpp"

#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace sgsample {

/// Symmetric positive definite operator applied matrix-free.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual Eigen::Index size() const = 0;
  virtual Vector apply(const Vector& v) const = 0;
};

/// Wraps an explicit matrix.
class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(Matrix m);
  Eigen::Index size() const override { return m_.rows(); }
  Vector apply(const Vector& v) const override;
  const Matrix& matrix() const { return m_; }

 private:
  Matrix m_;
};

/// How K_UU is applied inside SorOperator.
enum class KuuStorage {
  kAuto,      // dense up to kDenseKuuLimit points, factored above
  kDense,     // assembled n_sg x n_sg matrix
  kFactored,  // separable apply grouped by first-coordinate fibres; O(n_sg (q + s)) memory-free
};

inline constexpr Eigen::Index kDenseKuuLimit = 4096;

/// Sigma_U = K_UU + sigma_eps^{-2} K_UX K_XU over a sparse grid.
class SorOperator final : public LinearOperator {
 public:
  SorOperator(ProductKernel kernel, std::shared_ptr<const SparseGrid> grid, const PointSet& x,
              double noise_variance, KuuStorage storage = KuuStorage::kAuto);

  Eigen::Index size() const override { return grid_->size(); }
  Vector apply(const Vector& v) const override;

  /// K_UU v only.
  Vector apply_kuu(const Vector& v) const;

  const ProductKernel& kernel() const { return kernel_; }
  const SparseGrid& grid() const { return *grid_; }
  std::shared_ptr<const SparseGrid> grid_ptr() const { return grid_; }
  const Matrix& kux() const { return kux_; }
  double noise_precision() const { return noise_precision_; }
  bool dense_kuu() const { return kuu_.size() > 0; }

  Vector diagonal() const;
  /// S Sigma_U S^T for the selected grid positions.
  Matrix principal_submatrix(const std::vector<Eigen::Index>& positions) const;
  /// Full Sigma_U; intended for small grids and validation.
  Matrix dense() const;

 private:
  void build_factored();

  ProductKernel kernel_;
  std::shared_ptr<const SparseGrid> grid_;
  Matrix kux_;
  double noise_precision_;
  Matrix kuu_;

  // Factored K_UU: point k sits in fibre fibre_[k] (its first coordinate) with
  // suffix suffix_[k] (its remaining coordinates).
  Matrix k_first_;
  Matrix k_suffix_;
  std::vector<Eigen::Index> fibre_;
  std::vector<Eigen::Index> suffix_;
};

enum class PreconditionerKind { kIdentity, kJacobi, kAdditiveSchwarz, kTwoLevelAdditiveSchwarz };

std::string_view to_string(PreconditionerKind kind);
/// Accepts identity/none, jacobi, as/additive-schwarz, tas/two-level-additive-schwarz.
PreconditionerKind parse_preconditioner(std::string_view name);

/// Coarse level used by the two-level preconditioner: max(ceil(eta / 2), d).
int coarse_level(int eta, int d);

class Preconditioner {
 public:
  struct Block {
    std::vector<Eigen::Index> positions;
    LowerTriangularFactor factor;
  };
  // Blocks are immutable once factored and may be shared between preconditioners.
  using BlockPtr = std::shared_ptr<const Block>;

  /// Identity of the given size.
  static Preconditioner identity(Eigen::Index n);
  /// Elementwise division by a positive diagonal.
  static Preconditioner jacobi(Vector diagonal);
  /// Sum of exact local inverses over the given index blocks of `op`.
  static Preconditioner from_blocks(PreconditionerKind kind, Eigen::Index n,
                                    std::vector<BlockPtr> blocks);

  PreconditionerKind kind() const { return kind_; }
  Eigen::Index size() const { return n_; }
  const std::vector<BlockPtr>& blocks() const { return blocks_; }

  Vector apply_inverse(const Vector& r) const;

 private:
  PreconditionerKind kind_ = PreconditionerKind::kIdentity;
  Eigen::Index n_ = 0;
  Vector diagonal_;
  std::vector<BlockPtr> blocks_;
};

/// Builds the requested preconditioner for Sigma_U. Subdomains of the additive
/// Schwarz variants are U_t for |t| = eta; the two-level variant appends the
/// coarse block of points on U(coarse_level(eta, d), d).
Preconditioner build_preconditioner(PreconditionerKind kind, const SorOperator& op,
                                    const JitterPolicy& jitter = {});

/// Factored blocks S_t Sigma_U S_t^T for every t with |t| = eta.
std::vector<Preconditioner::BlockPtr> subdomain_blocks(const SorOperator& op, const JitterPolicy& jitter = {});

/// Factored coarse block over the grid points lying on U(coarse_level(eta, d), d).
Preconditioner::BlockPtr coarse_block(const SorOperator& op, const JitterPolicy& jitter = {});

struct PcgOptions {
  double tol = 1e-8;
  int max_iter = 0;  // 0: 10 * n
};

struct PcgResult {
  Vector solution;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  // Residual norm before the first iteration and after every iteration.
  std::vector<double> trace;
};

/// Preconditioned conjugate gradient. Stops when the recursively updated,
/// unpreconditioned residual r_i = r_{i-1} - alpha A p satisfies ||r_i|| < tol and
/// returns the iterate with the smallest such residual. On ill-conditioned systems
/// this can sit well below the true residual ||v - A x||.
/// Throws DivergenceError when the iteration produces non-finite values.
PcgResult pcg(const LinearOperator& op, const Preconditioner& precond, const Vector& v,
              const PcgOptions& options, const Vector* x0 = nullptr);

/// CSV rows "iteration,residual_norm" including a header line.
void write_residual_trace(std::ostream& out, const std::vector<double>& trace);

}  // namespace sgsample
