#include "sgsample/krylov.hpp"

#include "sgsample/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <string>

namespace sgsample {

DenseOperator::DenseOperator(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw InputShapeError("operator matrix must be square");
}

Vector DenseOperator::apply(const Vector& v) const {
  if (v.size() != m_.rows()) throw InputShapeError("operator length mismatch");
  return m_ * v;
}

SorOperator::SorOperator(ProductKernel kernel, std::shared_ptr<const SparseGrid> grid,
                         const PointSet& x, double noise_variance, KuuStorage storage)
    : kernel_(std::move(kernel)), grid_(std::move(grid)) {
  if (!grid_) throw InvalidArgumentError("SoR operator needs a sparse grid");
  if (grid_->dimension() != kernel_.dimension() || x.cols() != kernel_.dimension())
    throw InputShapeError("grid, data and kernel dimensions differ");
  if (!(noise_variance > 0.0) || !std::isfinite(noise_variance))
    throw InvalidArgumentError("noise variance must be positive");
  noise_precision_ = 1.0 / noise_variance;
  kux_ = kernel_matrix(kernel_, grid_->points(), x);
  const bool dense =
      storage == KuuStorage::kDense || (storage == KuuStorage::kAuto && grid_->size() <= kDenseKuuLimit);
  if (dense)
    kuu_ = kernel_matrix(kernel_, grid_->points(), grid_->points());
  else
    build_factored();
}

void SorOperator::build_factored() {
  const SparseGrid& g = *grid_;
  const int d = g.dimension();
  const Eigen::Index n = g.size();
  fibre_.resize(static_cast<std::size_t>(n));
  suffix_.resize(static_cast<std::size_t>(n));

  std::map<std::int64_t, Eigen::Index> first_ids;
  std::map<std::vector<std::int64_t>, Eigen::Index> suffix_ids;
  std::vector<std::int64_t> tail(static_cast<std::size_t>(d - 1));
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto a = first_ids.try_emplace(g.fine_index(k, 0), static_cast<Eigen::Index>(first_ids.size()));
    fibre_[static_cast<std::size_t>(k)] = a.first->second;
    for (int j = 1; j < d; ++j) tail[static_cast<std::size_t>(j - 1)] = g.fine_index(k, j);
    const auto s = suffix_ids.try_emplace(tail, static_cast<Eigen::Index>(suffix_ids.size()));
    suffix_[static_cast<std::size_t>(k)] = s.first->second;
  }

  const double scale = std::ldexp(1.0, -g.finest_level());
  Vector first(static_cast<Eigen::Index>(first_ids.size()));
  for (const auto& [idx, id] : first_ids) first(id) = g.to_domain(static_cast<double>(idx) * scale, 0);
  k_first_ = base_kernel_matrix(kernel_.base(0), first, first);

  const auto s = static_cast<Eigen::Index>(suffix_ids.size());
  k_suffix_ = Matrix::Ones(s, s);
  for (int j = 1; j < d; ++j) {
    Vector coord(s);
    for (const auto& [key, id] : suffix_ids)
      coord(id) = g.to_domain(static_cast<double>(key[static_cast<std::size_t>(j - 1)]) * scale, j);
    k_suffix_.array() *= base_kernel_matrix(kernel_.base(j), coord, coord).array();
  }
}

Vector SorOperator::apply_kuu(const Vector& v) const {
  if (v.size() != size()) throw InputShapeError("SoR operator length mismatch");
  if (dense_kuu()) return kuu_ * v;

  // K_UU(k, l) = sigma^2 K_first(a_k, a_l) K_suffix(s_k, s_l).
  const Eigen::Index n = size();
  thread_local Matrix m;
  thread_local Matrix mt;
  m.setZero(k_suffix_.rows(), k_first_.rows());
  for (Eigen::Index k = 0; k < n; ++k)
    m.col(fibre_[static_cast<std::size_t>(k)]).noalias() += v(k) * k_suffix_.col(suffix_[static_cast<std::size_t>(k)]);
  mt = m.transpose();
  Vector out(n);
  for (Eigen::Index k = 0; k < n; ++k)
    out(k) = k_first_.col(fibre_[static_cast<std::size_t>(k)]).dot(mt.col(suffix_[static_cast<std::size_t>(k)]));
  return kernel_.variance() * out;
}

Vector SorOperator::apply(const Vector& v) const {
  Vector out = apply_kuu(v);
  const Vector kxv = kux_.transpose() * v;
  out.noalias() += noise_precision_ * (kux_ * kxv);
  return out;
}

Vector SorOperator::diagonal() const {
  return Vector::Constant(size(), kernel_.variance()) + noise_precision_ * kux_.rowwise().squaredNorm();
}

Matrix SorOperator::principal_submatrix(const std::vector<Eigen::Index>& positions) const {
  const auto n = static_cast<Eigen::Index>(positions.size());
  PointSet pts(n, grid_->dimension());
  Matrix kx(n, kux_.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index p = positions[static_cast<std::size_t>(i)];
    if (p < 0 || p >= size()) throw InputShapeError("submatrix position out of range");
    pts.row(i) = grid_->points().row(p);
    kx.row(i) = kux_.row(p);
  }
  Matrix sub = kernel_matrix(kernel_, pts, pts);
  sub.noalias() += noise_precision_ * (kx * kx.transpose());
  return sub;
}

Matrix SorOperator::dense() const {
  std::vector<Eigen::Index> all(static_cast<std::size_t>(size()));
  for (Eigen::Index i = 0; i < size(); ++i) all[static_cast<std::size_t>(i)] = i;
  return principal_submatrix(all);
}

std::string_view to_string(PreconditionerKind kind) {
  switch (kind) {
    case PreconditionerKind::kIdentity: return "identity";
    case PreconditionerKind::kJacobi: return "jacobi";
    case PreconditionerKind::kAdditiveSchwarz: return "as";
    case PreconditionerKind::kTwoLevelAdditiveSchwarz: return "tas";
  }
  return "identity";
}

PreconditionerKind parse_preconditioner(std::string_view name) {
  if (name == "identity" || name == "none") return PreconditionerKind::kIdentity;
  if (name == "jacobi") return PreconditionerKind::kJacobi;
  if (name == "as" || name == "additive-schwarz") return PreconditionerKind::kAdditiveSchwarz;
  if (name == "tas" || name == "two-level-additive-schwarz")
    return PreconditionerKind::kTwoLevelAdditiveSchwarz;
  throw InvalidConfigError("unknown preconditioner '" + std::string(name) + "'");
}

int coarse_level(int eta, int d) { return std::max((eta + 1) / 2, d); }

Preconditioner Preconditioner::identity(Eigen::Index n) {
  Preconditioner p;
  p.n_ = n;
  return p;
}

Preconditioner Preconditioner::jacobi(Vector diagonal) {
  if ((diagonal.array() <= 0.0).any() || !diagonal.allFinite())
    throw InvalidArgumentError("Jacobi diagonal must be positive");
  Preconditioner p;
  p.kind_ = PreconditionerKind::kJacobi;
  p.n_ = diagonal.size();
  p.diagonal_ = std::move(diagonal);
  return p;
}

Preconditioner Preconditioner::from_blocks(PreconditionerKind kind, Eigen::Index n,
                                           std::vector<BlockPtr> blocks) {
  for (const BlockPtr& b : blocks) {
    if (!b) throw InvalidArgumentError("null preconditioner block");
    if (static_cast<Eigen::Index>(b->positions.size()) != b->factor.size())
      throw InputShapeError("block factor size differs from its index list");
    for (Eigen::Index p : b->positions)
      if (p < 0 || p >= n) throw InputShapeError("block position out of range");
  }
  Preconditioner p;
  p.kind_ = kind;
  p.n_ = n;
  p.blocks_ = std::move(blocks);
  return p;
}

Vector Preconditioner::apply_inverse(const Vector& r) const {
  if (r.size() != n_) throw InputShapeError("preconditioner length mismatch");
  switch (kind_) {
    case PreconditionerKind::kIdentity: return r;
    case PreconditionerKind::kJacobi: return r.cwiseQuotient(diagonal_);
    default: break;
  }
  Vector out = Vector::Zero(n_);
  Vector local;
  for (const BlockPtr& bp : blocks_) {
    const Block& b = *bp;
    local.resize(static_cast<Eigen::Index>(b.positions.size()));
    for (std::size_t i = 0; i < b.positions.size(); ++i) local(static_cast<Eigen::Index>(i)) = r(b.positions[i]);
    b.factor.solve_in_place(local);
    for (std::size_t i = 0; i < b.positions.size(); ++i) out(b.positions[i]) += local(static_cast<Eigen::Index>(i));
  }
  return out;
}

namespace {

Preconditioner::BlockPtr factor_block(const SorOperator& op, std::vector<Eigen::Index> positions,
                                   const JitterPolicy& jitter, const std::string& label) {
  try {
    LowerTriangularFactor f = cholesky(op.principal_submatrix(positions), jitter);
    return std::make_shared<const Preconditioner::Block>(Preconditioner::Block{std::move(positions), std::move(f)});
  } catch (const NotPositiveDefiniteError& e) {
    throw NotPositiveDefiniteError(label + ": " + e.what(), e.pivot());
  }
}

}  // namespace

std::vector<Preconditioner::BlockPtr> subdomain_blocks(const SorOperator& op, const JitterPolicy& jitter) {
  const SparseGrid& grid = op.grid();
  const auto& subdomains = grid.boundary_indices();
  std::vector<Preconditioner::BlockPtr> blocks;
  blocks.reserve(subdomains.size());
  for (std::size_t i = 0; i < subdomains.size(); ++i)
    blocks.push_back(factor_block(op, grid.scatter_indices(subdomains[i]), jitter, "subdomain " + std::to_string(i)));
  return blocks;
}

Preconditioner::BlockPtr coarse_block(const SorOperator& op, const JitterPolicy& jitter) {
  const SparseGrid& grid = op.grid();
  const SparseGrid coarse(coarse_level(grid.level(), grid.dimension()), grid.dimension(), grid.domain());
  return factor_block(op, nested_positions(grid, coarse), jitter, "coarse space");
}

Preconditioner build_preconditioner(PreconditionerKind kind, const SorOperator& op,
                                    const JitterPolicy& jitter) {
  switch (kind) {
    case PreconditionerKind::kIdentity: return Preconditioner::identity(op.size());
    case PreconditionerKind::kJacobi: return Preconditioner::jacobi(op.diagonal());
    default: break;
  }
  std::vector<Preconditioner::BlockPtr> blocks = subdomain_blocks(op, jitter);
  if (kind == PreconditionerKind::kTwoLevelAdditiveSchwarz) blocks.push_back(coarse_block(op, jitter));
  return Preconditioner::from_blocks(kind, op.size(), std::move(blocks));
}

PcgResult pcg(const LinearOperator& op, const Preconditioner& precond, const Vector& v,
              const PcgOptions& options, const Vector* x0) {
  const Eigen::Index n = op.size();
  if (v.size() != n || precond.size() != n) throw InputShapeError("pcg: length mismatch");
  if (x0 && x0->size() != n) throw InputShapeError("pcg: initial vector length mismatch");
  if (!(options.tol > 0.0)) throw InvalidArgumentError("pcg: tolerance must be positive");
  if (options.max_iter < 0) throw InvalidArgumentError("pcg: max_iter must be non-negative");
  const int max_iter = options.max_iter > 0 ? options.max_iter : static_cast<int>(10 * n);

  PcgResult res;
  Vector x = x0 ? *x0 : Vector::Zero(n);
  Vector r = v - op.apply(x);
  double rnorm = r.norm();
  res.trace.push_back(rnorm);
  res.solution = x;
  res.residual = rnorm;
  if (!std::isfinite(rnorm)) throw DivergenceError("pcg: non-finite initial residual", 0, res.trace);
  if (rnorm < options.tol) {
    res.converged = true;
    return res;
  }

  Vector z = precond.apply_inverse(r);
  Vector p = z;
  double rz = r.dot(z);
  for (int i = 1; i <= max_iter; ++i) {
    const Vector ap = op.apply(p);
    const double pap = p.dot(ap);
    const double alpha = rz / pap;
    if (!std::isfinite(alpha))
      throw DivergenceError("pcg: non-finite step at iteration " + std::to_string(i), i, res.trace);
    x.noalias() += alpha * p;
    r.noalias() -= alpha * ap;
    rnorm = r.norm();
    res.trace.push_back(rnorm);
    res.iterations = i;
    if (!std::isfinite(rnorm))
      throw DivergenceError("pcg: non-finite residual at iteration " + std::to_string(i), i, res.trace);
    if (rnorm < res.residual) {
      res.residual = rnorm;
      res.solution = x;
    }
    if (rnorm < options.tol) {
      res.converged = true;
      return res;
    }
    z = precond.apply_inverse(r);
    const double rz_next = r.dot(z);
    const double beta = rz_next / rz;
    if (!std::isfinite(beta))
      throw DivergenceError("pcg: non-finite direction update at iteration " + std::to_string(i), i, res.trace);
    rz = rz_next;
    p = z + beta * p;
  }
  return res;
}

void write_residual_trace(std::ostream& out, const std::vector<double>& trace) {
  out << "iteration,residual_norm\n";
  out.precision(17);
  for (std::size_t i = 0; i < trace.size(); ++i) out << i << ',' << trace[i] << '\n';
}

}  // namespace sgsample
