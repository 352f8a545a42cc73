#pragma once

#include "sgsample/types.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace sgsample {

/// The dyadic rational numerator / 2^level in (0, 1), kept in reduced form
/// (odd numerator), so equality is plain field equality.
struct DyadicCoord {
  std::int64_t numerator = 1;
  int level = 1;

  static DyadicCoord reduced(std::int64_t numerator, int level);
  double value() const;

  bool operator==(const DyadicCoord&) const = default;
  std::strong_ordering operator<=>(const DyadicCoord& other) const;
};

/// Level vector (t_1, ..., t_d) with every t_j >= 1.
struct MultiIndex {
  std::vector<int> levels;

  int total() const;
  int dimension() const { return static_cast<int>(levels.size()); }

  auto operator<=>(const MultiIndex&) const = default;
  bool operator==(const MultiIndex&) const = default;
};

/// Axis-aligned box [lower_j, upper_j].
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  static Box unit(int dimension);
  static Box cube(int dimension, double lo, double hi);
  int dimension() const { return static_cast<int>(lower.size()); }
  void validate() const;
};

/// {i / 2^t : i = 1, ..., 2^t - 1} in ascending order; empty for t = 0.
std::vector<DyadicCoord> level_points(int t);

/// All t with t_j >= 1 and max(d, eta - d + 1) <= |t| <= eta, lexicographically sorted.
std::vector<MultiIndex> smolyak_index_set(int eta, int d);

/// All t with t_j >= 1 and |t| = eta, lexicographically sorted.
std::vector<MultiIndex> boundary_index_set(int eta, int d);

/// All t with t_j >= 1 and |t| <= eta (the hierarchical increments of U(eta, d)).
std::vector<MultiIndex> hierarchical_index_set(int eta, int d);

/// (-1)^(eta - |t|) * binomial(d - 1, eta - |t|); zero outside the Smolyak band.
long long smolyak_coefficient(const MultiIndex& t, int eta, int d);

/// Number of points of the full grid U_t = prod_j (2^t_j - 1).
std::int64_t full_grid_size(const MultiIndex& t);

/// Sparse grid U(eta, d) built from nested hyperbolic cross points.
///
/// Points are stored by their integer index at the finest one-dimensional level
/// T = eta - d + 1, so the coordinate of point k in dimension j is
/// index(k, j) / 2^T. Points are sorted lexicographically by those indices, which
/// is the lexicographic order of the exact dyadic coordinates.
class SparseGrid {
 public:
  SparseGrid(int eta, int d, Box domain);

  int level() const { return eta_; }
  int dimension() const { return d_; }
  int finest_level() const { return eta_ - d_ + 1; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(keys_.size()); }
  const Box& domain() const { return domain_; }

  /// Integer coordinate of point k in dimension j at the finest level.
  std::int64_t fine_index(Eigen::Index k, int j) const;
  DyadicCoord coordinate(Eigen::Index k, int j) const;

  /// Points in [0,1]^d and mapped onto the domain, one per row.
  const PointSet& unit_points() const { return unit_points_; }
  const PointSet& points() const { return points_; }

  /// Position of the point with the given finest-level indices, if present.
  std::optional<Eigen::Index> find(std::span<const std::int64_t> fine_indices) const;
  std::optional<Eigen::Index> find(std::span<const DyadicCoord> coords) const;

  const std::vector<MultiIndex>& boundary_indices() const { return boundary_; }
  const std::vector<MultiIndex>& smolyak_indices() const { return smolyak_; }

  /// Grid positions of U_t in Kronecker order (first dimension slowest).
  /// Only stored indices (Smolyak and boundary sets) are accepted; throws LookupError otherwise.
  const std::vector<Eigen::Index>& scatter_indices(const MultiIndex& t) const;

  /// Same enumeration for any t with |t| <= eta, computed on demand.
  std::vector<Eigen::Index> full_grid_positions(const MultiIndex& t) const;

  /// Maps unit coordinates onto the domain.
  double to_domain(double unit, int j) const;

 private:
  std::uint64_t encode(std::span<const std::int64_t> fine_indices) const;

  int eta_;
  int d_;
  Box domain_;
  int bits_;
  std::vector<std::uint64_t> keys_;
  PointSet unit_points_;
  PointSet points_;
  std::vector<MultiIndex> boundary_;
  std::vector<MultiIndex> smolyak_;
  std::map<MultiIndex, std::vector<Eigen::Index>> scatter_;
};

/// Validates (eta, d) and builds the grid over `domain`.
SparseGrid build_sparse_grid(int eta, int d, const Box& domain);

/// Grid positions of the points of `grid` that also belong to `coarser`
/// (matched by exact dyadic coordinates), in the order of `coarser`.
std::vector<Eigen::Index> nested_positions(const SparseGrid& grid, const SparseGrid& coarser);

}  // namespace sgsample
