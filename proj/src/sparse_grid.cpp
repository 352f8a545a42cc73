#include "sgsample/sparse_grid.hpp"

#include "sgsample/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sgsample {

namespace {

constexpr int kMaxLevel = 30;

void check_eta_d(int eta, int d) {
  if (d < 1) throw InvalidConfigError("sparse grid dimension must be >= 1");
  if (eta < d)
    throw InvalidConfigError("sparse grid level eta=" + std::to_string(eta) +
                             " must be >= dimension d=" + std::to_string(d));
  if (eta - d + 1 > kMaxLevel) throw InvalidConfigError("sparse grid level too large");
}

// Calls fn(levels) for every t with t_j >= 1 and lo <= |t| <= hi, lexicographically.
template <typename Fn>
void for_each_index(int d, int lo, int hi, Fn&& fn) {
  std::vector<int> t(static_cast<std::size_t>(d), 1);
  auto rec = [&](auto&& self, int j, int sum) -> void {
    if (j == d) {
      if (sum >= lo && sum <= hi) fn(t);
      return;
    }
    const int remaining = d - j - 1;
    for (int v = 1; sum + v + remaining <= hi; ++v) {
      t[static_cast<std::size_t>(j)] = v;
      self(self, j + 1, sum + v);
    }
  };
  rec(rec, 0, 0);
}

std::vector<MultiIndex> collect(int d, int lo, int hi) {
  std::vector<MultiIndex> out;
  for_each_index(d, lo, hi, [&](const std::vector<int>& t) { out.push_back(MultiIndex{t}); });
  return out;
}

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

DyadicCoord DyadicCoord::reduced(std::int64_t numerator, int level) {
  if (level < 1 || numerator < 1 || numerator >= (std::int64_t{1} << level))
    throw InvalidArgumentError("dyadic coordinate outside (0, 1)");
  while (level > 1 && numerator % 2 == 0) {
    numerator /= 2;
    --level;
  }
  return DyadicCoord{numerator, level};
}

double DyadicCoord::value() const { return std::ldexp(static_cast<double>(numerator), -level); }

std::strong_ordering DyadicCoord::operator<=>(const DyadicCoord& other) const {
  const int common = std::max(level, other.level);
  const std::int64_t a = numerator << (common - level);
  const std::int64_t b = other.numerator << (common - other.level);
  if (a != b) return a <=> b;
  return level <=> other.level;
}

int MultiIndex::total() const {
  int s = 0;
  for (int v : levels) s += v;
  return s;
}

Box Box::unit(int dimension) { return cube(dimension, 0.0, 1.0); }

Box Box::cube(int dimension, double lo, double hi) {
  Box b;
  b.lower.assign(static_cast<std::size_t>(dimension), lo);
  b.upper.assign(static_cast<std::size_t>(dimension), hi);
  return b;
}

void Box::validate() const {
  if (lower.size() != upper.size() || lower.empty())
    throw InputShapeError("box bounds must be non-empty and of equal length");
  for (std::size_t j = 0; j < lower.size(); ++j)
    if (!(upper[j] > lower[j]) || !std::isfinite(lower[j]) || !std::isfinite(upper[j]))
      throw InvalidArgumentError("degenerate domain interval in dimension " + std::to_string(j));
}

std::vector<DyadicCoord> level_points(int t) {
  if (t < 0) throw InvalidArgumentError("level must be >= 0");
  if (t > kMaxLevel) throw InvalidArgumentError("level too large");
  std::vector<DyadicCoord> out;
  const std::int64_t count = (std::int64_t{1} << t) - 1;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 1; i <= count; ++i) out.push_back(DyadicCoord::reduced(i, t));
  return out;
}

std::vector<MultiIndex> smolyak_index_set(int eta, int d) {
  check_eta_d(eta, d);
  return collect(d, std::max(d, eta - d + 1), eta);
}

std::vector<MultiIndex> boundary_index_set(int eta, int d) {
  check_eta_d(eta, d);
  return collect(d, eta, eta);
}

std::vector<MultiIndex> hierarchical_index_set(int eta, int d) {
  check_eta_d(eta, d);
  return collect(d, d, eta);
}

long long smolyak_coefficient(const MultiIndex& t, int eta, int d) {
  if (t.dimension() != d) throw InputShapeError("multi-index dimension mismatch");
  const int gap = eta - t.total();
  const long long c = binomial(d - 1, gap);
  return (gap % 2 == 0) ? c : -c;
}

std::int64_t full_grid_size(const MultiIndex& t) {
  std::int64_t n = 1;
  for (int v : t.levels) n *= (std::int64_t{1} << v) - 1;
  return n;
}

SparseGrid::SparseGrid(int eta, int d, Box domain) : eta_(eta), d_(d), domain_(std::move(domain)) {
  check_eta_d(eta, d);
  if (domain_.dimension() != d) throw InputShapeError("domain dimension does not match grid");
  domain_.validate();
  const int T = finest_level();
  bits_ = T;
  if (bits_ * d_ > 63) throw InvalidConfigError("sparse grid too fine to index exactly");

  boundary_ = collect(d_, eta_, eta_);
  smolyak_ = collect(d_, std::max(d_, eta_ - d_ + 1), eta_);

  std::vector<std::int64_t> idx(static_cast<std::size_t>(d_));
  for (const MultiIndex& t : boundary_) {
    // Odometer over the Cartesian product of the per-dimension level sets.
    std::vector<std::int64_t> i(static_cast<std::size_t>(d_), 1);
    while (true) {
      for (int j = 0; j < d_; ++j)
        idx[static_cast<std::size_t>(j)] = i[static_cast<std::size_t>(j)]
                                           << (T - t.levels[static_cast<std::size_t>(j)]);
      keys_.push_back(encode(idx));
      int j = d_ - 1;
      for (; j >= 0; --j) {
        auto& c = i[static_cast<std::size_t>(j)];
        if (++c < (std::int64_t{1} << t.levels[static_cast<std::size_t>(j)])) break;
        c = 1;
      }
      if (j < 0) break;
    }
  }
  std::sort(keys_.begin(), keys_.end());
  keys_.erase(std::unique(keys_.begin(), keys_.end()), keys_.end());

  const auto n = static_cast<Eigen::Index>(keys_.size());
  unit_points_.resize(n, d_);
  points_.resize(n, d_);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (int j = 0; j < d_; ++j) {
      const double u = std::ldexp(static_cast<double>(fine_index(k, j)), -T);
      unit_points_(k, j) = u;
      points_(k, j) = to_domain(u, j);
    }
  }

  for (const MultiIndex& t : smolyak_) scatter_.emplace(t, full_grid_positions(t));
}

std::uint64_t SparseGrid::encode(std::span<const std::int64_t> fine_indices) const {
  std::uint64_t key = 0;
  for (int j = 0; j < d_; ++j)
    key = (key << bits_) | static_cast<std::uint64_t>(fine_indices[static_cast<std::size_t>(j)]);
  return key;
}

std::int64_t SparseGrid::fine_index(Eigen::Index k, int j) const {
  const std::uint64_t mask = (std::uint64_t{1} << bits_) - 1;
  const int shift = bits_ * (d_ - 1 - j);
  return static_cast<std::int64_t>((keys_[static_cast<std::size_t>(k)] >> shift) & mask);
}

DyadicCoord SparseGrid::coordinate(Eigen::Index k, int j) const {
  return DyadicCoord::reduced(fine_index(k, j), finest_level());
}

double SparseGrid::to_domain(double unit, int j) const {
  const auto jj = static_cast<std::size_t>(j);
  return domain_.lower[jj] + unit * (domain_.upper[jj] - domain_.lower[jj]);
}

std::optional<Eigen::Index> SparseGrid::find(std::span<const std::int64_t> fine_indices) const {
  if (static_cast<int>(fine_indices.size()) != d_) throw InputShapeError("point dimension mismatch");
  const std::int64_t limit = std::int64_t{1} << bits_;
  for (auto v : fine_indices)
    if (v < 1 || v >= limit) return std::nullopt;
  const std::uint64_t key = encode(fine_indices);
  auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) return std::nullopt;
  return static_cast<Eigen::Index>(it - keys_.begin());
}

std::optional<Eigen::Index> SparseGrid::find(std::span<const DyadicCoord> coords) const {
  if (static_cast<int>(coords.size()) != d_) throw InputShapeError("point dimension mismatch");
  std::vector<std::int64_t> idx(coords.size());
  for (std::size_t j = 0; j < coords.size(); ++j) {
    if (coords[j].level > bits_) return std::nullopt;
    idx[j] = coords[j].numerator << (bits_ - coords[j].level);
  }
  return find(idx);
}

const std::vector<Eigen::Index>& SparseGrid::scatter_indices(const MultiIndex& t) const {
  auto it = scatter_.find(t);
  if (it == scatter_.end()) throw LookupError("multi-index is not in the stored Smolyak/boundary sets");
  return it->second;
}

std::vector<Eigen::Index> SparseGrid::full_grid_positions(const MultiIndex& t) const {
  if (t.dimension() != d_) throw InputShapeError("multi-index dimension mismatch");
  for (int v : t.levels)
    if (v < 1) throw LookupError("multi-index levels must be >= 1");
  if (t.total() > eta_) throw LookupError("full grid U_t is not contained in the sparse grid");
  const int T = finest_level();
  std::vector<Eigen::Index> out;
  out.reserve(static_cast<std::size_t>(full_grid_size(t)));
  std::vector<std::int64_t> i(static_cast<std::size_t>(d_), 1), idx(static_cast<std::size_t>(d_));
  while (true) {
    for (int j = 0; j < d_; ++j)
      idx[static_cast<std::size_t>(j)] = i[static_cast<std::size_t>(j)]
                                         << (T - t.levels[static_cast<std::size_t>(j)]);
    auto pos = find(idx);
    if (!pos) throw LookupError("full grid point missing from sparse grid");
    out.push_back(*pos);
    int j = d_ - 1;
    for (; j >= 0; --j) {
      auto& c = i[static_cast<std::size_t>(j)];
      if (++c < (std::int64_t{1} << t.levels[static_cast<std::size_t>(j)])) break;
      c = 1;
    }
    if (j < 0) break;
  }
  return out;
}

SparseGrid build_sparse_grid(int eta, int d, const Box& domain) { return SparseGrid(eta, d, domain); }

std::vector<Eigen::Index> nested_positions(const SparseGrid& grid, const SparseGrid& coarser) {
  if (grid.dimension() != coarser.dimension()) throw InputShapeError("grid dimension mismatch");
  std::vector<Eigen::Index> out;
  out.reserve(static_cast<std::size_t>(coarser.size()));
  std::vector<DyadicCoord> coords(static_cast<std::size_t>(coarser.dimension()));
  for (Eigen::Index k = 0; k < coarser.size(); ++k) {
    for (int j = 0; j < coarser.dimension(); ++j)
      coords[static_cast<std::size_t>(j)] = coarser.coordinate(k, j);
    if (auto pos = grid.find(coords)) out.push_back(*pos);
  }
  return out;
}

}  // namespace sgsample
