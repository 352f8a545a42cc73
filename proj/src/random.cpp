#include "sgsample/random.hpp"

#include "sgsample/error.hpp"

namespace sgsample {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> Philox4x32::block(std::array<std::uint32_t, 4> c,
                                               std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      counter_{0u, 0u, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)} {}

Philox4x32::result_type Philox4x32::operator()() {
  if (used_ == 4) {
    buffer_ = block(counter_, key_);
    if (++counter_[0] == 0) ++counter_[1];
    used_ = 0;
  }
  return buffer_[static_cast<std::size_t>(used_++)];
}

Vector Rng::normal_vector(Eigen::Index n) {
  Vector v(n);
  fill_normal(v);
  return v;
}

void Rng::fill_normal(Eigen::Ref<Vector> out) {
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = normal();
}

PointSet uniform_points(Rng& rng, Eigen::Index n, std::span<const double> lower,
                        std::span<const double> upper) {
  if (lower.size() != upper.size()) throw InputShapeError("uniform_points: bound length mismatch");
  const auto d = static_cast<Eigen::Index>(lower.size());
  PointSet p(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      p(i, j) = rng.uniform(lower[static_cast<std::size_t>(j)], upper[static_cast<std::size_t>(j)]);
  return p;
}

}  // namespace sgsample
