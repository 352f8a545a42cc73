#pragma once

#include "sgsample/types.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace sgsample {

/// Philox-4x32-10 counter-based generator.
///
/// The 64-bit key is the experiment seed. The 128-bit counter is split into a
/// 64-bit block counter (low words) and a 64-bit stream id (high words), so
/// stream k of seed s is fully determined by (s, k) and independent of how many
/// values other streams consumed.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;

  explicit Philox4x32(std::uint64_t seed = 0, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Raw block function, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                            std::array<std::uint32_t, 2> key);

 private:
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
};

/// Random source for one replicate: engine plus the distributions samplers need.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream) : engine_(seed, stream) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double student_t(double dof) { return std::student_t_distribution<double>(dof)(engine_); }

  Vector normal_vector(Eigen::Index n);
  void fill_normal(Eigen::Ref<Vector> out);

  Philox4x32& engine() { return engine_; }

 private:
  Philox4x32 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Stream id for replicate k of a batch; stream 0 is reserved for set-up draws
/// (data sets, evaluation points).
inline std::uint64_t replicate_stream(std::uint64_t k) { return k + 1; }

/// n x d matrix of uniform points in the box [lo_j, hi_j].
PointSet uniform_points(Rng& rng, Eigen::Index n, std::span<const double> lower,
                        std::span<const double> upper);

}  // namespace sgsample
