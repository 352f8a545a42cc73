#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sgsample {

/// Settings shared by all experiment commands. Read from a JSON object whose
/// keys mirror the field names below; unknown keys are rejected.
struct ExperimentConfig {
  std::string method = "insg";  // chol | rff | insg | matheron-exact
  int dimension = 2;
  int eta = 5;

  double smoothness = 1.5;
  double variance = 1.0;
  double lengthscale = 1.7320508075688772;
  double noise_variance = 1e-4;

  std::uint64_t seed = 99;
  int replicates = 1000;
  int threads = 1;

  // n_s for prior-bench, n for posterior-bench and precond-bench; empty selects
  // the command default.
  std::vector<long long> sizes;
  int test_points = 1000;
  // Symmetric box [lo, hi]^d; empty selects the command default.
  std::vector<double> domain;

  double tol = 1e-8;
  int max_iter = 0;  // 0: 10 * n_sg
  std::string preconditioner = "tas";
  // precond-bench variants; empty runs identity, jacobi, as, tas.
  std::vector<std::string> preconditioners;

  int rff_features = 64;

  // prior-bench: closed-form W2 of the SoR prior over `levels` instead of sampling.
  bool analytic = false;
  std::vector<int> levels;

  // thompson
  std::vector<double> lengthscales;
  std::vector<std::uint64_t> seeds;
  int iterations = 30;
  int initial_points = 3;
  int candidates = 1024;

  // fitzhugh
  int steps = 40;
  int training_points = 256;

  bool griewank_standard_sign = false;
  // false writes zero in every wall-clock column so outputs are byte-identical.
  bool timing = true;
  std::string output;

  /// Throws InvalidConfigError naming the offending field.
  void validate() const;

  std::string to_json() const;
  static ExperimentConfig from_json(std::string_view text);
  static ExperimentConfig from_file(const std::string& path);
};

/// Artifact version string.
std::string_view version();

}  // namespace sgsample
