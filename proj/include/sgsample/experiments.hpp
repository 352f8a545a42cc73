#pragma once

#include "sgsample/config.hpp"
#include "sgsample/krylov.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace sgsample {

/// Result rows of an experiment; cells are pre-formatted text.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;  // throws LookupError
  const std::string& cell(std::size_t row, std::string_view name) const;
  double number(std::size_t row, std::string_view name) const;
};

/// '#'-prefixed header (version, command, serialized config), column line, rows.
void write_csv(std::ostream& out, std::string_view command, const ExperimentConfig& config,
               const CsvTable& table);

/// Sampling time and W2 against the true prior N(0, K_ZZ) at uniform points, per n_s.
/// In analytic mode: closed-form W2 between N(0, K_ZZ) and the SoR prior per level.
CsvTable prior_bench(const ExperimentConfig& config);

/// Griewank regression data; time and W2 of posterior draws against the method's target.
CsvTable posterior_bench(const ExperimentConfig& config);

/// Best-so-far regret of Thompson sampling on Ackley over [-5, 5]^d.
CsvTable thompson(const ExperimentConfig& config);

/// Stochastic FitzHugh-Nagumo trajectories driven by GP posterior increments.
CsvTable fitzhugh(const ExperimentConfig& config);

struct PreconditionerRun {
  PreconditionerKind kind = PreconditionerKind::kIdentity;
  PcgResult result;
  bool diverged = false;
  double setup_seconds = 0.0;
};

/// Solves Sigma_U x = v for a random v under each configured preconditioner.
std::vector<PreconditionerRun> preconditioner_study(const ExperimentConfig& config);

/// Residual traces of preconditioner_study.
CsvTable precond_bench(const ExperimentConfig& config);

const std::vector<std::string>& command_names();

/// Validates the config and dispatches; unknown commands raise InvalidConfigError.
CsvTable run_command(std::string_view command, const ExperimentConfig& config);

}  // namespace sgsample
