#include "sgsample/c_api.h"

#include "CLI11.hpp"

#include <cstdio>
#include <optional>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

int exit_code(sgs_status status) {
  switch (status) {
    case SGS_OK: return kExitOk;
    case SGS_ERR_NOT_POSITIVE_DEFINITE:
    case SGS_ERR_DIVERGENCE:
    case SGS_ERR_INTERNAL: return kExitNumerical;
    default: return kExitConfig;
  }
}

int fail(sgs_status status) {
  std::fprintf(stderr, "sgsample: %s: %s\n", sgs_status_name(status), sgs_last_error());
  return exit_code(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse-grid GP sampling experiments"};
  app.set_version_flag("--version", std::string(sgs_version()));
  app.require_subcommand(1);

  std::string config_path;
  std::optional<unsigned long long> seed;
  std::optional<int> replicates;
  std::optional<int> threads;
  std::string out_path;
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Override the config seed");
  app.add_option("--out", out_path, "CSV output path (default: config output or stdout)");
  app.add_option("--replicates", replicates, "Override the replicate count");
  app.add_option("--threads", threads, "Worker threads");

  const char* commands[][2] = {
      {"prior-bench", "Prior sampling time and accuracy"},
      {"posterior-bench", "Posterior sampling time and accuracy on Griewank data"},
      {"thompson", "Thompson sampling regret on Ackley"},
      {"fitzhugh", "Stochastic FitzHugh-Nagumo simulation"},
      {"precond-bench", "PCG residual traces per preconditioner"},
  };
  for (const auto& c : commands) app.add_subcommand(c[0], c[1])->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  sgs_config* config = nullptr;
  sgs_status st = config_path.empty() ? sgs_config_parse("{}", &config) : sgs_config_load(config_path.c_str(), &config);
  if (st != SGS_OK) return fail(st);
  if (seed) st = sgs_config_set_seed(config, *seed);
  if (st == SGS_OK && replicates) st = sgs_config_set_replicates(config, *replicates);
  if (st == SGS_OK && threads) st = sgs_config_set_threads(config, *threads);
  if (st == SGS_OK && !out_path.empty()) st = sgs_config_set_output(config, out_path.c_str());
  if (st == SGS_OK) st = sgs_run_command(command.c_str(), config, nullptr);
  sgs_config_free(config);
  return st == SGS_OK ? kExitOk : fail(st);
}
