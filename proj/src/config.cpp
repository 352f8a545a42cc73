#include "sgsample/config.hpp"

#include "sgsample/error.hpp"
#include "sgsample/krylov.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace sgsample {

using nlohmann::json;

namespace {

template <typename T>
void read(const json& j, const char* key, T& field) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    field = it->get<T>();
  } catch (const json::exception&) {
    throw InvalidConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidConfigError(what);
}

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

std::string_view version() { return SGSAMPLE_VERSION; }

void ExperimentConfig::validate() const {
  static const std::set<std::string> methods{"chol", "rff", "insg", "matheron-exact"};
  require(methods.count(method) == 1, "method must be one of chol, rff, insg, matheron-exact");
  require(dimension >= 1 && dimension <= 8, "dimension must be in [1, 8]");
  require(eta >= dimension, "eta must be at least the dimension");
  require((eta - dimension + 1) * dimension <= 63, "eta too large for the dimension");
  require(positive(smoothness), "smoothness must be positive");
  require(positive(variance), "variance must be positive");
  require(positive(lengthscale), "lengthscale must be positive");
  require(positive(noise_variance), "noise_variance must be positive");
  require(replicates >= 2, "replicates must be at least 2");
  require(threads >= 1, "threads must be at least 1");
  for (long long n : sizes) require(n >= 1, "sizes must be positive");
  require(test_points >= 1, "test_points must be positive");
  require(domain.empty() || (domain.size() == 2 && std::isfinite(domain[0]) && std::isfinite(domain[1]) &&
                             domain[0] < domain[1]),
          "domain must be [lo, hi] with lo < hi");
  require(positive(tol), "tol must be positive");
  require(max_iter >= 0, "max_iter must be non-negative");
  try {
    parse_preconditioner(preconditioner);
    for (const auto& p : preconditioners) parse_preconditioner(p);
  } catch (const InvalidConfigError& e) {
    throw InvalidConfigError(std::string("preconditioner: ") + e.what());
  }
  require(rff_features >= 1, "rff_features must be positive");
  for (int l : levels) require(l >= dimension && (l - dimension + 1) * dimension <= 63, "levels out of range");
  for (double l : lengthscales) require(positive(l), "lengthscales must be positive");
  require(iterations >= 1, "iterations must be positive");
  require(initial_points >= 1, "initial_points must be positive");
  require(candidates >= 1, "candidates must be positive");
  require(steps >= 1, "steps must be positive");
  require(training_points >= 1, "training_points must be positive");
}

std::string ExperimentConfig::to_json() const {
  json j;
  j["method"] = method;
  j["dimension"] = dimension;
  j["eta"] = eta;
  j["smoothness"] = smoothness;
  j["variance"] = variance;
  j["lengthscale"] = lengthscale;
  j["noise_variance"] = noise_variance;
  j["seed"] = seed;
  j["replicates"] = replicates;
  j["threads"] = threads;
  j["sizes"] = sizes;
  j["test_points"] = test_points;
  j["domain"] = domain;
  j["tol"] = tol;
  j["max_iter"] = max_iter;
  j["preconditioner"] = preconditioner;
  j["preconditioners"] = preconditioners;
  j["rff_features"] = rff_features;
  j["analytic"] = analytic;
  j["levels"] = levels;
  j["lengthscales"] = lengthscales;
  j["seeds"] = seeds;
  j["iterations"] = iterations;
  j["initial_points"] = initial_points;
  j["candidates"] = candidates;
  j["steps"] = steps;
  j["training_points"] = training_points;
  j["griewank_standard_sign"] = griewank_standard_sign;
  j["timing"] = timing;
  j["output"] = output;
  return j.dump();
}

ExperimentConfig ExperimentConfig::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const json::exception& e) {
    throw InvalidConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  require(j.is_object(), "config must be a JSON object");

  ExperimentConfig c;
  static const std::set<std::string> known{
      "method", "dimension", "eta", "smoothness", "variance", "lengthscale", "noise_variance",
      "seed", "replicates", "threads", "sizes", "test_points", "domain", "tol", "max_iter",
      "preconditioner", "preconditioners", "rff_features", "analytic", "levels", "lengthscales",
      "seeds", "iterations", "initial_points", "candidates", "steps", "training_points",
      "griewank_standard_sign", "timing", "output"};
  for (const auto& item : j.items())
    require(known.count(item.key()) == 1, "unknown config field '" + item.key() + "'");

  read(j, "method", c.method);
  read(j, "dimension", c.dimension);
  read(j, "eta", c.eta);
  read(j, "smoothness", c.smoothness);
  read(j, "variance", c.variance);
  read(j, "lengthscale", c.lengthscale);
  read(j, "noise_variance", c.noise_variance);
  read(j, "seed", c.seed);
  read(j, "replicates", c.replicates);
  read(j, "threads", c.threads);
  read(j, "sizes", c.sizes);
  read(j, "test_points", c.test_points);
  read(j, "domain", c.domain);
  read(j, "tol", c.tol);
  read(j, "max_iter", c.max_iter);
  read(j, "preconditioner", c.preconditioner);
  read(j, "preconditioners", c.preconditioners);
  read(j, "rff_features", c.rff_features);
  read(j, "analytic", c.analytic);
  read(j, "levels", c.levels);
  read(j, "lengthscales", c.lengthscales);
  read(j, "seeds", c.seeds);
  read(j, "iterations", c.iterations);
  read(j, "initial_points", c.initial_points);
  read(j, "candidates", c.candidates);
  read(j, "steps", c.steps);
  read(j, "training_points", c.training_points);
  read(j, "griewank_standard_sign", c.griewank_standard_sign);
  read(j, "timing", c.timing);
  read(j, "output", c.output);
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

}  // namespace sgsample
