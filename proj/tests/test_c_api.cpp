// Exercises the shared library through its C header only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sgsample/c_api.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

TEST_CASE("version and status names") {
  CHECK(std::string(sgs_version()).size() > 0);
  CHECK(std::string(sgs_status_name(SGS_OK)) == "ok");
  CHECK(std::string(sgs_status_name(SGS_ERR_INVALID_CONFIG)) == "invalid config");
}

TEST_CASE("config handles") {
  sgs_config* cfg = nullptr;
  REQUIRE(sgs_config_parse("{\"replicates\": 4, \"seed\": 7}", &cfg) == SGS_OK);
  CHECK(sgs_config_set_seed(cfg, 11) == SGS_OK);
  CHECK(sgs_config_set_threads(cfg, 0) == SGS_OK);  // validated when a command runs
  size_t needed = 0;
  CHECK(sgs_config_to_json(cfg, nullptr, 0, &needed) == SGS_OK);
  std::vector<char> buf(needed);
  CHECK(sgs_config_to_json(cfg, buf.data(), buf.size(), &needed) == SGS_OK);
  CHECK(std::string(buf.data()).find("\"seed\":11") != std::string::npos);
  CHECK(sgs_run_command("thompson", cfg, "") == SGS_ERR_INVALID_CONFIG);
  CHECK(std::string(sgs_last_error()).find("threads") != std::string::npos);
  sgs_config_free(cfg);

  sgs_config* bad = nullptr;
  CHECK(sgs_config_parse("{\"bogus\": 1}", &bad) == SGS_ERR_INVALID_CONFIG);
  CHECK(bad == nullptr);
  CHECK(std::string(sgs_last_error()).find("bogus") != std::string::npos);
  CHECK(sgs_config_parse(nullptr, &bad) == SGS_ERR_INVALID_ARGUMENT);
  CHECK(sgs_config_load("/nonexistent.json", &bad) == SGS_ERR_INVALID_CONFIG);
}

TEST_CASE("running a command into a file") {
  sgs_config* cfg = nullptr;
  REQUIRE(sgs_config_parse(
              "{\"replicates\": 2, \"lengthscales\": [1.0], \"seeds\": [9], \"iterations\": 3, "
              "\"candidates\": 64, \"timing\": false}",
              &cfg) == SGS_OK);
  const std::string path = "c_api_thompson.csv";
  REQUIRE(sgs_run_command("thompson", cfg, path.c_str()) == SGS_OK);
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str().find("method,d,lengthscale,seed,iteration,regret") != std::string::npos);
  std::remove(path.c_str());
  CHECK(sgs_run_command("thompson", cfg, "/nonexistent/dir/out.csv") == SGS_ERR_IO);
  CHECK(sgs_run_command("nope", cfg, path.c_str()) == SGS_ERR_INVALID_CONFIG);
  sgs_config_free(cfg);
}

TEST_CASE("kernel, grid and prior sampling") {
  sgs_kernel* k = nullptr;
  REQUIRE(sgs_kernel_create(2, 1.5, std::sqrt(3.0), 1.0, &k) == SGS_OK);
  const double a[] = {0.0, 0.0};
  const double b[] = {1.0, 1.0, 0.0, 0.0};
  double out[2];
  REQUIRE(sgs_kernel_matrix(k, a, 1, b, 2, out) == SGS_OK);
  CHECK(out[0] == doctest::Approx(std::pow(2.0 * std::exp(-1.0), 2)));
  CHECK(out[1] == doctest::Approx(1.0));
  sgs_kernel* bad = nullptr;
  CHECK(sgs_kernel_create(2, 1.5, -1.0, 1.0, &bad) == SGS_ERR_INVALID_ARGUMENT);

  sgs_grid* g = nullptr;
  REQUIRE(sgs_grid_create(3, 2, 0.0, 1.0, &g) == SGS_OK);
  size_t n = 0;
  REQUIRE(sgs_grid_size(g, &n) == SGS_OK);
  CHECK(n == 5);
  std::vector<double> pts(2 * n);
  CHECK(sgs_grid_points(g, pts.data()) == SGS_OK);
  CHECK(sgs_grid_create(1, 2, 0.0, 1.0, &g) != SGS_OK);

  const double z[] = {0.2, 0.3, 0.6, 0.7, 0.5, 0.5};
  std::vector<double> s1(4 * 3), s2(4 * 3);
  for (auto method : {SGS_PRIOR_CHOLESKY, SGS_PRIOR_INSG, SGS_PRIOR_RFF}) {
    REQUIRE(sgs_sample_prior(method, k, g, z, 3, 42, 4, 64, s1.data()) == SGS_OK);
    REQUIRE(sgs_sample_prior(method, k, g, z, 3, 42, 4, 64, s2.data()) == SGS_OK);
    CHECK(s1 == s2);
  }
  CHECK(sgs_sample_prior(SGS_PRIOR_INSG, k, nullptr, z, 3, 42, 4, 64, s1.data()) == SGS_ERR_INVALID_ARGUMENT);
  sgs_grid_free(g);
  sgs_kernel_free(k);
}

TEST_CASE("w2 through the C API") {
  const double m1[] = {0.0, 0.0}, m2[] = {0.0, 0.0};
  const double c1[] = {1.0, 0.0, 0.0, 4.0}, c2[] = {1.0, 0.0, 0.0, 1.0};
  double d = -1.0;
  REQUIRE(sgs_w2_gaussian(m1, c1, m2, c2, 2, &d) == SGS_OK);
  CHECK(d == doctest::Approx(1.0));
  const double asym[] = {1.0, 0.5, 0.0, 1.0};
  CHECK(sgs_w2_gaussian(m1, asym, m2, c2, 2, &d) == SGS_ERR_INPUT_SHAPE);
}
