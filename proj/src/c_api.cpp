#include "sgsample/c_api.h"

#include "sgsample/config.hpp"
#include "sgsample/error.hpp"
#include "sgsample/experiments.hpp"
#include "sgsample/metrics.hpp"
#include "sgsample/prior_sampler.hpp"

#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <new>
#include <string>

struct sgs_config {
  sgsample::ExperimentConfig config;
};

struct sgs_kernel {
  sgsample::ProductKernel kernel;
};

struct sgs_grid {
  std::shared_ptr<const sgsample::SparseGrid> grid;
};

namespace {

thread_local std::string last_error;

sgs_status status_of(sgsample::ErrorKind kind) {
  using sgsample::ErrorKind;
  switch (kind) {
    case ErrorKind::kInvalidArgument: return SGS_ERR_INVALID_ARGUMENT;
    case ErrorKind::kInputShape: return SGS_ERR_INPUT_SHAPE;
    case ErrorKind::kInvalidConfig: return SGS_ERR_INVALID_CONFIG;
    case ErrorKind::kNotPositiveDefinite: return SGS_ERR_NOT_POSITIVE_DEFINITE;
    case ErrorKind::kDivergence: return SGS_ERR_DIVERGENCE;
    case ErrorKind::kLookup: return SGS_ERR_LOOKUP;
    case ErrorKind::kIo: return SGS_ERR_IO;
  }
  return SGS_ERR_INTERNAL;
}

template <typename Fn>
sgs_status guard(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return SGS_OK;
  } catch (const sgsample::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return SGS_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return SGS_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return SGS_ERR_INTERNAL;
  }
}

void require_arg(bool ok, const char* what) {
  if (!ok) throw sgsample::InvalidArgumentError(what);
}

sgsample::Matrix row_major(const double* data, size_t rows, size_t cols) {
  using Map = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  return Map(data, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

void copy_row_major(const sgsample::Matrix& m, double* out) {
  using Map = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  Map(out, m.rows(), m.cols()) = m;
}

}  // namespace

extern "C" {

const char* sgs_version(void) { return SGSAMPLE_VERSION; }

const char* sgs_last_error(void) { return last_error.c_str(); }

const char* sgs_status_name(sgs_status status) {
  switch (status) {
    case SGS_OK: return "ok";
    case SGS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SGS_ERR_INPUT_SHAPE: return "input shape";
    case SGS_ERR_INVALID_CONFIG: return "invalid config";
    case SGS_ERR_NOT_POSITIVE_DEFINITE: return "not positive definite";
    case SGS_ERR_DIVERGENCE: return "divergence";
    case SGS_ERR_LOOKUP: return "lookup";
    case SGS_ERR_IO: return "io";
    case SGS_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

sgs_status sgs_config_parse(const char* json_text, sgs_config** out) {
  return guard([&] {
    require_arg(json_text && out, "null argument");
    *out = new sgs_config{sgsample::ExperimentConfig::from_json(json_text)};
  });
}

sgs_status sgs_config_load(const char* path, sgs_config** out) {
  return guard([&] {
    require_arg(path && out, "null argument");
    *out = new sgs_config{sgsample::ExperimentConfig::from_file(path)};
  });
}

sgs_status sgs_config_set_seed(sgs_config* config, uint64_t seed) {
  return guard([&] {
    require_arg(config, "null config");
    config->config.seed = seed;
  });
}

sgs_status sgs_config_set_replicates(sgs_config* config, int replicates) {
  return guard([&] {
    require_arg(config, "null config");
    config->config.replicates = replicates;
  });
}

sgs_status sgs_config_set_threads(sgs_config* config, int threads) {
  return guard([&] {
    require_arg(config, "null config");
    config->config.threads = threads;
  });
}

sgs_status sgs_config_set_output(sgs_config* config, const char* path) {
  return guard([&] {
    require_arg(config && path, "null argument");
    config->config.output = path;
  });
}

sgs_status sgs_config_to_json(const sgs_config* config, char* buf, size_t size, size_t* needed) {
  return guard([&] {
    require_arg(config, "null config");
    const std::string text = config->config.to_json();
    if (needed) *needed = text.size() + 1;
    if (buf && size > text.size()) std::memcpy(buf, text.c_str(), text.size() + 1);
  });
}

void sgs_config_free(sgs_config* config) { delete config; }

sgs_status sgs_run_command(const char* command, const sgs_config* config, const char* out_path) {
  return guard([&] {
    require_arg(command && config, "null argument");
    const sgsample::CsvTable table = sgsample::run_command(command, config->config);
    const std::string path = out_path && *out_path ? out_path : config->config.output;
    if (path.empty()) {
      sgsample::write_csv(std::cout, command, config->config, table);
      std::cout.flush();
      return;
    }
    std::ofstream out(path);
    if (!out) throw sgsample::IoError("cannot open output file '" + path + "'");
    sgsample::write_csv(out, command, config->config, table);
    if (!out) throw sgsample::IoError("failed writing '" + path + "'");
  });
}

sgs_status sgs_kernel_create(int dimension, double smoothness, double lengthscale, double variance,
                             sgs_kernel** out) {
  return guard([&] {
    require_arg(out, "null output");
    sgsample::MaternParams base;
    base.smoothness = smoothness;
    base.lengthscale = lengthscale;
    *out = new sgs_kernel{sgsample::ProductKernel(dimension, base, variance)};
  });
}

sgs_status sgs_kernel_matrix(const sgs_kernel* kernel, const double* a, size_t na, const double* b,
                             size_t nb, double* out) {
  return guard([&] {
    require_arg(kernel && a && b && out, "null argument");
    const auto d = static_cast<size_t>(kernel->kernel.dimension());
    copy_row_major(sgsample::kernel_matrix(kernel->kernel, row_major(a, na, d), row_major(b, nb, d)), out);
  });
}

void sgs_kernel_free(sgs_kernel* kernel) { delete kernel; }

sgs_status sgs_grid_create(int eta, int dimension, double lo, double hi, sgs_grid** out) {
  return guard([&] {
    require_arg(out, "null output");
    auto grid = std::make_shared<const sgsample::SparseGrid>(
        sgsample::build_sparse_grid(eta, dimension, sgsample::Box::cube(dimension, lo, hi)));
    *out = new sgs_grid{std::move(grid)};
  });
}

sgs_status sgs_grid_size(const sgs_grid* grid, size_t* size) {
  return guard([&] {
    require_arg(grid && size, "null argument");
    *size = static_cast<size_t>(grid->grid->size());
  });
}

sgs_status sgs_grid_points(const sgs_grid* grid, double* out) {
  return guard([&] {
    require_arg(grid && out, "null argument");
    copy_row_major(grid->grid->points(), out);
  });
}

void sgs_grid_free(sgs_grid* grid) { delete grid; }

sgs_status sgs_sample_prior(sgs_prior_method method, const sgs_kernel* kernel, const sgs_grid* grid,
                            const double* z, size_t n, uint64_t seed, int n_samples, int n_features,
                            double* out) {
  return guard([&] {
    require_arg(kernel && z && out, "null argument");
    const auto d = static_cast<size_t>(kernel->kernel.dimension());
    const sgsample::PointSet pts = row_major(z, n, d);
    sgsample::SampleBatch batch;
    switch (method) {
      case SGS_PRIOR_CHOLESKY:
        batch = sgsample::sample_prior_cholesky(kernel->kernel, pts, {}, seed, n_samples);
        break;
      case SGS_PRIOR_INSG:
        require_arg(grid, "InSG sampling needs a grid");
        batch = sgsample::sample_prior_insg(kernel->kernel, pts, grid->grid, {}, seed, n_samples);
        break;
      case SGS_PRIOR_RFF:
        batch = sgsample::sample_prior_rff(kernel->kernel, pts, {}, seed, n_features, n_samples);
        break;
      default:
        throw sgsample::InvalidArgumentError("unknown prior method");
    }
    copy_row_major(batch.values, out);
  });
}

sgs_status sgs_w2_gaussian(const double* mean1, const double* cov1, const double* mean2,
                           const double* cov2, size_t dimension, double* distance) {
  return guard([&] {
    require_arg(mean1 && cov1 && mean2 && cov2 && distance, "null argument");
    sgsample::GaussianMoments a, b;
    a.mean = row_major(mean1, dimension, 1);
    b.mean = row_major(mean2, dimension, 1);
    a.covariance = row_major(cov1, dimension, dimension);
    b.covariance = row_major(cov2, dimension, dimension);
    *distance = sgsample::w2_gaussian(a, b).distance;
  });
}

}  // extern "C"
