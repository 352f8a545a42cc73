/* C interface to the sgsample library. All functions return an sgs_status;
 * on failure sgs_last_error() describes the problem for the calling thread. */
#ifndef SGSAMPLE_C_API_H
#define SGSAMPLE_C_API_H

#include <stddef.h>
#include <stdint.h>

#if defined(SGS_BUILDING_LIBRARY)
#define SGS_API __attribute__((visibility("default")))
#else
#define SGS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sgs_status {
  SGS_OK = 0,
  SGS_ERR_INVALID_ARGUMENT = 1,
  SGS_ERR_INPUT_SHAPE = 2,
  SGS_ERR_INVALID_CONFIG = 3,
  SGS_ERR_NOT_POSITIVE_DEFINITE = 4,
  SGS_ERR_DIVERGENCE = 5,
  SGS_ERR_LOOKUP = 6,
  SGS_ERR_IO = 7,
  SGS_ERR_INTERNAL = 8
} sgs_status;

typedef enum sgs_prior_method {
  SGS_PRIOR_CHOLESKY = 0,
  SGS_PRIOR_INSG = 1,
  SGS_PRIOR_RFF = 2
} sgs_prior_method;

typedef struct sgs_config sgs_config;
typedef struct sgs_kernel sgs_kernel;
typedef struct sgs_grid sgs_grid;

SGS_API const char* sgs_version(void);
SGS_API const char* sgs_last_error(void);
SGS_API const char* sgs_status_name(sgs_status status);

/* Experiment configuration (JSON text). */
SGS_API sgs_status sgs_config_parse(const char* json_text, sgs_config** out);
SGS_API sgs_status sgs_config_load(const char* path, sgs_config** out);
SGS_API sgs_status sgs_config_set_seed(sgs_config* config, uint64_t seed);
SGS_API sgs_status sgs_config_set_replicates(sgs_config* config, int replicates);
SGS_API sgs_status sgs_config_set_threads(sgs_config* config, int threads);
SGS_API sgs_status sgs_config_set_output(sgs_config* config, const char* path);
/* Copies the serialized config into buf (NUL-terminated when it fits); *needed
 * receives the required size including the terminator. */
SGS_API sgs_status sgs_config_to_json(const sgs_config* config, char* buf, size_t size, size_t* needed);
SGS_API void sgs_config_free(sgs_config* config);

/* Runs an experiment command and writes its CSV to out_path, or to the
 * config's output path when out_path is NULL, or to stdout when both are empty. */
SGS_API sgs_status sgs_run_command(const char* command, const sgs_config* config, const char* out_path);

/* Separable Matern kernel with the same base parameters in every dimension. */
SGS_API sgs_status sgs_kernel_create(int dimension, double smoothness, double lengthscale,
                                     double variance, sgs_kernel** out);
/* Kernel matrix K(a, b) in row-major order; a is na x d, b is nb x d, both row-major. */
SGS_API sgs_status sgs_kernel_matrix(const sgs_kernel* kernel, const double* a, size_t na,
                                     const double* b, size_t nb, double* out);
SGS_API void sgs_kernel_free(sgs_kernel* kernel);

/* Sparse grid U(eta, d) over the cube [lo, hi]^d. */
SGS_API sgs_status sgs_grid_create(int eta, int dimension, double lo, double hi, sgs_grid** out);
SGS_API sgs_status sgs_grid_size(const sgs_grid* grid, size_t* size);
/* Writes size x d coordinates in row-major order. */
SGS_API sgs_status sgs_grid_points(const sgs_grid* grid, double* out);
SGS_API void sgs_grid_free(sgs_grid* grid);

/* Prior draws at n row-major points z; out receives n_samples x n values row-major.
 * grid is required for SGS_PRIOR_INSG and ignored otherwise; n_features is used by RFF. */
SGS_API sgs_status sgs_sample_prior(sgs_prior_method method, const sgs_kernel* kernel,
                                    const sgs_grid* grid, const double* z, size_t n,
                                    uint64_t seed, int n_samples, int n_features, double* out);

/* 2-Wasserstein distance between N(mean1, cov1) and N(mean2, cov2); covariances row-major. */
SGS_API sgs_status sgs_w2_gaussian(const double* mean1, const double* cov1, const double* mean2,
                                   const double* cov2, size_t dimension, double* distance);

#ifdef __cplusplus
}
#endif

#endif
