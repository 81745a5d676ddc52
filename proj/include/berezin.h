/* C interface to the berezin library. */
#ifndef BEREZIN_H
#define BEREZIN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define BZ_API __declspec(dllexport)
#else
#define BZ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bz_status {
  BZ_OK = 0,
  BZ_ERR_CONFIG = 1,
  BZ_ERR_DOMAIN = 2,
  BZ_ERR_NUMERICAL = 3,
  BZ_ERR_IO = 4,
  BZ_ERR_INVALID_ARGUMENT = 5,
  BZ_ERR_BUFFER_TOO_SMALL = 6,
  BZ_ERR_INTERNAL = 7
} bz_status;

typedef struct bz_irrep bz_irrep;
typedef struct bz_config bz_config;
typedef struct bz_result bz_result;

/* Message of the last failed call on this thread; never NULL. */
BZ_API const char* bz_last_error(void);
BZ_API const char* bz_status_string(bz_status status);
BZ_API const char* bz_version(void);

/* Root data. labels are Dynkin labels, n_labels must equal rank. */
BZ_API bz_status bz_weyl_dimension(const char* series, int rank, const int* labels, int n_labels,
                                   int k, long long* out);
BZ_API bz_status bz_orbit_dimension(const char* series, int rank, const int* labels, int n_labels,
                                    int* out);

/* Irreducible representation of highest weight k*lambda. */
BZ_API bz_status bz_irrep_build(const char* series, int rank, const int* labels, int n_labels, int k,
                                bz_irrep** out);
BZ_API bz_status bz_irrep_load(const char* path, bz_irrep** out);
BZ_API bz_status bz_irrep_save(const bz_irrep* rep, const char* path);
BZ_API void bz_irrep_free(bz_irrep* rep);
BZ_API bz_status bz_irrep_dimension(const bz_irrep* rep, int* out);
BZ_API bz_status bz_irrep_algebra_dimension(const bz_irrep* rep, int* out);
/* Largest verification residual, dimension check and irreducibility (0/1). */
BZ_API bz_status bz_irrep_verify(const bz_irrep* rep, double* max_residual, int* dimension_match,
                                 int* irreducible);
/* dU(B_b) as row-major interleaved (re, im); capacity counts doubles (2 d^2). */
BZ_API bz_status bz_irrep_generator(const bz_irrep* rep, int b, double* out, size_t capacity);
/* Q(f_X) for f_X(theta) = theta(X), X given on the real basis (n = dim g). */
BZ_API bz_status bz_quantize_linear(const bz_irrep* rep, const double* x, int n, double* out,
                                    size_t capacity);

/* Experiment configuration (JSON, see README). */
BZ_API bz_status bz_config_load(const char* path, bz_config** out);
BZ_API bz_status bz_config_parse(const char* json_text, bz_config** out);
BZ_API bz_status bz_config_default(bz_config** out);
BZ_API void bz_config_free(bz_config* cfg);
BZ_API bz_status bz_config_set_seed(bz_config* cfg, uint64_t seed);
BZ_API bz_status bz_config_set_threads(bz_config* cfg, int threads);
BZ_API bz_status bz_config_set_sign(bz_config* cfg, const char* sign);
BZ_API bz_status bz_config_set_output_dir(bz_config* cfg, const char* dir);
BZ_API bz_status bz_config_set_cache_dir(bz_config* cfg, const char* dir);
BZ_API const char* bz_config_output_dir(const bz_config* cfg);
BZ_API const char* bz_config_cache_dir(const bz_config* cfg);
BZ_API bz_status bz_config_set_xval_samples(bz_config* cfg, long long samples);
/* Canonical JSON of the configuration; valid until the handle changes. */
BZ_API const char* bz_config_json(const bz_config* cfg);

/* Runs. write_files != 0 writes CSV and JSON into the configured output dir. */
BZ_API bz_status bz_run_sweep(const bz_config* cfg, int write_files, bz_result** out);
BZ_API bz_status bz_cross_validate(const bz_config* cfg, bz_result** out);
BZ_API bz_status bz_irrep_report(const bz_config* cfg, bz_result** out);
BZ_API bz_status bz_dims_report(const bz_config* cfg, bz_result** out);

BZ_API const char* bz_result_json(const bz_result* result);
/* CSV text for sweeps, "" otherwise. */
BZ_API const char* bz_result_csv(const bz_result* result);
/* 1 when every acceptance check in the run passed. */
BZ_API int bz_result_pass(const bz_result* result);
BZ_API void bz_result_free(bz_result* result);

#ifdef __cplusplus
}
#endif

#endif
