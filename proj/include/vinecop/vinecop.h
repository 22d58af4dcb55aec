/* C interface to the vinecop library. Every function returns a vc_status;
 * on failure vc_last_error() describes the problem (thread-local). Strings
 * returned through char** are owned by the caller and released with
 * vc_string_free. */
#ifndef VINECOP_VINECOP_H
#define VINECOP_VINECOP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define VC_API __declspec(dllexport)
#else
#define VC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vc_status {
  VC_OK = 0,
  VC_ERR_INVALID_ARGUMENT = 1,
  VC_ERR_DOMAIN = 2,
  VC_ERR_IO = 3,
  VC_ERR_PARSE = 4,
  VC_ERR_SCHEMA = 5,
  VC_ERR_NON_FINITE = 6,
  VC_ERR_UNDEFINED = 7,
  VC_ERR_CONFIG = 8,
  VC_ERR_INTERNAL = 99
} vc_status;

typedef struct vc_data vc_data;
typedef struct vc_model vc_model;
typedef struct vc_extract_result vc_extract_result;

VC_API const char* vc_version(void);
VC_API const char* vc_last_error(void);
VC_API void vc_string_free(char* s);

/* ---- data matrices ---------------------------------------------------- */

/* values is row-major rows x cols; copula_scale marks entries as uniforms. */
VC_API vc_status vc_data_create(size_t rows, size_t cols, const char* const* names,
                                const double* values, int copula_scale, vc_data** out);
/* columns may be NULL (all columns) or a list of ncolumns names. */
VC_API vc_status vc_data_read_csv(const char* path, const char* const* columns, size_t ncolumns,
                                  vc_data** out);
VC_API vc_status vc_data_write_csv(const vc_data* data, const char* path);
VC_API vc_status vc_data_to_csv(const vc_data* data, char** out);
VC_API size_t vc_data_rows(const vc_data* data);
VC_API size_t vc_data_cols(const vc_data* data);
/* Borrowed pointer, valid while data lives. */
VC_API const char* vc_data_name(const vc_data* data, size_t column);
/* Copies rows x cols values into out (row-major). */
VC_API vc_status vc_data_values(const vc_data* data, double* out);
VC_API int vc_data_is_copula_scale(const vc_data* data);
VC_API void vc_data_set_copula_scale(vc_data* data, int copula_scale);
/* Uniform noise on [-0.5, 0.5] added to one column. */
VC_API vc_status vc_data_jitter(vc_data* data, const char* column, uint64_t seed);
VC_API void vc_data_free(vc_data* data);

/* ---- rank statistics -------------------------------------------------- */

VC_API vc_status vc_kendall_tau(const double* x, const double* y, size_t n, double* out);
VC_API vc_status vc_spearman_rho(const double* x, const double* y, size_t n, double* out);
/* kind 0: Kendall's tau, 1: Spearman's rho. out receives cols x cols values. */
VC_API vc_status vc_correlation(const vc_data* data, int kind, unsigned threads, double* out);
/* Two-decimal table, tau below and rho above the diagonal. */
VC_API vc_status vc_rank_table(const vc_data* data, unsigned threads, char** out);

/* ---- pair copulas ----------------------------------------------------- */

/* family: name such as "Clayton"; rotation in degrees. which selects
 * 1: dC/du1 or 2: dC/du2 for the conditional functions. */
VC_API vc_status vc_pair_cdf(const char* family, int rotation, const double* params,
                             size_t nparams, double u1, double u2, double* out);
VC_API vc_status vc_pair_pdf(const char* family, int rotation, const double* params,
                             size_t nparams, double u1, double u2, double* out);
VC_API vc_status vc_pair_hfunc(const char* family, int rotation, const double* params,
                               size_t nparams, int which, double u1, double u2, double* out);
/* which 1: solves hfunc1(given, x) = p for x; 2: solves hfunc2(x, given) = p. */
VC_API vc_status vc_pair_hinv(const char* family, int rotation, const double* params,
                              size_t nparams, int which, double p, double given, double* out);
VC_API vc_status vc_pair_tau(const char* family, int rotation, const double* params,
                             size_t nparams, double* out);

/* ---- vine models ------------------------------------------------------ */

typedef struct vc_fit_options {
  const char* families;  /* comma-separated family names; NULL for all */
  const char* criterion; /* "aic", "bic" or "loglik"; NULL for aic */
  size_t truncation;     /* 0 fits every tree */
  int signed_tau;        /* nonzero: weights are tau instead of |tau| */
  unsigned threads;
} vc_fit_options;

VC_API void vc_fit_options_init(vc_fit_options* options);
/* Data-scale input gets empirical marginals; copula-scale input is used as is. */
VC_API vc_status vc_fit(const vc_data* data, const vc_fit_options* options, vc_model** out);
VC_API vc_status vc_model_load(const char* path, vc_model** out);
VC_API vc_status vc_model_from_json(const char* json, vc_model** out);
VC_API vc_status vc_model_save(const vc_model* model, const char* path);
VC_API vc_status vc_model_to_json(const vc_model* model, char** out);
/* Human-readable edge list with families, parameters and tau. */
VC_API vc_status vc_model_summary(const vc_model* model, char** out);
VC_API size_t vc_model_dim(const vc_model* model);
/* Borrowed pointer, valid while model lives. */
VC_API const char* vc_model_name(const vc_model* model, size_t variable);
VC_API int vc_model_has_marginals(const vc_model* model);
VC_API void vc_model_free(vc_model* model);

VC_API vc_status vc_sample(const vc_model* model, size_t n, uint64_t seed, unsigned threads,
                           int copula_scale, vc_data** out);
/* out receives one value per row. clamped_rows (may be NULL) counts rows
 * clamped into the marginal sample range. */
VC_API vc_status vc_log_density(const vc_model* model, const vc_data* points, int copula_scale,
                                unsigned threads, double* out, size_t* clamped_rows);
VC_API vc_status vc_rosenblatt(const vc_model* model, const vc_data* points, int inverse,
                               unsigned threads, vc_data** out);

/* ---- trajectory extraction -------------------------------------------- */

typedef struct vc_extract_options {
  const char* config_path;  /* required geometry config */
  double radius;            /* > 0 overrides the config */
  double standstill_speed;  /* > 0 overrides the config */
  int standstill_frames;    /* > 0 overrides the config */
  int waittime_total;       /* nonzero: per-track total instead of running */
  unsigned threads;
} vc_extract_options;

VC_API void vc_extract_options_init(vc_extract_options* options);
/* Fails only on fatal problems; per-recording failures are listed in the result. */
VC_API vc_status vc_extract(const char* const* inputs, size_t ninputs,
                            const vc_extract_options* options, vc_extract_result** out);
VC_API size_t vc_extract_rows(const vc_extract_result* result);
/* Recordings processed without error. */
VC_API size_t vc_extract_recordings(const vc_extract_result* result);
VC_API size_t vc_extract_error_count(const vc_extract_result* result);
VC_API const char* vc_extract_error(const vc_extract_result* result, size_t i);
VC_API vc_status vc_extract_to_csv(const vc_extract_result* result, char** out);
VC_API vc_status vc_extract_write_csv(const vc_extract_result* result, const char* path);
/* VelCar, TrafficCar, WaitTime, DistCar. */
VC_API vc_status vc_extract_data(const vc_extract_result* result, vc_data** out);
VC_API void vc_extract_free(vc_extract_result* result);

/* ---- plots ------------------------------------------------------------ */

/* Scatter-matrix SVG of points over an optional overlay (may be NULL). */
VC_API vc_status vc_scatter_svg(const vc_data* points, const vc_data* overlay, char** out);

#ifdef __cplusplus
}
#endif

#endif /* VINECOP_VINECOP_H */
