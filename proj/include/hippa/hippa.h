#ifndef HIPPA_H
#define HIPPA_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define HIPPA_API __declspec(dllexport)
#else
#define HIPPA_API __attribute__((visibility("default")))
#endif

/* Values mirror hippa::ErrorCode. */
typedef enum hippa_status {
  HIPPA_OK = 0,
  HIPPA_MISSING_SUBGRADIENT,
  HIPPA_NON_FINITE_INPUT,
  HIPPA_MISSING_MINIMIZER,
  HIPPA_INVALID_CERTIFICATE,
  HIPPA_GAMMA_ZERO_FOR_GROWTH,
  HIPPA_BAD_PARAMETER,
  HIPPA_CENTER_MISMATCH,
  HIPPA_RANK_DEFICIENT,
  HIPPA_RANGE_VIOLATION,
  HIPPA_OUT_OF_DOMAIN,
  HIPPA_INNER_BUDGET_EXHAUSTED,
  HIPPA_NON_FINITE_OBJECTIVE,
  HIPPA_UNSUPPORTED_ATOM,
  HIPPA_RANK_DEFICIENT_DATA,
  HIPPA_EMPTY_REGION,
  HIPPA_INSUFFICIENT_TRACE,
  HIPPA_RADIUS_REQUIRED,
  HIPPA_UNKNOWN_ENTRY,
  HIPPA_CONFIG_PARSE,
  HIPPA_IO_ERROR,
  HIPPA_INTERNAL
} hippa_status;

typedef struct hippa_entry hippa_entry;
typedef struct hippa_trace hippa_trace;

HIPPA_API const char* hippa_version(void);
HIPPA_API const char* hippa_status_name(hippa_status status);
/* Message of the last failing call on this thread; empty after a success. */
HIPPA_API const char* hippa_last_error(void);
/* Releases strings returned through char** out-parameters. */
HIPPA_API void hippa_string_free(char* text);

/* JSON array of zoo entry ids. */
HIPPA_API hippa_status hippa_zoo_list(char** ids_json);

/* options_json: flat object of numeric entry options, or NULL. */
HIPPA_API hippa_status hippa_entry_create(const char* id, const char* options_json, hippa_entry** out);
HIPPA_API void hippa_entry_destroy(hippa_entry* entry);
HIPPA_API hippa_status hippa_entry_dim(const hippa_entry* entry, size_t* dim);
HIPPA_API hippa_status hippa_entry_info(const hippa_entry* entry, char** info_json);
/* subgradient may be NULL; otherwise it receives n values. */
HIPPA_API hippa_status hippa_entry_evaluate(const hippa_entry* entry, const double* x, size_t n, double* value,
                                            double* subgradient);
HIPPA_API hippa_status hippa_entry_start(const hippa_entry* entry, uint64_t seed, double* x, size_t n);

/* property: definition, first_order, quadratic_growth, pl, error_bound_value, error_bound_subgrad.
   options_json keys: samples, seed, tolerance, lambda_grid, radius. *all_expected is 1 when the declared
   certificate passes and every negative certificate is refuted. */
HIPPA_API hippa_status hippa_verify(const hippa_entry* entry, const char* property, const char* options_json,
                                    char** report_json, int* all_expected);

/* config_json: method object as in experiment files (p, beta, inner_tol, eps_step, max_iters, ...). */
HIPPA_API hippa_status hippa_run_hippa(const hippa_entry* entry, const double* x0, size_t n, const char* config_json,
                                       hippa_trace** out);
HIPPA_API void hippa_trace_destroy(hippa_trace* trace);
HIPPA_API hippa_status hippa_trace_length(const hippa_trace* trace, size_t* length);
HIPPA_API hippa_status hippa_trace_write_csv(const hippa_trace* trace, const char* path);
HIPPA_API hippa_status hippa_trace_terminated_by(const hippa_trace* trace, const char** name);

/* Runs every method of a JSON experiment file; artifacts_json lists written paths. */
HIPPA_API hippa_status hippa_run_experiment(const char* config_path, char** artifacts_json, int* all_checks_pass);

/* options_json keys: p, beta, beta_upper, h_star, radius, eps, inner_tol, eps_step. */
HIPPA_API hippa_status hippa_rates_from_csv(const char* csv_path, const char* certificate_json,
                                            const char* options_json, char** report_json, int* all_pass);

#ifdef __cplusplus
}
#endif

#endif
