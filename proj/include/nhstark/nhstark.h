/*
 * C interface to the graded non-Hermitian Stark chain library.
 *
 * Every entry point returns an nhs_status. On failure a thread-local message is
 * available from nhs_last_error(). Handles are opaque and owned by the caller;
 * release them with the matching *_destroy function, which also nulls the
 * handle. Array arguments take an explicit capacity and fail with
 * NHS_ERR_BUFFER_TOO_SMALL rather than writing past it.
 */
#ifndef NHSTARK_H
#define NHSTARK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(NHSTARK_BUILDING_LIBRARY)
#    define NHS_API __declspec(dllexport)
#  else
#    define NHS_API __declspec(dllimport)
#  endif
#else
#  define NHS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nhs_status {
  NHS_OK = 0,
  NHS_ERR_INVALID_ARGUMENT = 1,
  NHS_ERR_DECOUPLED_CHAIN = 2,
  NHS_ERR_GAMMA_POLE = 3,
  NHS_ERR_BRANCH_MISMATCH = 4,
  NHS_ERR_NUMERICAL = 5,
  NHS_ERR_RANK_COLLAPSE = 6,
  NHS_ERR_CONFIG = 7,
  NHS_ERR_IO = 8,
  NHS_ERR_INVALID_HANDLE = 9,
  NHS_ERR_BUFFER_TOO_SMALL = 10,
  NHS_ERR_UNKNOWN = 99
} nhs_status;

typedef enum nhs_branch {
  NHS_BRANCH_OSCILLATORY = 0,
  NHS_BRANCH_CRITICAL = 1,
  NHS_BRANCH_LOCALIZED = 2
} nhs_branch;

typedef enum nhs_vector_kind {
  NHS_VECTOR_TRANSFORMED = 0,
  NHS_VECTOR_RIGHT = 1,
  NHS_VECTOR_LEFT = 2
} nhs_vector_kind;

typedef struct nhs_params {
  int32_t sites;
  double offset;         /* J */
  double nonreciprocity; /* gamma */
  double stark_slope;    /* F1 */
  double hopping_slope;  /* F2 */
} nhs_params;

/* Fields that do not apply to the branch are NaN. */
typedef struct nhs_branch_info {
  double ratio;
  int32_t kind; /* nhs_branch */
  double wavenumber;
  double critical_root;
  double decay_rate;
  double root_re[2];
  double root_im[2];
} nhs_branch_info;

typedef struct nhs_scales {
  double screening;
  double competition;   /* NaN off the localized branch */
  double envelope_peak; /* NaN off the localized branch */
  double threshold_distance;
  double width_size_only;
  double width_with_gamma;
} nhs_scales;

typedef struct nhs_chain_s* nhs_chain;
typedef struct nhs_eigenset_s* nhs_eigenset;

NHS_API const char* nhs_version(void);
NHS_API const char* nhs_status_string(nhs_status status);
NHS_API const char* nhs_last_error(void);

NHS_API nhs_status nhs_chain_create(const nhs_params* params, nhs_chain* out);
NHS_API nhs_status nhs_chain_destroy(nhs_chain* chain);
NHS_API nhs_status nhs_chain_sites(nhs_chain chain, int32_t* sites);

/* Row-major N*N one-body matrix. */
NHS_API nhs_status nhs_chain_hamiltonian(nhs_chain chain, double* out, size_t capacity);

/* 1-based bond labels with t^L t^R <= 0; *count receives the total. */
NHS_API nhs_status nhs_chain_decoupling_bonds(nhs_chain chain, int32_t* out, size_t capacity,
                                              size_t* count);

/* ln d_j for j = 1..N; closed_form selects the log-Gamma route. */
NHS_API nhs_status nhs_chain_log_gauge(nhs_chain chain, int32_t closed_form, double* log_factor,
                                       size_t capacity, double* exponent);

/* Symmetric couplings of the transformed chain (N - 1 values). */
NHS_API nhs_status nhs_chain_transformed_couplings(nhs_chain chain, double* out,
                                                   size_t capacity);

NHS_API nhs_status nhs_classify(const nhs_params* params, double tolerance,
                                nhs_branch_info* branch, nhs_scales* scales);

NHS_API nhs_status nhs_eigensolve(nhs_chain chain, nhs_eigenset* out);
NHS_API nhs_status nhs_eigenset_destroy(nhs_eigenset* eigs);
NHS_API nhs_status nhs_eigenset_energies(nhs_eigenset eigs, double* out, size_t capacity);
NHS_API nhs_status nhs_eigenset_vector(nhs_eigenset eigs, int32_t index, int32_t kind,
                                       double* out, size_t capacity);
/* Per-state center of mass, IPR and edge polarization (N values each). */
NHS_API nhs_status nhs_eigenset_diagnostics(nhs_eigenset eigs, double* center, double* ipr,
                                            double* polarization, size_t capacity);
NHS_API nhs_status nhs_eigenset_summary(nhs_eigenset eigs, double fraction,
                                        double* mean_polarization, double* ipr_top);

/* Half-chain entropy after a quench from the charge-density wave. Writes
 * round(t_max/dt) + 1 samples; *count receives the sample count. */
NHS_API nhs_status nhs_entropy_trace(nhs_chain chain, double t_max, double dt,
                                     int32_t restabilize_every, double* times, double* entropy,
                                     size_t capacity, size_t* count);

/* Runs a CLI command. config_path may be NULL; overrides holds `key = value`
 * lines applied after the file. On success *summary_json receives a
 * heap-allocated JSON document to be released with nhs_string_free. */
NHS_API nhs_status nhs_run(const char* command, const char* config_path, const char* overrides,
                           const char* output_dir, int32_t threads, char** summary_json);

/* Regenerates fig1, fig2 or fig3 and writes a hashed manifest. */
NHS_API nhs_status nhs_reproduce(const char* figure, const char* output_dir, int32_t threads,
                                 char** summary_json);

NHS_API void nhs_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* NHSTARK_H */
