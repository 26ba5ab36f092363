/* C interface to the network design game library. All functions are
 * reentrant on distinct handles; error text is kept per thread. */
#ifndef NDG_NDG_H
#define NDG_NDG_H

#include <stddef.h>

#if defined(_WIN32)
#define NDG_API __declspec(dllexport)
#else
#define NDG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ndg_status {
  NDG_OK = 0,
  NDG_INPUT_ERROR = 1,
  NDG_NONCONVERGENCE = 2,
  NDG_INTERNAL_ERROR = 3
} ndg_status;

typedef struct ndg_scenario ndg_scenario;

NDG_API const char* ndg_version(void);
/* Message of the last failed call on this thread, "" if none. */
NDG_API const char* ndg_last_error(void);

/* Process-wide settings. Levels: trace, debug, info, warn, error, off. */
NDG_API ndg_status ndg_set_threads(unsigned threads);
NDG_API ndg_status ndg_set_log_level(const char* level);
/* When non-zero, manifests record wall-clock seconds (breaks byte equality). */
NDG_API ndg_status ndg_set_timing(int enabled);

NDG_API ndg_status ndg_scenario_load(const char* path, ndg_scenario** out);
NDG_API void ndg_scenario_free(ndg_scenario* s);
NDG_API ndg_status ndg_scenario_operator_count(const ndg_scenario* s, size_t* out);

/* Diagnostics as text, one per line ("error|warning <code>: <message>").
 * Either a scenario or a network path is required; demand is optional.
 * Release *report with ndg_string_free. */
NDG_API ndg_status ndg_validate(const char* scenario_path, const char* network_path,
                                const char* demand_path, size_t* errors, size_t* warnings,
                                char** report);
NDG_API void ndg_string_free(char* s);

/* Each command writes its CSV reports and manifest.json into out_dir.
 * betas may be NULL to use the scenario's first-year schedule. */
NDG_API ndg_status ndg_solve_ne(ndg_scenario* s, const double* betas, size_t n,
                                const char* out_dir);
NDG_API ndg_status ndg_co_invest(ndg_scenario* s, const double* betas, size_t n,
                                 const char* out_dir);
/* weights_mode: "symmetric", "contribution" or NULL (scenario setting);
 * epsilon: n flags or NULL (scenario setting). */
NDG_API ndg_status ndg_share_payoff(ndg_scenario* s, const double* betas, size_t n,
                                    const char* weights_mode, const int* epsilon,
                                    const char* out_dir);
/* Grid lo:hi:step. vary_operator NULL ties all betas to the grid value,
 * otherwise only that operator's beta moves. */
NDG_API ndg_status ndg_sweep_cir(ndg_scenario* s, double lo, double hi, double step,
                                 const char* vary_operator, double mgr_threshold,
                                 const char* out_dir);
NDG_API ndg_status ndg_run_scenario(ndg_scenario* s, const char* out_dir);
/* state_path may be NULL (existing network configuration). */
NDG_API ndg_status ndg_ue_assign(const char* network_path, const char* demand_path,
                                 const char* state_path, double gap_tol, size_t max_iters,
                                 const char* out_dir);

/* Logit share of the PT option. */
NDG_API double ndg_mode_share(double u_pt, double u_alt);
/* Weighted Nash bargaining over `shareable`; q receives n allocations.
 * *feasible is 0 when no individually rational allocation exists. */
NDG_API ndg_status ndg_nash_bargain(size_t n, const double* kept, double shareable,
                                    const double* disagreement, const double* weights,
                                    double* q, int* feasible);

#ifdef __cplusplus
}
#endif

#endif
