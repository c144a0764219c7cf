#ifndef SQZ_SQZ_H
#define SQZ_SQZ_H

#include <stddef.h>
#include <stdint.h>

#if defined(SQZ_BUILDING_LIBRARY)
#define SQZ_API __attribute__((visibility("default")))
#else
#define SQZ_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sqz_status {
    SQZ_OK = 0,
    SQZ_ERR_DOMAIN = 1,
    SQZ_ERR_COVERAGE = 2,
    SQZ_ERR_CONVERGENCE = 3,
    SQZ_ERR_BOUNDARY = 4,
    SQZ_ERR_PARSE = 5,
    SQZ_ERR_INVARIANT = 6,
    SQZ_ERR_IO = 7,
    SQZ_ERR_VERIFICATION = 8,
    SQZ_ERR_ARGUMENT = 9,
    SQZ_ERR_INTERNAL = 10
} sqz_status;

/* Message of the last failed call on this thread; never NULL. */
SQZ_API const char* sqz_last_error(void);
SQZ_API const char* sqz_version(void);

typedef struct sqz_oscillator {
    double mass;
    double omega;
    double hbar;
} sqz_oscillator;

typedef struct sqz_moments {
    double mean_x;
    double mean_p;
    double var_x;
    double var_p;
    double cov_xp;
    double uncertainty_product;
} sqz_moments;

/* ---- Gaussian states --------------------------------------------------- */

typedef struct sqz_state sqz_state;

/* sigma_a = 0 gives a pure state; sigma_a > 0 a displacement-averaged mixture
   centered on (X_amp, phi_c). */
SQZ_API sqz_status sqz_state_create(const sqz_oscillator* osc, double A0, double dA, double phi_sq,
                                    double X_amp, double phi_c, double sigma_a, sqz_state** out);
/* Pure state whose t = 0 wavefunction is exp(-x^2 / 4D), centered at rest. */
SQZ_API sqz_status sqz_state_from_initial_variance(const sqz_oscillator* osc, double D,
                                                   sqz_state** out);
SQZ_API void sqz_state_free(sqz_state* s);

SQZ_API sqz_status sqz_state_purity_product(const sqz_state* s, double* P);
SQZ_API sqz_status sqz_state_shape(const sqz_state* s, double t, double* A, double* B, double* x_c,
                                   double* p_c);
/* Pure states only. */
SQZ_API sqz_status sqz_state_phase(const sqz_state* s, double t, double* phi);
SQZ_API sqz_status sqz_state_default_grid(const sqz_state* s, size_t n_points, double* x_min,
                                          double* x_max);

/* `re`/`im` hold n_points values. Pure states only. */
SQZ_API sqz_status sqz_state_wavefunction(const sqz_state* s, double x_min, double x_max,
                                          size_t n_points, double t, double* re, double* im);
/* `re`/`im` hold n_points^2 values, row-major. */
SQZ_API sqz_status sqz_state_density(const sqz_state* s, double x_min, double x_max,
                                     size_t n_points, double t, double* re, double* im);
SQZ_API sqz_status sqz_state_moments(const sqz_state* s, double x_min, double x_max,
                                     size_t n_points, double t, sqz_moments* out);
SQZ_API sqz_status sqz_state_schrodinger_residual(const sqz_state* s, double x_min, double x_max,
                                                  size_t n_points, double t, double* residual);

/* ---- Scenario files ---------------------------------------------------- */

typedef struct sqz_scenario_set sqz_scenario_set;

SQZ_API sqz_status sqz_scenarios_load(const char* path, sqz_scenario_set** out);
SQZ_API sqz_status sqz_scenarios_parse(const char* json_text, sqz_scenario_set** out);
SQZ_API void sqz_scenarios_free(sqz_scenario_set* set);
SQZ_API size_t sqz_scenarios_size(const sqz_scenario_set* set);
SQZ_API const char* sqz_scenarios_name(const sqz_scenario_set* set, size_t index);
/* 1 when the scenario is Monte Carlo driven, else 0. */
SQZ_API int sqz_scenarios_uses_monte_carlo(const sqz_scenario_set* set);

/* Writes requested products into out_dir. verify != 0 adds verification.
   Returns the first pipeline error, else SQZ_ERR_VERIFICATION when a check
   failed, else SQZ_OK. The text report is kept on the set. */
SQZ_API sqz_status sqz_scenarios_run(sqz_scenario_set* set, const char* out_dir, uint64_t seed,
                                     int verify);
SQZ_API const char* sqz_scenarios_report(const sqz_scenario_set* set);

/* Writes every scenario's density at time t to out_dir/<name>.density.txt. */
SQZ_API sqz_status sqz_scenarios_dump_density(sqz_scenario_set* set, const char* out_dir, double t);

/* Reads a density dump and returns its n_points and trace. */
SQZ_API sqz_status sqz_density_dump_trace(const char* path, size_t* n_points, double* trace_re,
                                          double* trace_im);

#ifdef __cplusplus
}
#endif

#endif
