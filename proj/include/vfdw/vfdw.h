#ifndef VFDW_H
#define VFDW_H

#include <stddef.h>

#if defined(_WIN32)
#define VFDW_API __declspec(dllexport)
#else
#define VFDW_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Nonzero codes other than INVALID_ARGUMENT and INTERNAL name the failing stage. */
typedef enum vfdw_status {
    VFDW_OK = 0,
    VFDW_ERR_CONFIG = 1,
    VFDW_ERR_EXPONENT = 2,
    VFDW_ERR_WEIGHTS = 3,
    VFDW_ERR_ASSEMBLY = 4,
    VFDW_ERR_SOLVE = 5,
    VFDW_ERR_REPORT = 6,
    VFDW_ERR_INVALID_ARGUMENT = 7,
    VFDW_ERR_INTERNAL = 8
} vfdw_status;

typedef struct vfdw_config vfdw_config;
typedef struct vfdw_result vfdw_result;
typedef struct vfdw_exponent vfdw_exponent;

/* Message of the last failure on the calling thread; empty after a success. */
VFDW_API const char* vfdw_last_error(void);
VFDW_API const char* vfdw_status_name(vfdw_status status);
VFDW_API const char* vfdw_version(void);

/* Run configuration. */
VFDW_API vfdw_status vfdw_config_new(vfdw_config** out);
/* JSON text; unknown keys are rejected. */
VFDW_API vfdw_status vfdw_config_parse(const char* text, vfdw_config** out);
/* Keys: command, preset, alpha0, scheme, axis, J, N, N-list, J-list, out-dir, format, threads, rel-tol, abar, n. */
VFDW_API vfdw_status vfdw_config_set(vfdw_config* config, const char* key, const char* value);
/* Runs the configured command and writes its artifacts. */
VFDW_API vfdw_status vfdw_config_execute(const vfdw_config* config, vfdw_result** out);
VFDW_API void vfdw_config_free(vfdw_config* config);

VFDW_API size_t vfdw_result_file_count(const vfdw_result* result);
/* NULL when index is out of range. */
VFDW_API const char* vfdw_result_file(const vfdw_result* result, size_t index);
VFDW_API const char* vfdw_result_summary(const vfdw_result* result);
VFDW_API void vfdw_result_free(vfdw_result* result);

/* Named presets (tables and the transition figure). Out-of-range indices give NULL. */
VFDW_API size_t vfdw_preset_count(void);
VFDW_API const char* vfdw_preset_name(size_t index);
VFDW_API const char* vfdw_preset_description(size_t index);

/* Variable exponents. family: "constant" (alpha0), "poly_offset" (alpha0, c, p),
   "sine_offset" (alpha0, amplitude), "transition" (z1, z2, length). */
VFDW_API vfdw_status vfdw_exponent_new(const char* family, const double* params, size_t param_count, double horizon,
                                       vfdw_exponent** out);
VFDW_API vfdw_status vfdw_exponent_value(const vfdw_exponent* exponent, double t, double* out);
/* Generalized identity function g(t); rel_tol <= 0 selects the default. */
VFDW_API vfdw_status vfdw_exponent_g(const vfdw_exponent* exponent, double t, double rel_tol, double* out);
VFDW_API void vfdw_exponent_free(vfdw_exponent* exponent);

/* Convolution weights chi_0..chi_{n-1}, correction weights omega_0..omega_n, and product-integration
   weights pi_off[0..n-1] (pi_off[0] unused) with diagonal *pi_diag for step tau. */
VFDW_API vfdw_status vfdw_cq_weights(double abar, size_t n, double* chi);
VFDW_API vfdw_status vfdw_correction_weights(double abar, size_t n, double* omega);
VFDW_API vfdw_status vfdw_pi_weights(double abar, double tau, size_t n, double* pi_off, double* pi_diag);

#ifdef __cplusplus
}
#endif

#endif
