/* C API of the GFM transient-stability toolkit.
 *
 * Opaque handles + status codes; every function is safe to call from C.
 * Status codes match the CLI exit-code contract: 0 ok, 2 config error,
 * 3 simulation error, 4 degenerate analysis case.
 */
#ifndef GFMTS_C_API_H
#define GFMTS_C_API_H

#include <stddef.h>

#if defined(_WIN32)
#define GFMTS_API __declspec(dllexport)
#else
#define GFMTS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct gfmts_config gfmts_config;

typedef enum gfmts_status {
    GFMTS_OK = 0,
    GFMTS_ERR_CONFIG = 2,
    GFMTS_ERR_SIM = 3,
    GFMTS_ERR_DEGENERATE = 4,
    GFMTS_ERR_BAD_ARG = 5,
} gfmts_status;

GFMTS_API const char* gfmts_version(void);
GFMTS_API const char* gfmts_status_name(gfmts_status status);

/* Configuration ---------------------------------------------------- */

GFMTS_API gfmts_status gfmts_config_load(const char* path, gfmts_config** out,
                                         char* errbuf, size_t errlen);
GFMTS_API gfmts_status gfmts_config_parse(const char* text, gfmts_config** out,
                                          char* errbuf, size_t errlen);
GFMTS_API gfmts_status gfmts_config_default(gfmts_config** out);
GFMTS_API void gfmts_config_free(gfmts_config* config);

/* Baseline scenario file text (the Table-I defaults). Returns the number
 * of bytes that would be written; truncates to buflen-1 and always
 * NUL-terminates when buf is non-NULL. */
GFMTS_API size_t gfmts_config_defaults_text(char* buf, size_t buflen);

/* Experiments -------------------------------------------------------
 * Each runner writes its CSV outputs under out_dir and fills `summary`
 * with a short human-readable report (NUL-terminated, truncated to
 * summarylen-1). */

GFMTS_API gfmts_status gfmts_run_simulate(const gfmts_config* config, const char* out_dir,
                                          char* summary, size_t summarylen);

GFMTS_API gfmts_status gfmts_run_landmarks(const gfmts_config* config, char* summary,
                                           size_t summarylen);

/* strategies: comma-separated list (original,freq_bound,compensation,cl0,mpc).
 * tol_s <= 0 selects the configured bisection tolerance. */
GFMTS_API gfmts_status gfmts_run_cct(const gfmts_config* config, const char* strategies,
                                     double tol_s, const char* out_dir, char* summary,
                                     size_t summarylen);

/* theta_points <= 0 selects the configured grid resolution. */
GFMTS_API gfmts_status gfmts_run_doa(const gfmts_config* config, const char* strategy,
                                     int theta_points, const char* out_dir, char* summary,
                                     size_t summarylen);

/* kind: fault_voltage | reference_power | horizon | impedance_error */
GFMTS_API gfmts_status gfmts_run_sweep(const gfmts_config* config, const char* kind,
                                       const char* out_dir, char* summary, size_t summarylen);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* GFMTS_C_API_H */
