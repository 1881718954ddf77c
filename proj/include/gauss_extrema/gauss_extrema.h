#ifndef GAUSS_EXTREMA_H
#define GAUSS_EXTREMA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define GX_API __declspec(dllexport)
#else
#define GX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gx_status {
    GX_OK = 0,
    GX_ERR_INTERNAL = 1,
    GX_ERR_CONFIG = 2,
    GX_ERR_INFEASIBLE = 3,
    GX_ERR_DOMAIN = 4,
    GX_ERR_ARGUMENT = 5, /* null handle or pointer */
    GX_ERR_IO = 6
} gx_status;

typedef struct gx_context gx_context;
typedef struct gx_report gx_report;

/* Run overrides; unset fields keep the config values. */
typedef struct gx_overrides {
    const char* kind; /* NULL: any; otherwise the config kind must match */
    int has_seed;
    uint64_t seed;
    int has_workers;
    unsigned workers;
    const char* out_path; /* NULL: keep */
    const char* format;   /* "csv" | "json" | NULL */
} gx_overrides;

GX_API const char* gx_version(void);
GX_API const char* gx_status_name(gx_status s);

GX_API gx_status gx_context_create(gx_context** out);
GX_API void gx_context_destroy(gx_context* ctx);
/* Message of the last failed call on this context; "" if none. */
GX_API const char* gx_last_error(const gx_context* ctx);

/* Parse and run an experiment config. On success *out owns the report. */
GX_API gx_status gx_run_config_text(gx_context* ctx, const char* json_text, const gx_overrides* ov, gx_report** out);
GX_API gx_status gx_run_config_file(gx_context* ctx, const char* path, const gx_overrides* ov, gx_report** out);

GX_API void gx_report_destroy(gx_report* r);
GX_API size_t gx_report_rows(const gx_report* r);
GX_API size_t gx_report_columns(const gx_report* r);
GX_API const char* gx_report_column_name(const gx_report* r, size_t col);
/* Numeric cell; GX_ERR_DOMAIN for text or empty cells. */
GX_API gx_status gx_report_value(const gx_report* r, size_t row, size_t col, double* out);
/* Text of a cell as written to CSV, without quoting. Valid until the report is destroyed. */
GX_API const char* gx_report_text(const gx_report* r, size_t row, size_t col);
GX_API size_t gx_report_note_count(const gx_report* r);
GX_API const char* gx_report_note(const gx_report* r, size_t i);
/* Output path and format requested by the config (after overrides); path may be "". */
GX_API const char* gx_report_out_path(const gx_report* r);
GX_API const char* gx_report_format(const gx_report* r);
/* Rendered report in the requested format. Valid until the report is destroyed. */
GX_API const char* gx_report_render(const gx_report* r);
/* Writes the rendered report to path ("" or NULL: the configured output path). */
GX_API gx_status gx_report_write(gx_context* ctx, const gx_report* r, const char* path);

/* Numeric entry points. */
GX_API gx_status gx_fbm_covariance(gx_context* ctx, double t, double s, double hurst, double* out);
GX_API gx_status gx_psi_normal_survival(gx_context* ctx, double u, double* out);
GX_API gx_status gx_constant_C(gx_context* ctx, double hurst, double lambda1, double lambda2, double* out);
/* psi(u) for B_H(t) - c t with a given Pickands constant. */
GX_API gx_status gx_corollary_psi(gx_context* ctx, double hurst, double c, double u, double pickands, int asymptotic_psi,
                                  double* out);
GX_API gx_status gx_stable_tail_constant(gx_context* ctx, double alpha, double t, double* out);
/* int_0^inf mu((v c + a, inf]) dv for the limit measure of (p1 T, p2 T), P(T > x) ~ x^-lambda.
   norm: 0 = L1, 1 = max. */
GX_API gx_status gx_integral_mu_comonotone(gx_context* ctx, const double p[2], const double c[2], const double a[2],
                                           double lambda, int norm, double* out);
/* Pickands constant estimate for standard fBm (no cache). */
GX_API gx_status gx_pickands_estimate(gx_context* ctx, double hurst, double t_max, double delta, uint64_t n_reps,
                                      uint64_t seed, unsigned workers, double* estimate, double* std_error);

#ifdef __cplusplus
}
#endif

#endif
