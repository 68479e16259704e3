#ifndef EPSTEINLAB_H
#define EPSTEINLAB_H

/* C interface to the epsteinlab core.
 *
 * Conventions:
 *   - Every function returns el_status; EL_OK means the output parameters are
 *     valid. On any other status the outputs are untouched and
 *     el_last_error() returns a thread-local message for the failing call.
 *   - Complex numbers pass as (re, im) pairs of doubles.
 *   - Objects returned through el_*_parse/load are owned by the caller and
 *     released with the matching el_*_free. Strings returned through char**
 *     are released with el_string_free.
 */

#include <stddef.h>

#if defined(_WIN32)
#define EL_API __declspec(dllexport)
#else
#define EL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum el_status {
    EL_OK = 0,
    EL_ERR_BAD_ARG = 1,
    EL_ERR_PARSE = 2,
    EL_ERR_DOMAIN = 3,          /* point outside the scene or branch cut */
    EL_ERR_CRITICAL_POINT = 4,  /* vanishing derivative */
    EL_ERR_DEGENERATE = 5,      /* immersion or flow map degenerates */
    EL_ERR_UNSUPPORTED = 6,     /* operation undefined for this scene kind */
    EL_ERR_NONCONVERGED = 7,
    EL_ERR_EXCLUDED_REGION = 8, /* probe in the bending region */
    EL_ERR_GAUGE = 9,           /* flow time outside the valid range */
    EL_ERR_IO = 10,
    EL_ERR_INTERNAL = 11
} el_status;

/* Stable name of a status value, e.g. "EL_ERR_PARSE". */
EL_API const char* el_status_name(el_status s);

/* Message of the most recent failure on this thread ("" if none). */
EL_API const char* el_last_error(void);

/* Frees strings returned by this library through char** outputs. */
EL_API void el_string_free(char* s);

/* ------------------------------------------------------------------------ */
/* Holomorphic expressions.                                                  */

typedef struct el_expr el_expr;

/* Parses an expression such as "compose(koebe, affine(0.5, 0))".
 * Vocabulary: identity, constant(c), affine(a, b), mobius(a, b, c, d),
 * power(n), rpow(alpha), exp, log, koebe, sum(...), product(...),
 * compose(...). Scalars accept complex literals like 1.5, -2i, 1+2i. */
EL_API el_status el_expr_parse(const char* text, el_expr** out);
EL_API void el_expr_free(el_expr* e);

/* 3-jet of the expression at z: out = {f_re, f_im, f'_re, f'_im,
 * f''_re, f''_im, f'''_re, f'''_im}. */
EL_API el_status el_expr_jet(const el_expr* e, double z_re, double z_im,
                             double out[8]);

/* Schwarzian derivative at z: out = {re, im}. */
EL_API el_status el_expr_schwarzian(const el_expr* e, double z_re, double z_im,
                                    double out[2]);

/* Scans |S(f)|(1-|z|^2)^2/4 on a polar grid over the disk of radius rmax
 * (0 < rmax < 1). Outputs the grid supremum, its location, and whether the
 * supremum stays within the univalence bound 3/2 (tolerance 1e-9). */
EL_API el_status el_expr_nehari_scan(const el_expr* e, int nr, int ntheta,
                                     double rmax, double* sup,
                                     double argmax[2], int* within_bound);

/* ------------------------------------------------------------------------ */
/* Domain scenes.                                                            */

typedef struct el_scene el_scene;

/* Parses scene JSON, either bare or wrapped in {"domain": {...}}. Types:
 * "round-disk" {"c":[x,y],"r":r}, "half-plane" {"normal":[x,y],"offset":d},
 * "disk-union" {"disks":[{"c":..,"r":..}, ...]}, "image-domain"
 * {"expr":"..."} with the expression vocabulary above. */
EL_API el_status el_scene_parse(const char* json_text, el_scene** out);
EL_API el_status el_scene_load(const char* path, el_scene** out);
EL_API void el_scene_free(el_scene* s);

/* Intrinsic hyperbolic density 2-jet at z (for image domains z is the disk
 * parameter): out = {u, u_z_re, u_z_im, u_zz_re, u_zz_im, u_zzbar}. */
EL_API el_status el_scene_density(const el_scene* s, double z_re, double z_im,
                                  double out[6]);

/* Projective (maximal-disk) density at z: out = {c_re, c_im, r, density}.
 * Half-plane scenes report r as +inf. */
EL_API el_status el_scene_projective(const el_scene* s, double z_re,
                                     double z_im, double out[4]);

/* Conformal factors of the intrinsic and projective metrics at z:
 * out = {rho_hyp, rho_proj, ratio}. */
EL_API el_status el_scene_metric_compare(const el_scene* s, double z_re,
                                         double z_im, double out[3]);

/* Point of the flowed surface over z at time t: out = {x_re, x_im, height}. */
EL_API el_status el_scene_epstein(const el_scene* s, double z_re, double z_im,
                                  double t, double out[3]);

/* Principal curvatures (shape-operator eigenvalues, ascending) of the flowed
 * surface at chart parameter z, time t: out = {eig1, eig2}. */
EL_API el_status el_scene_shape(const el_scene* s, double z_re, double z_im,
                                double t, double out[2]);

/* Residuals of the frame identities between times s_time and t_time:
 * out = {res_metric_conjugation, res_flow_moebius, res_metric_reconstruction,
 *        res_inf_scaling, res_area_ratio, res_gauss, res_flow_distance,
 *        eig1_of_B_t} (eig2 is recovered from el_scene_shape). */
EL_API el_status el_scene_identity_residuals(const el_scene* s, double z_re,
                                             double z_im, double s_time,
                                             double t_time, double out[8]);

/* Dome probe for disk-union scenes:
 * out = {disk_c_re, disk_c_im, disk_r, density, matched_index, x_re, x_im,
 *        hemisphere_residual}. Probes in the bending region return
 * EL_ERR_EXCLUDED_REGION. */
EL_API el_status el_scene_dome_probe(const el_scene* s, double z_re,
                                     double z_im, double out[8]);

/* ------------------------------------------------------------------------ */
/* Descriptor bounds. chi must be even and <= -2; norms nonnegative.         */

/* out = {sharp, coarse}: (1/2) log(1 + L/(2 pi |chi|)) pi |chi| and L/4. */
EL_API el_status el_wvol_upper(int chi, double L, double* sharp,
                               double* coarse);
EL_API el_status el_wvol_lower(int chi, double L, double phi_inf,
                               double phi_two, double* out);
EL_API el_status el_wvol_main_bound(int chi, double L, double phi_inf,
                                    double* out);
EL_API el_status el_wvol_anderson(int chi, double phi_inf, double* out);

/* Full inequality chain on one descriptor.
 * values = {w_lower, w_upper_sharp, w_upper_coarse, max_phi_two,
 *           main_bound, closure_residual, anderson_bound}
 * flags  = {admissible, closure_ok, within_main, anderson_ok, nehari_ok}. */
EL_API el_status el_wvol_chain(int chi, double L, double phi_inf,
                               double phi_two, double values[7], int flags[5]);

/* ------------------------------------------------------------------------ */
/* Run harness.                                                              */

/* Executes one lab command described by a JSON configuration:
 *   {"command": "verify-identities" | "epstein-sample" | "dome" | "bounds"
 *               | "sweep",
 *    "scene": <path or inline object>, "descriptors": <path or array>,
 *    "grid": n, "seed": n, "times": [...], "tol": {"name": value, ...},
 *    "out": "file.csv", "chi": n, "lrange": [lo,hi,count],
 *    "prange": [lo,hi,count], "points": [[re,im], ...]}
 * On success *report_json receives the full report (free with
 * el_string_free) and *all_pass is 1 iff every check passed. A failing
 * check still returns EL_OK; only malformed input or internal errors
 * produce a non-OK status. */
EL_API el_status el_run_config_json(const char* config_json,
                                    char** report_json, int* all_pass);

/* Same, but the report is the human-readable text form. */
EL_API el_status el_run_config_text(const char* config_json,
                                    char** report_text, int* all_pass);

#ifdef __cplusplus
}
#endif

#endif /* EPSTEINLAB_H */
