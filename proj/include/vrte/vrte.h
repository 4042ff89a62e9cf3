/*
 * vrte - discrete-ordinate solver for polarized radiative transfer in
 * plane-parallel particulate layers.
 *
 * C interface of the shared library: opaque handles, integer status codes,
 * and a thread-local error message. All functions return VRTE_OK on success.
 */
#ifndef VRTE_H
#define VRTE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#ifndef VRTE_API
#define VRTE_API __attribute__((visibility("default")))
#endif

typedef int32_t vrte_status;

enum {
    VRTE_OK = 0,
    VRTE_E_VALIDATION = 2, /* malformed material, options, or file */
    VRTE_E_NUMERICAL = 3,  /* eigen/linear solve or residual failure */
    VRTE_E_ARGUMENT = 5    /* null handle or out-of-range index */
};

/* Message describing the most recent failure on this thread. */
VRTE_API const char* vrte_last_error(void);

VRTE_API const char* vrte_version(void);

/* ------------------------------------------------------------------ */
/* Material                                                            */

typedef struct vrte_material vrte_material;

/* Load and validate a material description (JSON document; see README). */
VRTE_API vrte_status vrte_material_load(const char* path, vrte_material** out);
VRTE_API vrte_status vrte_material_parse(const char* json_text, const char* base_dir,
                                         vrte_material** out);
VRTE_API void vrte_material_free(vrte_material* material);

/* Expansion order count and layer count of a loaded material. */
VRTE_API vrte_status vrte_material_info(const vrte_material* material, int32_t* order_count,
                                        int32_t* layer_count);

/* ------------------------------------------------------------------ */
/* Options                                                             */

typedef struct vrte_options {
    int32_t quadrature_n;   /* half-range node count, default 40 */
    int32_t order_cap;      /* 0: use the material's order count */
    int32_t threads;        /* 0: VRTE_THREADS env var or hardware */
    int32_t out_zenith;     /* output zenith count, default 11 */
    int32_t out_azimuth;    /* output azimuth count, default 19 */
    double incident_mu0;    /* used when incident_override != 0 */
    double incident_phi0;
    int32_t incident_override;
    const char* dump_eigen_path;    /* optional diagnostics */
    const char* dump_boundary_path;
    const char* dump_kernel_path;
} vrte_options;

VRTE_API void vrte_options_init(vrte_options* options);

/* ------------------------------------------------------------------ */
/* Radiance fields                                                     */

typedef struct vrte_field vrte_field;

typedef struct vrte_timings {
    double homogeneous;
    double particular;
    double boundary;
    double reconstruction;
    double total_wall;
    uint64_t homogeneous_solves;
    uint64_t particular_solves;
    uint64_t boundary_solves;
    uint64_t reconstruction_items;
} vrte_timings;

/* Solve the radiance field at the given optical depths on the output grid. */
VRTE_API vrte_status vrte_solve_radiance(const vrte_material* material, const vrte_options* options,
                                         const double* tau_levels, size_t n_tau, vrte_field** out);

VRTE_API vrte_status vrte_field_size(const vrte_field* field, size_t* n_tau, size_t* n_mu,
                                     size_t* n_phi);
/* row layout: (tau, mu, phi, I, Q, U, V) */
VRTE_API vrte_status vrte_field_row(const vrte_field* field, size_t tau_index, size_t mu_index,
                                    size_t phi_index, double row[7]);
VRTE_API vrte_status vrte_field_write_csv(const vrte_field* field, const char* path);
VRTE_API vrte_status vrte_field_timings(const vrte_field* field, vrte_timings* out);
/* Directional-hemispherical reflectance of the solved field, per channel. */
VRTE_API vrte_status vrte_field_reflectance(const vrte_field* field, double out[4]);
VRTE_API void vrte_field_free(vrte_field* field);

/* ------------------------------------------------------------------ */
/* BRDF tables                                                         */

typedef struct vrte_brdf vrte_brdf;

/* Compute the subsurface BRDF Mueller table for the incident cosines.
 * basis: 16 doubles (four incident Stokes columns) or NULL for the default
 * [1,0,0,0], [1,1,0,0], [1,0,1,0], [1,0,0,1]. */
VRTE_API vrte_status vrte_compute_brdf(const vrte_material* material, const vrte_options* options,
                                       const double* mu_in, size_t n_mu_in, int32_t n_dphi,
                                       const double* basis, vrte_brdf** out);

VRTE_API vrte_status vrte_brdf_size(const vrte_brdf* brdf, size_t* n_in, size_t* n_out,
                                    size_t* n_dphi);
/* entry: 16 doubles, row-major Mueller matrix */
VRTE_API vrte_status vrte_brdf_entry(const vrte_brdf* brdf, size_t in_index, size_t out_index,
                                     size_t dphi_index, double entry[16]);
VRTE_API vrte_status vrte_brdf_write_csv(const vrte_brdf* brdf, const char* path);
VRTE_API vrte_status vrte_brdf_write_binary(const vrte_brdf* brdf, const char* path);
VRTE_API vrte_status vrte_brdf_reflectance(const vrte_brdf* brdf, size_t in_index, double out[4]);
VRTE_API vrte_status vrte_brdf_timings(const vrte_brdf* brdf, vrte_timings* out);
VRTE_API void vrte_brdf_free(vrte_brdf* brdf);

/* ------------------------------------------------------------------ */
/* Monte Carlo validation tallies                                      */

typedef struct vrte_mc_tally vrte_mc_tally;

VRTE_API vrte_status vrte_mc_trace(const vrte_material* material, const vrte_options* options,
                                   uint64_t photons, uint64_t seed, int32_t zenith_bins,
                                   int32_t azimuth_bins, vrte_mc_tally** out);

/* hemisphere 0 = top exit, 1 = bottom exit.
 * row layout: (mu_center, phi_center, I, Q, U, V, se_i, se_q, se_u, se_v) */
VRTE_API vrte_status vrte_mc_tally_row(const vrte_mc_tally* tally, int32_t hemisphere,
                                       int32_t zenith_bin, int32_t azimuth_bin, double row[10]);
VRTE_API vrte_status vrte_mc_tally_write_csv(const vrte_mc_tally* tally, const char* path);
VRTE_API void vrte_mc_tally_free(vrte_mc_tally* tally);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* VRTE_H */
