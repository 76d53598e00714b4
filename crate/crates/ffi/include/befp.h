#ifndef BEFP_H
#define BEFP_H

/* Generated by cbindgen from the befp-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum BefpStatus {
  BEFP_OK = 0,
  BEFP_ERR_INVALID_ARGUMENT = 1,
  BEFP_ERR_NUMERICAL = 2,
  BEFP_ERR_IO = 3,
  BEFP_ERR_NULL_POINTER = 4,
  BEFP_ERR_PANIC = 5,
} BefpStatus;

/**
 * Opaque radial profile handle.
 */
typedef struct BefpProfile BefpProfile;

/**
 * Opaque trajectory handle.
 */
typedef struct BefpTrajectory BefpTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent error on this thread. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *befp_last_error_message(void);

/**
 * Bose-Einstein equilibrium `f_∞^β` sampled on a uniform grid.
 *
 * # Safety
 * `out` must be a valid pointer to a `BefpProfile*` slot.
 */
enum BefpStatus befp_profile_equilibrium(double beta,
                                         double r_max,
                                         size_t intervals,
                                         struct BefpProfile **out);

/**
 * Point mass at the origin; `kind` 0 = BEFP side, 1 = FP side.
 *
 * # Safety
 * `out` must be a valid pointer to a `BefpProfile*` slot.
 */
enum BefpStatus befp_profile_dirac(int32_t kind,
                                   double mass,
                                   double r_max,
                                   size_t intervals,
                                   struct BefpProfile **out);

/**
 * Radial Gaussian bump (BEFP side) normalised to `mass`.
 *
 * # Safety
 * `out` must be a valid pointer to a `BefpProfile*` slot.
 */
enum BefpStatus befp_profile_gaussian_bump(double center,
                                           double width,
                                           double mass,
                                           double r_max,
                                           size_t intervals,
                                           struct BefpProfile **out);

/**
 * Profile from caller-provided nodes (strictly increasing, starting at 0)
 * and values (`r·density`, non-negative).
 *
 * # Safety
 * `nodes` and `values` must point to `len` readable doubles; `out` must be
 * a valid pointer to a `BefpProfile*` slot.
 */
enum BefpStatus befp_profile_from_values(int32_t kind,
                                         const double *nodes,
                                         const double *values,
                                         size_t len,
                                         double atom,
                                         struct BefpProfile **out);

/**
 * # Safety
 * `path` must be a valid NUL-terminated string; `out` a valid slot.
 */
enum BefpStatus befp_profile_read_csv(const char *path, struct BefpProfile **out);

/**
 * # Safety
 * `profile` must be a live handle; `path` a valid NUL-terminated string.
 */
enum BefpStatus befp_profile_write_csv(const struct BefpProfile *profile, const char *path);

/**
 * # Safety
 * `profile` must be a handle obtained from this library, not yet freed.
 */
void befp_profile_free(struct BefpProfile *profile);

/**
 * Number of grid nodes, or 0 for a null handle.
 *
 * # Safety
 * `profile` must be a live handle or null.
 */
size_t befp_profile_len(const struct BefpProfile *profile);

/**
 * Profile kind: 0 = BEFP side, 1 = FP side, -1 for a null handle.
 *
 * # Safety
 * `profile` must be a live handle or null.
 */
int32_t befp_profile_kind(const struct BefpProfile *profile);

/**
 * Origin point mass divided by 2π (NaN for a null handle).
 *
 * # Safety
 * `profile` must be a live handle or null.
 */
double befp_profile_atom(const struct BefpProfile *profile);

/**
 * Total 2D mass by quadrature (NaN for a null handle).
 *
 * # Safety
 * `profile` must be a live handle or null.
 */
double befp_profile_mass(const struct BefpProfile *profile);

/**
 * Copy the grid nodes into `buf` (must hold `befp_profile_len` doubles).
 *
 * # Safety
 * `profile` live handle; `buf` writable for `len` doubles.
 */
enum BefpStatus befp_profile_copy_nodes(const struct BefpProfile *profile, double *buf, size_t len);

/**
 * Copy the profile values (`r·density`) into `buf`.
 *
 * # Safety
 * `profile` live handle; `buf` writable for `len` doubles.
 */
enum BefpStatus befp_profile_copy_values(const struct BefpProfile *profile,
                                         double *buf,
                                         size_t len);

/**
 * L¹(R²) distance between two profiles on the same grid.
 *
 * # Safety
 * Both handles live; `out` a valid double slot.
 */
enum BefpStatus befp_profile_l1_distance(const struct BefpProfile *a,
                                         const struct BefpProfile *b,
                                         double *out);

/**
 * Λ: FP-side profile to BEFP side.
 *
 * # Safety
 * `g` live handle; `out` a valid slot.
 */
enum BefpStatus befp_lambda_forward(const struct BefpProfile *g, struct BefpProfile **out);

/**
 * Λ⁻¹: BEFP-side profile to FP side.
 *
 * # Safety
 * `f` live handle; `out` a valid slot.
 */
enum BefpStatus befp_lambda_inverse(const struct BefpProfile *f, struct BefpProfile **out);

/**
 * `m = 2π log(1 + M/2π)`.
 */
double befp_mass_f_from_fp(double fp_mass);

/**
 * `M = 2π (e^{m/2π} − 1)`.
 */
double befp_mass_fp_from_f(double befp_mass);

/**
 * L¹ Lipschitz factor `1 + M₂/2π` of Λ.
 */
double befp_lipschitz_bound(double fp_mass_1, double fp_mass_2);

/**
 * `f_∞^β(r) = 1/(β e^{r²/2} − 1)`; requires β > 1.
 *
 * # Safety
 * `out` must be a valid double slot.
 */
enum BefpStatus befp_bose_einstein(double beta, double r, double *out);

/**
 * β with `mass(f_∞^β) = m`.
 *
 * # Safety
 * `out` must be a valid double slot.
 */
enum BefpStatus befp_beta_from_mass(double mass, double *out);

/**
 * The Dirac-start solution `ϑ(t)⁻¹[(2π+1)e^{r²/2ϑ(t)} − 1]⁻¹`, t > 0.
 *
 * # Safety
 * `out` must be a valid double slot.
 */
enum BefpStatus befp_fundamental_solution(double t, double r, double *out);

/**
 * Mass of the Dirac-start solution, `2π log(1 + 1/2π)`.
 */
double befp_fundamental_mass(void);

/**
 * Explicit infinite-mass solution `2(2A⁻¹e^{−2t} + r²)⁻¹`.
 *
 * # Safety
 * `out` must be a valid double slot.
 */
enum BefpStatus befp_infinite_mass_solution(double t, double r, double a, double *out);

/**
 * Entropy `H(f)` of a profile.
 *
 * # Safety
 * `profile` live handle; `out` a valid double slot.
 */
enum BefpStatus befp_entropy(const struct BefpProfile *profile, double *out);

/**
 * Entropy dissipation `D(f)`.
 *
 * # Safety
 * `profile` live handle; `out` a valid double slot.
 */
enum BefpStatus befp_dissipation(const struct BefpProfile *profile, double *out);

/**
 * Weighted norm `‖(1+r^ℓ)f‖_p`; pass `INFINITY` for the sup norm.
 *
 * # Safety
 * `profile` live handle; `out` a valid double slot.
 */
enum BefpStatus befp_lp_ell_norm(const struct BefpProfile *profile,
                                 double p,
                                 double ell,
                                 double *out);

/**
 * Exact linear-FP propagation of an FP-side profile to time t.
 *
 * # Safety
 * `g` live handle; `out` a valid slot.
 */
enum BefpStatus befp_fp_propagate(const struct BefpProfile *g, double t, struct BefpProfile **out);

/**
 * Exact BEFP pipeline from a BEFP-side initial profile: snapshots at the
 * given strictly increasing positive times.
 *
 * # Safety
 * `f0` live handle; `times` readable for `n_times` doubles; `out` valid.
 */
enum BefpStatus befp_solve_radial_exact(const struct BefpProfile *f0,
                                        const double *times,
                                        size_t n_times,
                                        struct BefpTrajectory **out);

/**
 * # Safety
 * `traj` must be a handle obtained from this library, not yet freed.
 */
void befp_trajectory_free(struct BefpTrajectory *traj);

/**
 * Number of snapshots (0 for a null handle).
 *
 * # Safety
 * `traj` must be a live handle or null.
 */
size_t befp_trajectory_len(const struct BefpTrajectory *traj);

/**
 * Snapshot time at index `i` (NaN when out of range).
 *
 * # Safety
 * `traj` must be a live handle or null.
 */
double befp_trajectory_time(const struct BefpTrajectory *traj, size_t i);

/**
 * Clone snapshot `i` into a fresh profile handle.
 *
 * # Safety
 * `traj` live handle; `out` a valid slot.
 */
enum BefpStatus befp_trajectory_snapshot(const struct BefpTrajectory *traj,
                                         size_t i,
                                         struct BefpProfile **out);

/**
 * Per-snapshot diagnostics; any of the destination pointers may be null.
 *
 * # Safety
 * `traj` live handle; non-null destinations must be valid double slots.
 */
enum BefpStatus befp_trajectory_diagnostics(const struct BefpTrajectory *traj,
                                            size_t i,
                                            double *mass,
                                            double *entropy,
                                            double *l1_to_equilibrium,
                                            double *sup_norm);

/**
 * Write a trajectory as `(t, r, value)` CSV.
 *
 * # Safety
 * `traj` live handle; `path` a valid NUL-terminated string.
 */
enum BefpStatus befp_trajectory_write_csv(const struct BefpTrajectory *traj, const char *path);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* BEFP_H */
