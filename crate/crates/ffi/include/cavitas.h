#ifndef CAVITAS_H
#define CAVITAS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes returned by every fallible entry point.
 */
typedef enum CavitasStatus {
  CAVITAS_STATUS_OK = 0,
  CAVITAS_STATUS_NULL_POINTER = 1,
  /*
   Argument outside its domain.
   */
  CAVITAS_STATUS_INVALID_ARGUMENT = 2,
  /*
   Material violates a constitutive hypothesis.
   */
  CAVITAS_STATUS_INVALID_MATERIAL = 3,
  /*
   No cavitating solution exists for the requested stretch.
   */
  CAVITAS_STATUS_NO_SOLUTION = 4,
  /*
   Integration, quadrature or root-finding failure.
   */
  CAVITAS_STATUS_NUMERICAL = 5,
  /*
   A Rust panic was caught at the boundary.
   */
  CAVITAS_STATUS_PANIC = 6,
} CavitasStatus;

/*
 Stored-energy family.
 */
typedef struct CavitasFamily CavitasFamily;

/*
 Cavitating self-similar solution.
 */
typedef struct CavitasSolution CavitasSolution;

/*
 Precursor shock data.
 */
typedef struct CavitasJunction {
  double sigma;
  double a_minus;
  double lambda;
  double rh_residual;
  bool lax_ok;
} CavitasJunction;

/*
 One sample of the similarity profile.
 */
typedef struct CavitasTrajPoint {
  double s;
  double phi;
  double v;
  double a;
  double b;
  double q;
} CavitasTrajPoint;

/*
 Summary of the 1-d fracture fan. `total_production` is `+inf` when the
 stress is unbounded.
 */
typedef struct CavitasFan {
  double sigma;
  double y0;
  double total_production;
  bool lax_ok;
} CavitasFan;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *cavitas_version(void);

/*
 Message of the last failed call on this thread, or null after a success.
 The pointer stays valid until the next call into the library on this
 thread.
 */
const char *cavitas_last_error_message(void);

/*
 Power-law family `h(v) = A v^gamma + B v^(-beta)`. On success `*out` holds
 a handle to release with [`cavitas_family_free`].

 # Safety
 `out` must be valid for writes.
 */
enum CavitasStatus cavitas_family_power_law(double a,
                                            double b,
                                            double gamma,
                                            double beta,
                                            struct CavitasFamily **out);

/*
 Linear-log family `h(v) = L0 v - C ln v + D`.

 # Safety
 `out` must be valid for writes.
 */
enum CavitasStatus cavitas_family_linear_log(double l0,
                                             double c,
                                             double d,
                                             struct CavitasFamily **out);

/*
 # Safety
 `fam` must be null or a handle from a `cavitas_family_*` constructor not
 yet freed.
 */
void cavitas_family_free(struct CavitasFamily *fam);

/*
 The coefficient `P(a, b)`.

 # Safety
 `fam` must be a live family handle and `out` valid for writes.
 */
enum CavitasStatus cavitas_family_p_coefficient(const struct CavitasFamily *fam,
                                                double a,
                                                double b,
                                                double *out);

/*
 Specific volume of the stress-free cavity (root of `h'`).

 # Safety
 `fam` must be a live family handle and `out` valid for writes.
 */
enum CavitasStatus cavitas_family_stress_free_volume(const struct CavitasFamily *fam, double *out);

/*
 Cavitating solution at far-field stretch `lambda` with a stress-free
 cavity. Returns [`CavitasStatus::NoSolution`] below the critical stretch.

 # Safety
 `fam` must be a live family handle and `out` valid for writes.
 */
enum CavitasStatus cavitas_solve_cavity(const struct CavitasFamily *fam,
                                        double lambda,
                                        struct CavitasSolution **out);

/*
 As [`cavitas_solve_cavity`] with the cavity specific volume prescribed.

 # Safety
 `fam` must be a live family handle and `out` valid for writes.
 */
enum CavitasStatus cavitas_solve_cavity_prescribed(const struct CavitasFamily *fam,
                                                   double lambda,
                                                   double v0,
                                                   struct CavitasSolution **out);

/*
 # Safety
 `sol` must be null or a handle from a solve call not yet freed.
 */
void cavitas_solution_free(struct CavitasSolution *sol);

/*
 Cavity velocity `phi(0)`.

 # Safety
 `sol` must be a live solution handle and `out` valid for writes.
 */
enum CavitasStatus cavitas_solution_phi0(const struct CavitasSolution *sol, double *out);

/*
 # Safety
 `sol` must be a live solution handle and `out` valid for writes.
 */
enum CavitasStatus cavitas_solution_junction(const struct CavitasSolution *sol,
                                             struct CavitasJunction *out);

/*
 Profile sample at similarity variable `s`, clamped to `[0, sigma]`.

 # Safety
 `sol` must be a live solution handle and `out` valid for writes.
 */
enum CavitasStatus cavitas_solution_eval(const struct CavitasSolution *sol,
                                         double s,
                                         struct CavitasTrajPoint *out);

/*
 Energy of the cavitating solution minus the homogeneous one in the ball
 `|x| <= t sigma` at time `t`.

 # Safety
 `sol` must be a live solution handle and `out` valid for writes.
 */
enum CavitasStatus cavitas_solution_energy_delta(const struct CavitasSolution *sol,
                                                 double t,
                                                 double *out);

/*
 Fracture fan of the stress `tau(u) = tau_inf - u^(-p)` between stretches
 `alpha < lambda`.

 # Safety
 `out` must be valid for writes.
 */
enum CavitasStatus cavitas_fracture_fan(double tau_inf,
                                        double p,
                                        double lambda,
                                        double alpha,
                                        struct CavitasFan *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CAVITAS_H */
