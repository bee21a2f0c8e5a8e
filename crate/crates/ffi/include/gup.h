#ifndef GUP_H
#define GUP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum GupStatus {
  GUP_STATUS_OK = 0,
  GUP_STATUS_NULL_POINTER = 1,
  GUP_STATUS_INVALID_ARGUMENT = 2,
  GUP_STATUS_DOMAIN = 3,
  GUP_STATUS_NON_FINITE = 4,
  GUP_STATUS_NO_ROOT = 5,
  GUP_STATUS_NON_CONVERGENCE = 6,
  GUP_STATUS_SINGULAR = 7,
  GUP_STATUS_SUPERLUMINAL = 8,
  GUP_STATUS_INTEGRATION_DOMAIN_EXIT = 9,
  GUP_STATUS_PANIC = 10,
} GupStatus;

typedef enum GupModelKind {
  GUP_MODEL_KIND_NON_REL_EXACT1_D = 0,
  GUP_MODEL_KIND_NON_REL_FIRST_ORDER1_D = 1,
  GUP_MODEL_KIND_NON_REL3_D_FIRST_ORDER = 2,
  GUP_MODEL_KIND_NON_REL3_D_EXACT = 3,
  GUP_MODEL_KIND_REL_FIRST_ORDER1_D = 4,
  GUP_MODEL_KIND_EFFECTIVE_SQRT_EUCLIDEAN = 5,
  GUP_MODEL_KIND_EFFECTIVE_SQRT_RELATIVISTIC = 6,
} GupModelKind;

typedef enum GupPotentialKind {
  GUP_POTENTIAL_KIND_FREE = 0,
  // `k |x|^2 / 2`; the parameter is the stiffness `k`.
  GUP_POTENTIAL_KIND_HARMONIC = 1,
  // `-F x_1`; the parameter is the force `F`.
  GUP_POTENTIAL_KIND_UNIFORM_FIELD = 2,
} GupPotentialKind;

typedef enum GupGalileanLaw {
  GUP_GALILEAN_LAW_EXACT = 0,
  GUP_GALILEAN_LAW_FIRST_ORDER = 1,
  GUP_GALILEAN_LAW_ORDINARY = 2,
} GupGalileanLaw;

// Opaque Hamiltonian model.
typedef struct GupModel GupModel;

// Opaque integrated trajectory.
typedef struct GupTrajectory GupTrajectory;

// Closed-form estimates for one mass, in SI units.
typedef struct GupConstantsReport {
  double gamma;
  double c_gamma;
  double u_over_c_1d;
  double u_over_c_3d;
  double c_eff_rel_deviation_1d;
  double c_eff_rel_deviation_3d;
} GupConstantsReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the calling thread's last error message into `buffer` (NUL
// terminated, truncated to `capacity`). Returns the full message length
// including the terminator, or 0 when there is no message.
//
// # Safety
// `buffer` must be null or valid for `capacity` byte writes.
size_t gup_last_error_message(char *buffer, size_t capacity);

// `P = tan(sqrt(beta) p) / sqrt(beta)`.
enum GupStatus gup_momentum_map_1d(double p, double beta, double mass, double *deformed);

enum GupStatus gup_canonical_momentum_1d(double deformed, double beta, double mass, double *p);

// `P_i = p_i / sqrt(1 - beta p^2)`; `p` and `deformed` hold three values.
enum GupStatus gup_momentum_map_3d(const double *p, double beta, double mass, double *deformed);

enum GupStatus gup_canonical_momentum_3d(const double *deformed,
                                         double beta,
                                         double mass,
                                         double *p);

// `{X, P} = 1 + beta P^2`.
enum GupStatus gup_bracket_xp_1d(double deformed, double beta, double mass, double *value);

// `{X_i, P_j}` for 1-based indices `i`, `j`.
enum GupStatus gup_bracket_xp_3d(const double *deformed,
                                 size_t i,
                                 size_t j,
                                 double beta,
                                 double mass,
                                 double *value);

// Creates a model. `scale` is the light speed for `RelFirstOrder1D` and the
// velocity scale for the square-root kinds; it is ignored otherwise.
enum GupStatus gup_model_new(enum GupModelKind kind,
                             double beta,
                             double mass,
                             double scale,
                             enum GupPotentialKind potential,
                             double potential_parameter,
                             struct GupModel **model);

// Releases a model; null is ignored.
//
// # Safety
// `model` must be null or a handle from `gup_model_new` not yet freed.
void gup_model_free(struct GupModel *model);

// Spatial dimension the model requires, or 0 when it accepts 1 and 3.
//
// # Safety
// `model` must be null or a live handle.
size_t gup_model_dimension(const struct GupModel *model);

// Energy at the phase point `(x, p)`, each of length `dimension`.
enum GupStatus gup_model_energy(const struct GupModel *model,
                                const double *x,
                                const double *p,
                                size_t dimension,
                                double *energy);

// Velocity `dH/dp` for the momentum `p` of length `dimension`.
enum GupStatus gup_model_velocity(const struct GupModel *model,
                                  const double *p,
                                  size_t dimension,
                                  double *velocity);

// Exact numerical inversion of `v = dH/dp`.
enum GupStatus gup_model_momentum_from_velocity(const struct GupModel *model,
                                                const double *velocity,
                                                size_t dimension,
                                                double *p);

// Integrates from `(x, p)` at `t = 0` to `t_end` with fixed-step RK4.
enum GupStatus gup_integrate(const struct GupModel *model,
                             const double *x,
                             const double *p,
                             size_t dimension,
                             double t_end,
                             double dt,
                             struct GupTrajectory **trajectory);

// Releases a trajectory; null is ignored.
//
// # Safety
// `trajectory` must be null or a handle from `gup_integrate` not yet freed.
void gup_trajectory_free(struct GupTrajectory *trajectory);

// Number of samples, including the initial state; 0 for null.
//
// # Safety
// `trajectory` must be null or a live handle.
size_t gup_trajectory_len(const struct GupTrajectory *trajectory);

// # Safety
// `trajectory` must be null or a live handle.
size_t gup_trajectory_dimension(const struct GupTrajectory *trajectory);

// Largest relative energy change along the trajectory.
enum GupStatus gup_trajectory_energy_drift(const struct GupTrajectory *trajectory, double *drift);

// Copies sample `index`; `x` and `p` receive `dimension` values each.
enum GupStatus gup_trajectory_sample(const struct GupTrajectory *trajectory,
                                     size_t index,
                                     double *t,
                                     double *x,
                                     double *p,
                                     double *energy);

// Maps the moving-frame event `(t', x')` to the rest frame.
enum GupStatus gup_galilean_apply(enum GupGalileanLaw law,
                                  double velocity,
                                  double u,
                                  double t_moving,
                                  double x_moving,
                                  double *t,
                                  double *x);

// Velocity of the exact boost equal to applying `first` then `second`.
enum GupStatus gup_galilean_compose(double second, double first, double u, double *velocity);

// Rest-frame velocity of a particle moving with `v_moving` in the boosted frame.
enum GupStatus gup_velocity_compose(enum GupGalileanLaw law,
                                    double v_moving,
                                    double velocity,
                                    double u,
                                    double *result);

enum GupStatus gup_lorentz_apply(double velocity,
                                 double c_eff,
                                 double t_moving,
                                 double x_moving,
                                 double *t,
                                 double *x);

// `gamma`, `u/c` and the light-speed deviation for `mass` (kg), using the
// pinned CODATA 2018 constants.
enum GupStatus gup_constants_report(double mass, struct GupConstantsReport *report);

// `c_eff` from `1/c_eff^2 = 1/c^2 - k gamma^2`; `dimension` (1 or 3)
// selects `k`.
enum GupStatus gup_effective_light_speed(double gamma, size_t dimension, double c, double *c_eff);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GUP_H */
