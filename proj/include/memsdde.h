/* C interface to the delayed electrostatic-actuator toolkit.
 *
 * All entry points return an mdde_status; results come back through opaque
 * handles or plain structs. A failing call leaves a human-readable message in
 * mdde_last_error() (thread-local). Handles are freed with the matching
 * *_free function; freeing NULL is a no-op.
 */
#ifndef MEMSDDE_H
#define MEMSDDE_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mdde_status {
  MDDE_OK = 0,
  MDDE_ERR_INVALID = 1,        /* bad arguments / internal failure */
  MDDE_ERR_CONFIG = 2,         /* malformed configuration or precondition */
  MDDE_ERR_STATIC = 3,         /* pull-in exceeded or static analysis error */
  MDDE_ERR_INTEGRATOR = 4,     /* time integration failed */
  MDDE_ERR_NO_CONVERGENCE = 5, /* orbit / multiplier solver did not converge */
  MDDE_ERR_INAPPLICABLE = 6    /* requested check does not apply structurally */
} mdde_status;

typedef struct mdde_config mdde_config;
typedef struct mdde_trajectory mdde_trajectory;
typedef struct mdde_orbit mdde_orbit;
typedef struct mdde_branch mdde_branch;
typedef struct mdde_sweep mdde_sweep;

const char* mdde_version(void);
const char* mdde_last_error(void);

/* ---- configuration ----------------------------------------------------- */

mdde_status mdde_config_create(mdde_config** out);
mdde_status mdde_config_from_json(const char* json_text, mdde_config** out);
mdde_status mdde_config_from_file(const char* path, mdde_config** out);
/* value uses JSON syntax; bare words are accepted as strings */
mdde_status mdde_config_set(mdde_config* cfg, const char* key, const char* value);
void mdde_config_free(mdde_config* cfg);

/* ---- static analysis ---------------------------------------------------- */

enum { MDDE_EQ_SADDLE = 0, MDDE_EQ_STABLE_SPIRAL = 1, MDDE_EQ_STABLE_NODE = 2 };

typedef struct mdde_statics_report {
  double c, e, g1, g2, time_scale; /* nondimensionalized device parameters */
  double pull_in_voltage;
  double x1, x2;                   /* equilibrium gaps */
  double xi1, eta1, xi2, eta2;     /* constant upper/lower solutions */
  int x1_class, x2_class;
  double x1_eig_lo, x1_eig_hi;     /* real eigenvalue pair at the saddle */
  double x2_eig_re, x2_eig_im;     /* eigenvalue of the upper equilibrium */
} mdde_statics_report;

mdde_status mdde_statics(const mdde_config* cfg, mdde_statics_report* out);

/* ---- delay-stability bound ---------------------------------------------- */

typedef struct mdde_d0_report {
  double a, b, g1hat, g2hat, lambda;
  double d0;     /* +inf when unbounded (no delayed term) */
  int unbounded;
} mdde_d0_report;

mdde_status mdde_delay_bound(const mdde_config* cfg, mdde_d0_report* out);

/* d0 over a DC-voltage grid for both damping variants; the squeeze column
 * reads the damping parameter as gamma/(1-x2)^3 at the upper equilibrium. */
mdde_status mdde_d0_sweep(const mdde_config* cfg, double v0_lo, double v0_hi, double v0_step,
                          mdde_sweep** out);
size_t mdde_sweep_size(const mdde_sweep* sweep);
mdde_status mdde_sweep_row(const mdde_sweep* sweep, size_t i, double* v0, double* d0_linear,
                           double* d0_squeeze);
void mdde_sweep_free(mdde_sweep* sweep);

/* ---- time integration ---------------------------------------------------- */

mdde_status mdde_simulate(const mdde_config* cfg, double x0, double v0,
                          mdde_trajectory** out);
size_t mdde_trajectory_size(const mdde_trajectory* traj);
mdde_status mdde_trajectory_sample(const mdde_trajectory* traj, size_t i, double* t, double* x,
                                   double* v);
/* returns 1 and fills t_cross when the run ended in pull-in */
int mdde_trajectory_pullin(const mdde_trajectory* traj, double* t_cross);
void mdde_trajectory_free(mdde_trajectory* traj);

/* ---- periodic orbits ------------------------------------------------------ */

/* guess_mean <= 0 seeds from the upper equilibrium */
mdde_status mdde_find_orbit(const mdde_config* cfg, double guess_mean, mdde_orbit** out);
int mdde_orbit_harmonics(const mdde_orbit* orbit);
double mdde_orbit_residual(const mdde_orbit* orbit);
/* k in [0, harmonics]; sin coefficient is 0 for k = 0 */
mdde_status mdde_orbit_coeff(const mdde_orbit* orbit, int k, double* cos_coeff,
                             double* sin_coeff);
/* use_dde = 0: planar monodromy (requires d = 0); 1: delayed period map */
mdde_status mdde_orbit_multipliers(const mdde_config* cfg, const mdde_orbit* orbit, int use_dde,
                                   double* re, double* im, int cap, int* count);
void mdde_orbit_free(mdde_orbit* orbit);

/* ---- continuation ---------------------------------------------------------- */

/* parameter is "g1", "g2" or "d"; the start orbit is solved at the current
 * configuration from the upper equilibrium unless guess_mean > 0 */
mdde_status mdde_continue(const mdde_config* cfg, const char* parameter, double to, int steps,
                          double guess_mean, mdde_branch** out);
size_t mdde_branch_size(const mdde_branch* branch);
int mdde_branch_truncated(const mdde_branch* branch);
const char* mdde_branch_diagnostic(const mdde_branch* branch);
mdde_status mdde_branch_point(const mdde_branch* branch, size_t i, double* value,
                              double* mean, double* residual, double* mu_re, double* mu_im,
                              int cap, int* count);
void mdde_branch_free(mdde_branch* branch);

/* ---- analytic checks ------------------------------------------------------- */

typedef struct mdde_check_line {
  char name[56];
  double margin; /* >= 0 means satisfied */
  int pass;
} mdde_check_line;

typedef struct mdde_check_report {
  mdde_check_line lines[12];
  int n_lines;
  int pass;
  char verdict[128];
} mdde_check_report;

/* which is "hill", "gains", "squeeze" or "hn" */
mdde_status mdde_check(const mdde_config* cfg, const char* which, mdde_check_report* out);

#ifdef __cplusplus
}
#endif

#endif /* MEMSDDE_H */
