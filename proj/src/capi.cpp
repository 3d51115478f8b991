#include "memsdde.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "config.hpp"
#include "ddesolve.hpp"
#include "model.hpp"
#include "orbits.hpp"
#include "stability.hpp"
#include "statics.hpp"

using namespace memsdde;

namespace {

thread_local std::string g_last_error;

mdde_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::Config:
      return MDDE_ERR_CONFIG;
    case ErrorCode::PullInExceeded:
    case ErrorCode::NotAnEquilibrium:
    case ErrorCode::VoltageRangeInvalid:
    case ErrorCode::SignAssumptionViolated:
    case ErrorCode::NotHurwitz:
    case ErrorCode::SingularMatrix:
    case ErrorCode::NoLstarRoot:
      return MDDE_ERR_STATIC;
    case ErrorCode::Inapplicable:
      return MDDE_ERR_INAPPLICABLE;
    case ErrorCode::NonPositiveGap:
    case ErrorCode::HistoryTooShort:
      return MDDE_ERR_INTEGRATOR;
    case ErrorCode::NoConvergence:
    case ErrorCode::NotConverged:
    case ErrorCode::NegativeGapOrbit:
      return MDDE_ERR_NO_CONVERGENCE;
    default:
      return MDDE_ERR_INVALID;
  }
}

template <class Fn>
mdde_status guarded(Fn&& fn) {
  try {
    fn();
    return MDDE_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MDDE_ERR_INVALID;
  }
}

void copy_name(mdde_check_line& line, const char* name) {
  std::snprintf(line.name, sizeof(line.name), "%s", name);
}

}  // namespace

struct mdde_config {
  RunConfig cfg;
};
struct mdde_trajectory {
  Trajectory traj;
};
struct mdde_orbit {
  PeriodicOrbit orbit;
};
struct mdde_branch {
  Branch branch;
};
struct mdde_sweep {
  std::vector<double> v0;
  std::vector<double> d0_linear;
  std::vector<double> d0_squeeze;
};

extern "C" {

const char* mdde_version(void) { return "memsdde 1.0.0"; }

const char* mdde_last_error(void) { return g_last_error.c_str(); }

mdde_status mdde_config_create(mdde_config** out) {
  return guarded([&] { *out = new mdde_config{RunConfig{}}; });
}

mdde_status mdde_config_from_json(const char* json_text, mdde_config** out) {
  return guarded([&] { *out = new mdde_config{RunConfig::from_json_text(json_text)}; });
}

mdde_status mdde_config_from_file(const char* path, mdde_config** out) {
  return guarded([&] { *out = new mdde_config{RunConfig::from_json_file(path)}; });
}

mdde_status mdde_config_set(mdde_config* cfg, const char* key, const char* value) {
  if (!cfg) return MDDE_ERR_INVALID;
  return guarded([&] { cfg->cfg.set_key(key, value); });
}

void mdde_config_free(mdde_config* cfg) { delete cfg; }

mdde_status mdde_statics(const mdde_config* cfg, mdde_statics_report* out) {
  if (!cfg || !out) return MDDE_ERR_INVALID;
  return guarded([&] {
    const RunConfig& rc = cfg->cfg;
    const auto inputs = rc.statics_inputs();
    out->c = inputs.dimensionless.c;
    out->e = inputs.dimensionless.e;
    out->g1 = inputs.dimensionless.g1;
    out->g2 = inputs.dimensionless.g2;
    out->time_scale = inputs.dimensionless.time_scale;
    out->pull_in_voltage = pull_in_voltage(inputs.e_eff);

    const EquilibriumPair eq = equilibria(inputs.e_eff, rc.v0);
    out->x1 = eq.x1;
    out->x2 = eq.x2;

    // brackets from the configured drive; classification from the DC system
    const VoltageProfile profile =
        rc.delta == 0.0 ? VoltageProfile::dc(rc.v0, rc.period())
                        : VoltageProfile(rc.v0, rc.delta, rc.harmonics, rc.period());
    const BracketSet br = bracket_constants(inputs.e_eff, profile);
    out->xi1 = br.xi1;
    out->eta1 = br.eta1;
    out->xi2 = br.xi2;
    out->eta2 = br.eta2;

    const DampingModel dm = rc.damping == DampingKind::Linear
                                ? DampingModel::linear(inputs.c_eff)
                                : DampingModel::squeeze(inputs.gamma_eff);
    const ActuatorParams p{inputs.e_eff, dm, 0.0, 0.0, 0.0,
                           VoltageProfile::dc(rc.v0, rc.period())};
    const Classification c1 = classify_equilibrium(p, eq.x1);
    const Classification c2 = classify_equilibrium(p, eq.x2);
    out->x1_class = static_cast<int>(c1.type);
    out->x2_class = static_cast<int>(c2.type);
    out->x1_eig_lo = c1.eig2.real();
    out->x1_eig_hi = c1.eig1.real();
    out->x2_eig_re = c2.eig1.real();
    out->x2_eig_im = std::abs(c2.eig1.imag());
  });
}

mdde_status mdde_delay_bound(const mdde_config* cfg, mdde_d0_report* out) {
  if (!cfg || !out) return MDDE_ERR_INVALID;
  return guarded([&] {
    const RunConfig& rc = cfg->cfg;
    if (rc.delta != 0.0)
      fail(ErrorCode::Config, "delay bound requires a DC configuration (delta = 0)");
    const ActuatorParams p = rc.actuator();
    const EquilibriumPair eq = equilibria(rc.e, rc.v0);
    const DelayLinearization lin = linearize_at_equilibrium(p, eq.x2);
    const LyapunovCertificate cert = lyapunov_certificate(lin);
    out->a = lin.a;
    out->b = lin.b;
    out->g1hat = lin.g1hat;
    out->g2hat = lin.g2hat;
    out->lambda = cert.lambda_ratio;
    out->d0 = delay_bound_d0(lin);
    out->unbounded = std::isinf(out->d0) ? 1 : 0;
  });
}

mdde_status mdde_d0_sweep(const mdde_config* cfg, double v0_lo, double v0_hi, double v0_step,
                          mdde_sweep** out) {
  if (!cfg || !out) return MDDE_ERR_INVALID;
  return guarded([&] {
    const RunConfig& rc = cfg->cfg;
    auto sweep = std::make_unique<mdde_sweep>();
    for (const DelaySweepRow& row :
         delay_bound_sweep(rc.e, rc.c, rc.gamma, rc.g1, rc.g2, v0_lo, v0_hi, v0_step)) {
      sweep->v0.push_back(row.v0);
      sweep->d0_linear.push_back(row.d0_linear);
      sweep->d0_squeeze.push_back(row.d0_squeeze);
    }
    *out = sweep.release();
  });
}

size_t mdde_sweep_size(const mdde_sweep* sweep) { return sweep ? sweep->v0.size() : 0; }

mdde_status mdde_sweep_row(const mdde_sweep* sweep, size_t i, double* v0, double* d0_linear,
                           double* d0_squeeze) {
  if (!sweep || i >= sweep->v0.size()) return MDDE_ERR_INVALID;
  if (v0) *v0 = sweep->v0[i];
  if (d0_linear) *d0_linear = sweep->d0_linear[i];
  if (d0_squeeze) *d0_squeeze = sweep->d0_squeeze[i];
  return MDDE_OK;
}

void mdde_sweep_free(mdde_sweep* sweep) { delete sweep; }

mdde_status mdde_simulate(const mdde_config* cfg, double x0, double v0,
                          mdde_trajectory** out) {
  if (!cfg || !out) return MDDE_ERR_INVALID;
  return guarded([&] {
    const RunConfig& rc = cfg->cfg;
    if (!(x0 > 0.0)) fail(ErrorCode::Config, "initial gap must be positive");
    const ActuatorParams p = rc.actuator();
    Trajectory traj = integrate(p, InitialHistory::constant(State{x0, v0}),
                                rc.effective_t_end(), rc.effective_step());
    *out = new mdde_trajectory{std::move(traj)};
  });
}

size_t mdde_trajectory_size(const mdde_trajectory* traj) {
  return traj ? traj->traj.times().size() : 0;
}

mdde_status mdde_trajectory_sample(const mdde_trajectory* traj, size_t i, double* t, double* x,
                                   double* v) {
  if (!traj || i >= traj->traj.times().size()) return MDDE_ERR_INVALID;
  if (t) *t = traj->traj.times()[i];
  if (x) *x = traj->traj.states()[i].x;
  if (v) *v = traj->traj.states()[i].v;
  return MDDE_OK;
}

int mdde_trajectory_pullin(const mdde_trajectory* traj, double* t_cross) {
  if (!traj || !traj->traj.pull_in()) return 0;
  if (t_cross) *t_cross = traj->traj.pull_in()->t_cross;
  return 1;
}

void mdde_trajectory_free(mdde_trajectory* traj) { delete traj; }

mdde_status mdde_find_orbit(const mdde_config* cfg, double guess_mean, mdde_orbit** out) {
  if (!cfg || !out) return MDDE_ERR_INVALID;
  return guarded([&] {
    const RunConfig& rc = cfg->cfg;
    const ActuatorParams p = rc.actuator();
    double seed = guess_mean;
    if (!(seed > 0.0)) seed = equilibria(rc.e, rc.v0).x2;
    OrbitOptions opts;
    opts.tol = rc.newton_tol;
    opts.max_newton = rc.newton_max;
    PeriodicOrbit orbit =
        find_periodic(p, rc.period(), rc.n_harmonics, OrbitGuess{seed}, opts);
    *out = new mdde_orbit{std::move(orbit)};
  });
}

int mdde_orbit_harmonics(const mdde_orbit* orbit) {
  return orbit ? orbit->orbit.harmonics() : 0;
}

double mdde_orbit_residual(const mdde_orbit* orbit) {
  return orbit ? orbit->orbit.residual() : std::numeric_limits<double>::quiet_NaN();
}

mdde_status mdde_orbit_coeff(const mdde_orbit* orbit, int k, double* cos_coeff,
                             double* sin_coeff) {
  if (!orbit || k < 0 || k > orbit->orbit.harmonics()) return MDDE_ERR_INVALID;
  const auto& c = orbit->orbit.coeffs();
  const int N = orbit->orbit.harmonics();
  if (cos_coeff) *cos_coeff = c(k);
  if (sin_coeff) *sin_coeff = k == 0 ? 0.0 : c(N + k);
  return MDDE_OK;
}

mdde_status mdde_orbit_multipliers(const mdde_config* cfg, const mdde_orbit* orbit, int use_dde,
                                   double* re, double* im, int cap, int* count) {
  if (!cfg || !orbit) return MDDE_ERR_INVALID;
  return guarded([&] {
    const ActuatorParams& p = orbit->orbit.params();
    std::vector<std::complex<double>> mult;
    if (use_dde) {
      mult = floquet_dde(p, orbit->orbit, cfg->cfg.floquet_m).multipliers;
    } else {
      const Monodromy mono = monodromy_ode(p, orbit->orbit);
      mult = {mono.multipliers[0], mono.multipliers[1]};
    }
    const int n = std::min<int>(cap, static_cast<int>(mult.size()));
    for (int i = 0; i < n; ++i) {
      if (re) re[i] = mult[i].real();
      if (im) im[i] = mult[i].imag();
    }
    if (count) *count = n;
  });
}

void mdde_orbit_free(mdde_orbit* orbit) { delete orbit; }

mdde_status mdde_continue(const mdde_config* cfg, const char* parameter, double to, int steps,
                          double guess_mean, mdde_branch** out) {
  if (!cfg || !parameter || !out) return MDDE_ERR_INVALID;
  return guarded([&] {
    const RunConfig& rc = cfg->cfg;
    BranchParam param;
    const std::string s(parameter);
    if (s == "g1")
      param = BranchParam::G1;
    else if (s == "g2")
      param = BranchParam::G2;
    else if (s == "d")
      param = BranchParam::Delay;
    else
      fail(ErrorCode::Config, "continuation parameter must be g1, g2 or d");

    const ActuatorParams p = rc.actuator();
    double seed = guess_mean;
    if (!(seed > 0.0)) seed = equilibria(rc.e, rc.v0).x2;
    OrbitOptions oo;
    oo.tol = rc.newton_tol;
    oo.max_newton = rc.newton_max;
    const PeriodicOrbit start =
        find_periodic(p, rc.period(), rc.n_harmonics, OrbitGuess{seed}, oo);

    ContinuationOptions co;
    co.orbit = oo;
    co.floquet_m = rc.floquet_m;
    Branch branch = continue_branch(start, param, to, steps, co);
    *out = new mdde_branch{std::move(branch)};
  });
}

size_t mdde_branch_size(const mdde_branch* branch) {
  return branch ? branch->branch.points.size() : 0;
}

int mdde_branch_truncated(const mdde_branch* branch) {
  return branch && branch->branch.truncated ? 1 : 0;
}

const char* mdde_branch_diagnostic(const mdde_branch* branch) {
  return branch ? branch->branch.diagnostic.c_str() : "";
}

mdde_status mdde_branch_point(const mdde_branch* branch, size_t i, double* value, double* mean,
                              double* residual, double* mu_re, double* mu_im, int cap,
                              int* count) {
  if (!branch || i >= branch->branch.points.size()) return MDDE_ERR_INVALID;
  const BranchPoint& pt = branch->branch.points[i];
  if (value) *value = pt.value;
  if (mean) *mean = pt.orbit.mean();
  if (residual) *residual = pt.orbit.residual();
  const int n = std::min<int>(cap, static_cast<int>(pt.multipliers.size()));
  for (int j = 0; j < n; ++j) {
    if (mu_re) mu_re[j] = pt.multipliers[j].real();
    if (mu_im) mu_im[j] = pt.multipliers[j].imag();
  }
  if (count) *count = n;
  return MDDE_OK;
}

void mdde_branch_free(mdde_branch* branch) { delete branch; }

mdde_status mdde_check(const mdde_config* cfg, const char* which, mdde_check_report* out) {
  if (!cfg || !which || !out) return MDDE_ERR_INVALID;
  return guarded([&] {
    const RunConfig& rc = cfg->cfg;
    std::memset(out, 0, sizeof(*out));
    const std::string w(which);
    const double T = rc.period();

    if (w == "hill") {
      // nondegeneracy of the linearization about the upper non-delayed orbit
      ActuatorParams p = rc.actuator();
      p.d = 0.0;
      OrbitOptions oo;
      oo.tol = rc.newton_tol;
      oo.max_newton = rc.newton_max;
      const double seed = equilibria(rc.e, rc.v0).x2;
      const PeriodicOrbit orbit =
          find_periodic(p, T, rc.n_harmonics, OrbitGuess{seed}, oo);
      const HillVerdict v = hill_nondegenerate(make_hill_coefficients(p, orbit));
      copy_name(out->lines[0], "pointwise 4a >= (c+b)^2 + 2 bdot^2");
      out->lines[0].margin = v.margin_pointwise;
      out->lines[0].pass = v.margin_pointwise >= 1e-9;
      copy_name(out->lines[1], "sup |4a - (c+b)^2 - 2 bdot^2| <= (pi/T)^2");
      out->lines[1].margin = v.margin_linf;
      out->lines[1].pass = v.margin_linf >= 1e-9;
      copy_name(out->lines[2], "|c + mean(b)| > 0");
      out->lines[2].margin = v.margin_mean;
      out->lines[2].pass = v.margin_mean > 1e-12;
      out->n_lines = 3;
      out->pass = v.ok;
      std::snprintf(out->verdict, sizeof(out->verdict), "%s",
                    v.ok ? "nondegenerate" : "degenerate or undecided");
    } else if (w == "gains") {
      const ActuatorParams p = rc.actuator();
      const BracketSet br = bracket_constants(rc.e, p.voltage);
      const GainCaseReport r = gain_case_gates(p, br, T);
      int n = 0;
      copy_name(out->lines[n], "Q > 0: a_low - (c+b*)^2/4 - (bdot*)^2/2");
      out->lines[n].margin = r.margin_q_positive;
      out->lines[n].pass = r.margin_q_positive >= 0.0;
      ++n;
      copy_name(out->lines[n], "sup: (pi/T)^2 + c^2/4 - a_high");
      out->lines[n].margin = r.margin_linf;
      out->lines[n].pass = r.margin_linf > 0.0;
      ++n;
      copy_name(out->lines[n], "c + mean(b) bounded away from 0");
      out->lines[n].margin = r.margin_mean;
      out->lines[n].pass = r.margin_mean > 0.0;
      ++n;
      if (!std::isnan(r.margin_sign_gate)) {
        copy_name(out->lines[n], "damping sign gate");
        out->lines[n].margin = r.margin_sign_gate;
        out->lines[n].pass = r.margin_sign_gate > 0.0;
        ++n;
        copy_name(out->lines[n], "g2 + c Vmax/(1-xi2) > 0");
        out->lines[n].margin = r.margin_extra_gate;
        out->lines[n].pass = r.margin_extra_gate > 0.0;
        ++n;
      }
      out->n_lines = n;
      out->pass = r.tag != GainCase::None;
      const char* tags[] = {"a", "b", "c", "d", "none"};
      std::snprintf(out->verdict, sizeof(out->verdict),
                    "case=%s b*=%.6g bdot*=%.6g a_low=%.6g a_high=%.6g",
                    tags[static_cast<int>(r.tag)], r.b_star, r.bdot_star, r.a_lower,
                    r.a_upper);
    } else if (w == "squeeze") {
      const VoltageProfile profile = rc.voltage();
      const BracketSet br = bracket_constants(rc.e, profile);
      const SqueezeFlags f = squeeze_conditions(rc.gamma, br, T);
      const double bound = std::pow(std::numbers::pi / T, 2);
      copy_name(out->lines[0], "M <= (pi/T)^2");
      out->lines[0].margin = bound - f.M;
      out->lines[0].pass = f.m_ok;
      copy_name(out->lines[1], "N <= H(L*)");
      out->lines[1].margin = f.H - f.N;
      out->lines[1].pass = f.n_ok;
      out->n_lines = 2;
      out->pass = f.satisfied;
      std::snprintf(out->verdict, sizeof(out->verdict),
                    "N=%.6g a_hat=%.6g R=%.6g M=%.6g L*=%.6g H=%.6g", f.N, f.a_hat, f.R, f.M,
                    f.Lstar, f.H);
    } else if (w == "hn") {
      if (rc.delta != 0.0)
        fail(ErrorCode::Config, "hn scan requires a DC configuration (delta = 0)");
      const ActuatorParams p = rc.actuator();
      const EquilibriumPair eq = equilibria(rc.e, rc.v0);
      const char* names[2] = {"h_n scan at lower equilibrium", "h_n scan at upper equilibrium"};
      const double xs[2] = {eq.x1, eq.x2};
      bool all_ok = true;
      for (int i = 0; i < 2; ++i) {
        const DelayLinearization lin = linearize_at_equilibrium(p, xs[i]);
        double min_abs = std::numeric_limits<double>::infinity();
        bool ok = true;
        for (double dd = 0.0; dd < T; dd += 1e-2) {
          const NondegeneracyResult r = is_nondegenerate_delay(lin.A, lin.B, T, dd);
          min_abs = std::min(min_abs, r.min_abs);
          ok = ok && r.ok;
        }
        copy_name(out->lines[i], names[i]);
        out->lines[i].margin = min_abs - 1e-9;
        out->lines[i].pass = ok;
        all_ok = all_ok && ok;
      }
      out->n_lines = 2;
      out->pass = all_ok;
      std::snprintf(out->verdict, sizeof(out->verdict), "%s",
                    all_ok ? "no resonant delay in the scan" : "resonant delay found");
    } else {
      fail(ErrorCode::Config, "unknown check '" + w + "' (use hill, gains, squeeze, hn)");
    }
  });
}

}  // extern "C"
