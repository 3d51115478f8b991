#include "orbits.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <string>

#include "dde_core.hpp"
#include "model.hpp"

namespace memsdde {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct SeriesEval {
  double x, xdot, xddot;
};

SeriesEval eval_series(const Eigen::VectorXd& c, int N, double w, double t) {
  SeriesEval out{c(0), 0.0, 0.0};
  for (int k = 1; k <= N; ++k) {
    const double kw = k * w;
    const double ck = std::cos(kw * t);
    const double sk = std::sin(kw * t);
    const double ak = c(k);
    const double bk = c(N + k);
    out.x += ak * ck + bk * sk;
    out.xdot += kw * (-ak * sk + bk * ck);
    out.xddot += kw * kw * (-ak * ck - bk * sk);
  }
  return out;
}

// Collocation defect at 4N equispaced nodes; false when the iterate leaves the
// physical domain x > 0.
bool defect_vector(const ActuatorParams& p, double T, const Eigen::VectorXd& c, int N,
                   Eigen::VectorXd& r) {
  const double w = kTwoPi / T;
  const int nodes = 4 * N;
  r.resize(nodes);
  for (int j = 0; j < nodes; ++j) {
    const double t = T * static_cast<double>(j) / nodes;
    const SeriesEval s = eval_series(c, N, w, t);
    if (!(s.x > 1e-12)) return false;
    const SeriesEval sd = p.d > 0.0 ? eval_series(c, N, w, t - p.d) : s;
    const double V = p.voltage.value(t) + p.g1 * (s.x - sd.x) + p.g2 * (s.xdot - sd.xdot);
    r(j) = s.xddot + p.damping.force(s.x, s.xdot) + s.x - 1.0 + p.e * V * V / (s.x * s.x);
    if (!std::isfinite(r(j))) return false;
  }
  return true;
}

Eigen::VectorXd resize_coeffs(const Eigen::VectorXd& c, int N_old, int N_new) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * N_new + 1);
  out(0) = c(0);
  const int n = std::min(N_old, N_new);
  for (int k = 1; k <= n; ++k) {
    out(k) = c(k);
    out(N_new + k) = c(N_old + k);
  }
  return out;
}

std::vector<std::complex<double>> sorted_eigenvalues(const Eigen::MatrixXd& M) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(M);
  std::vector<std::complex<double>> vals(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) vals[i] = es.eigenvalues()(i);
  // modulus descending; conjugate pairs tie-broken with +imag first so that
  // repeated runs pair the same member of the pair
  std::sort(vals.begin(), vals.end(), [](const auto& a, const auto& b) {
    const double ma = std::abs(a), mb = std::abs(b);
    if (ma != mb) return ma > mb;
    if (a.imag() != b.imag()) return a.imag() > b.imag();
    return a.real() > b.real();
  });
  return vals;
}

// Eigenvalues of a 2x2 matrix using an externally supplied (stable)
// determinant; avoids the catastrophic cancellation of det(M) when the trace
// is enormous, as for the monodromy of the saddle-branch orbit.
std::array<std::complex<double>, 2> eigen2_stable(const Eigen::Matrix2d& M, double det) {
  const double tr = M.trace();
  const double disc = tr * tr - 4.0 * det;
  std::array<std::complex<double>, 2> out;
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    const double q = 0.5 * (tr + (tr >= 0.0 ? s : -s));
    const double l1 = q;
    const double l2 = q != 0.0 ? det / q : 0.5 * (tr - s);
    if (std::abs(l1) >= std::abs(l2)) {
      out[0] = l1;
      out[1] = l2;
    } else {
      out[0] = l2;
      out[1] = l1;
    }
  } else {
    const double im = 0.5 * std::sqrt(-disc);
    out[0] = std::complex<double>(0.5 * tr, im);
    out[1] = std::complex<double>(0.5 * tr, -im);
  }
  return out;
}

// Variational coefficient matrices about the orbit of the delayed equation.
void variational_matrices(const ActuatorParams& p, const PeriodicOrbit& orbit, double t,
                          Eigen::Matrix2d& Ja, Eigen::Matrix2d& Jb) {
  const double x = orbit.x(t);
  const double v = orbit.xdot(t);
  double V;
  double xd = x, vd = v;
  if (p.d > 0.0) {
    xd = orbit.x(t - p.d);
    vd = orbit.xdot(t - p.d);
  }
  V = p.voltage.value(t) + p.g1 * (x - xd) + p.g2 * (v - vd);
  const double x2 = x * x;
  const double j21 = 2.0 * p.e * V * V / (x2 * x) - 2.0 * p.e * V * p.g1 / x2 - 1.0 -
                     p.damping.dpos(x, v);
  const double j22 = -2.0 * p.e * V * p.g2 / x2 - p.damping.dvel(x);
  Ja << 0.0, 1.0, j21, j22;
  Jb << 0.0, 0.0, 2.0 * p.e * V * p.g1 / x2, 2.0 * p.e * V * p.g2 / x2;
}

// Piecewise-cubic interpolant of the initial history segment of one basis
// column: y1 values at the m nodes plus the state at 0; nodal slopes by finite
// differences except at the right end, where the given velocity is used.
struct HistoryInterpolant {
  double d;
  int m;
  Eigen::VectorXd vals;    // m+1 values at s_i = -d + i d/m, i = 0..m
  Eigen::VectorXd slopes;  // dy1/ds at the same nodes
  double v_right;          // y2(0)

  void build() {
    const double h = d / m;
    slopes.resize(m + 1);
    if (m == 1) {
      slopes(0) = (vals(1) - vals(0)) / h;
    } else {
      slopes(0) = (-3.0 * vals(0) + 4.0 * vals(1) - vals(2)) / (2.0 * h);
      for (int i = 1; i < m; ++i) slopes(i) = (vals(i + 1) - vals(i - 1)) / (2.0 * h);
    }
    slopes(m) = v_right;
  }

  // value and derivative at s in [-d, 0]
  void eval(double s, double& y1, double& y2) const {
    const double h = d / m;
    int i = static_cast<int>(std::floor((s + d) / h));
    i = std::clamp(i, 0, m - 1);
    const double u = (s + d - i * h) / h;
    const double u2 = u * u;
    const double h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
    const double h10 = u * (1.0 - u) * (1.0 - u);
    const double h01 = u2 * (3.0 - 2.0 * u);
    const double h11 = u2 * (u - 1.0);
    y1 = h00 * vals(i) + h * h10 * slopes(i) + h01 * vals(i + 1) + h * h11 * slopes(i + 1);
    // derivative of the Hermite basis in u, divided by h
    const double d00 = (6.0 * u2 - 6.0 * u) / h;
    const double d10 = (3.0 * u2 - 4.0 * u + 1.0);
    const double d01 = (6.0 * u - 6.0 * u2) / h;
    const double d11 = (3.0 * u2 - 2.0 * u);
    y2 = d00 * vals(i) + d10 * slopes(i) + d01 * vals(i + 1) + d11 * slopes(i + 1);
  }
};

}  // namespace

PeriodicOrbit::PeriodicOrbit(double T, Eigen::VectorXd coeffs, double residual,
                             ActuatorParams params)
    : T_(T),
      N_(static_cast<int>((coeffs.size() - 1) / 2)),
      coeffs_(std::move(coeffs)),
      residual_(residual),
      params_(std::move(params)) {
  if (coeffs_.size() != 2 * N_ + 1) fail(ErrorCode::Internal, "odd coefficient layout expected");
}

double PeriodicOrbit::x(double t) const { return eval_series(coeffs_, N_, kTwoPi / T_, t).x; }
double PeriodicOrbit::xdot(double t) const {
  return eval_series(coeffs_, N_, kTwoPi / T_, t).xdot;
}
double PeriodicOrbit::xddot(double t) const {
  return eval_series(coeffs_, N_, kTwoPi / T_, t).xddot;
}

PeriodicOrbit PeriodicOrbit::shifted(double d) const {
  const double w = kTwoPi / T_;
  Eigen::VectorXd c = coeffs_;
  for (int k = 1; k <= N_; ++k) {
    const double ck = std::cos(k * w * d);
    const double sk = std::sin(k * w * d);
    const double ak = coeffs_(k);
    const double bk = coeffs_(N_ + k);
    c(k) = ak * ck - bk * sk;
    c(N_ + k) = ak * sk + bk * ck;
  }
  return PeriodicOrbit(T_, std::move(c), residual_, params_);
}

PeriodicOrbit find_periodic(const ActuatorParams& p, double T, int n_harmonics,
                            const OrbitGuess& guess, const OrbitOptions& opts) {
  p.validate();
  if (!(T > 0.0)) fail(ErrorCode::Config, "find_periodic requires T > 0");
  if (!(p.d < T)) fail(ErrorCode::Config, "find_periodic requires d < T");
  if (p.voltage.delta() > 0.0 && std::abs(T - p.voltage.period()) > 1e-12 * T)
    fail(ErrorCode::Config, "orbit period must match the drive period when delta > 0");
  if (n_harmonics < 1) fail(ErrorCode::Config, "find_periodic requires at least one harmonic");

  int N = n_harmonics;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * N + 1);
  double guess_mean;
  if (std::holds_alternative<double>(guess)) {
    guess_mean = std::get<double>(guess);
    c(0) = guess_mean;
  } else {
    const PeriodicOrbit& g = std::get<PeriodicOrbit>(guess);
    c = resize_coeffs(g.coeffs(), g.harmonics(), N);
    guess_mean = g.mean();
  }

  while (true) {
    Eigen::VectorXd r;
    if (!defect_vector(p, T, c, N, r))
      fail(ErrorCode::NoConvergence, "initial orbit guess leaves the physical domain");
    double res = r.cwiseAbs().maxCoeff();

    bool converged = res <= 1e-14;
    for (int iter = 0; iter < opts.max_newton && !converged; ++iter) {
      // forward-difference Jacobian of the defect in coefficient space
      Eigen::MatrixXd J(r.size(), c.size());
      Eigen::VectorXd r_pert;
      for (Eigen::Index j = 0; j < c.size(); ++j) {
        Eigen::VectorXd cp = c;
        cp(j) += opts.fd_step;
        if (!defect_vector(p, T, cp, N, r_pert))
          fail(ErrorCode::NoConvergence, "orbit iterate left the physical domain");
        J.col(j) = (r_pert - r) / opts.fd_step;
      }
      const Eigen::VectorXd delta = J.colPivHouseholderQr().solve(r);

      double alpha = 1.0;
      bool improved = false;
      for (int ls = 0; ls < 12; ++ls) {
        const Eigen::VectorXd c_try = c - alpha * delta;
        Eigen::VectorXd r_try;
        if (defect_vector(p, T, c_try, N, r_try)) {
          const double res_try = r_try.cwiseAbs().maxCoeff();
          if (res_try < res) {
            c = c_try;
            r = r_try;
            res = res_try;
            improved = true;
            break;
          }
        }
        alpha *= 0.5;
      }
      if (!improved) break;  // stalled; verdict by the final residual check
      if (res <= 1e-14) converged = true;
    }

    if (!(res <= opts.tol))
      fail(ErrorCode::NoConvergence,
           "orbit solver stalled at residual " + std::to_string(res));

    // guard against jumping to the other branch from a bad predictor
    if (std::abs(c(0) - guess_mean) > 0.2)
      fail(ErrorCode::NoConvergence, "orbit converged far from the seeded branch");

    // spectral tail: trailing quarter of coefficient amplitudes must be
    // negligible, otherwise double the harmonic count and re-solve
    double scale = std::abs(c(0));
    for (int k = 1; k <= N; ++k)
      scale = std::max(scale, std::hypot(c(k), c(N + k)));
    double tail = 0.0;
    for (int k = 3 * N / 4 + 1; k <= N; ++k)
      tail = std::max(tail, std::hypot(c(k), c(N + k)));
    if (scale > 0.0 && tail > opts.tail_rel * scale && 2 * N <= opts.max_harmonics) {
      c = resize_coeffs(c, N, 2 * N);
      N *= 2;
      continue;
    }

    const double w = kTwoPi / T;
    for (int j = 0; j < 4 * N; ++j) {
      const double xj = eval_series(c, N, w, T * static_cast<double>(j) / (4 * N)).x;
      if (!(xj > 0.0))
        fail(ErrorCode::NegativeGapOrbit, "reconstructed orbit violates x > 0");
    }
    return PeriodicOrbit(T, std::move(c), res, p);
  }
}

Monodromy monodromy_ode(const ActuatorParams& p, const PeriodicOrbit& orbit, int substeps) {
  if (p.d != 0.0) fail(ErrorCode::Config, "monodromy_ode requires d = 0");
  const double T = orbit.period();
  const double h = T / substeps;

  auto jac = [&](double t) {
    Eigen::Matrix2d Ja, Jb;
    variational_matrices(p, orbit, t, Ja, Jb);
    // at d = 0 perturbations are non-delayed as well, so the variational
    // matrix is the total derivative; the gain terms cancel in the sum
    return (Ja + Jb).eval();
  };

  Eigen::Matrix2d Y = Eigen::Matrix2d::Identity();
  double det = 1.0;
  const Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
  for (int k = 0; k < substeps; ++k) {
    const double t = k * h;
    // one-step transition matrix; the per-step determinant product stays
    // well-conditioned even when the accumulated matrix entries are huge
    const Eigen::Matrix2d K1 = jac(t);
    const Eigen::Matrix2d Jm = jac(t + 0.5 * h);
    const Eigen::Matrix2d K2 = Jm * (I + 0.5 * h * K1);
    const Eigen::Matrix2d K3 = Jm * (I + 0.5 * h * K2);
    const Eigen::Matrix2d K4 = jac(t + h) * (I + h * K3);
    const Eigen::Matrix2d S = I + h / 6.0 * (K1 + 2.0 * K2 + 2.0 * K3 + K4);
    Y = (S * Y).eval();
    det *= S.determinant();
  }

  Monodromy out{Y, eigen2_stable(Y, det), det};
  return out;
}

namespace {

// Propagates all m+2 basis columns of the discretized period map at once; the
// coefficient matrices are shared across columns, the delayed matrix values
// come from a rolling window of step records.
Eigen::MatrixXd period_map_matrix(const ActuatorParams& p, const PeriodicOrbit& orbit, int m,
                                  int substeps_per_span) {
  const double d = p.d;
  const double T = orbit.period();
  const int ncols = m + 2;
  const double h = d / substeps_per_span;

  // initial basis segments
  std::vector<HistoryInterpolant> init(ncols);
  for (int j = 0; j < ncols; ++j) {
    init[j].d = d;
    init[j].m = m;
    init[j].vals = Eigen::VectorXd::Zero(m + 1);
    init[j].v_right = 0.0;
    if (j < m)
      init[j].vals(j) = 1.0;
    else if (j == m)
      init[j].vals(m) = 1.0;  // y1(0) = 1
    else
      init[j].v_right = 1.0;  // y2(0) = 1
    init[j].build();
  }

  using Mat = Eigen::Matrix<double, 2, Eigen::Dynamic>;
  struct Rec {
    double t0, t1;
    Mat y0, y1, f0, f1;
  };
  std::deque<Rec> window;

  auto delayed = [&](double tq) -> Mat {
    Mat out(2, ncols);
    if (tq <= 0.0) {
      for (int j = 0; j < ncols; ++j) {
        double y1, y2;
        init[j].eval(std::max(tq, -d), y1, y2);
        out(0, j) = y1;
        out(1, j) = y2;
      }
      return out;
    }
    for (auto it = window.rbegin(); it != window.rend(); ++it) {
      if (tq >= it->t0 - 1e-12) {
        const Rec& r = *it;
        const double hh = r.t1 - r.t0;
        const double s = std::clamp((tq - r.t0) / hh, 0.0, 1.0);
        const double s2 = s * s;
        const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        const double h10 = s * (1.0 - s) * (1.0 - s);
        const double h01 = s2 * (3.0 - 2.0 * s);
        const double h11 = s2 * (s - 1.0);
        return h00 * r.y0 + hh * h10 * r.f0 + h01 * r.y1 + hh * h11 * r.f1;
      }
    }
    fail(ErrorCode::Internal, "delayed lookup fell outside the rolling window");
  };

  auto coeffs = [&](double t, Eigen::Matrix2d& Ja, Eigen::Matrix2d& Jb) {
    variational_matrices(p, orbit, t, Ja, Jb);
  };

  Mat Y = Mat::Zero(2, ncols);
  Y(0, m) = 1.0;
  Y(1, m + 1) = 1.0;

  double t = 0.0;
  Eigen::Matrix2d Ja0, Jb0;
  coeffs(0.0, Ja0, Jb0);
  Mat f_at_t = Ja0 * Y + Jb0 * delayed(-d);

  while (t < T - 1e-12 * T) {
    const double hs = std::min(h, T - t);
    Eigen::Matrix2d Jam, Jbm, Ja1, Jb1;
    coeffs(t + 0.5 * hs, Jam, Jbm);
    coeffs(t + hs, Ja1, Jb1);
    const Mat yd_mid = delayed(t + 0.5 * hs - d);
    const Mat yd_end = delayed(t + hs - d);

    const Mat K1 = hs == h ? f_at_t : Ja0 * Y + Jb0 * delayed(t - d);
    const Mat K2 = Jam * (Y + 0.5 * hs * K1) + Jbm * yd_mid;
    const Mat K3 = Jam * (Y + 0.5 * hs * K2) + Jbm * yd_mid;
    const Mat K4 = Ja1 * (Y + hs * K3) + Jb1 * yd_end;
    Mat Y1 = Y + hs / 6.0 * (K1 + 2.0 * K2 + 2.0 * K3 + K4);
    Mat f1 = Ja1 * Y1 + Jb1 * yd_end;

    window.push_back(Rec{t, t + hs, Y, Y1, K1, f1});
    while (window.front().t1 < t + hs - d - 2.0 * h) window.pop_front();

    Y = std::move(Y1);
    f_at_t = std::move(f1);
    Ja0 = Ja1;
    Jb0 = Jb1;
    t += hs;
  }

  // sample the image segment: y1 at the shifted nodes, then the final state
  Eigen::MatrixXd map(ncols, ncols);
  for (int i = 0; i < m; ++i) {
    const double ti = T - d + i * (d / m);
    const Mat vals = ti >= T ? Y : delayed(ti);
    map.row(i) = vals.row(0);
  }
  map.row(m) = Y.row(0);
  map.row(m + 1) = Y.row(1);
  return map;
}

}  // namespace

FloquetResult floquet_dde(const ActuatorParams& p, const PeriodicOrbit& orbit, int m,
                          const FloquetOptions& opts) {
  const double T = orbit.period();
  if (!(p.d > 0.0) || !(p.d < T))
    fail(ErrorCode::Config, "floquet_dde requires 0 < d < T");
  if (m < 2) fail(ErrorCode::Config, "floquet_dde requires m >= 2");

  auto substeps_for = [&](int mm) {
    if (opts.substeps_per_span > 0) return opts.substeps_per_span;
    // a multiple of m keeps the propagated derivative discontinuities of the
    // hat-function basis on step boundaries
    return mm * std::max(1, (8 + mm - 1) / mm);
  };

  const Eigen::MatrixXd M1 = period_map_matrix(p, orbit, m, substeps_for(m));
  auto mult1 = sorted_eigenvalues(M1);
  if (!opts.richardson)
    return FloquetResult{std::move(mult1), std::numeric_limits<double>::quiet_NaN(), m};

  const Eigen::MatrixXd M2 = period_map_matrix(p, orbit, 2 * m, substeps_for(2 * m));
  auto mult2 = sorted_eigenvalues(M2);
  const double move = std::abs(mult1.front() - mult2.front());
  if (move > opts.accept_tol)
    fail(ErrorCode::NotConverged, "dominant multiplier moved by " + std::to_string(move) +
                                      " between m and 2m history nodes");
  return FloquetResult{std::move(mult2), move, 2 * m};
}

HillCoefficients make_hill_coefficients(const ActuatorParams& p, const PeriodicOrbit& orbit,
                                        int samples) {
  if (p.damping.kind != DampingKind::Linear)
    fail(ErrorCode::Inapplicable, "hill coefficients require linear damping");
  const double T = orbit.period();
  HillCoefficients h;
  h.c = p.damping.coeff;
  h.T = T;
  h.a.resize(samples);
  h.b.resize(samples);
  h.bdot.resize(samples);
  for (int i = 0; i < samples; ++i) {
    const double t = T * static_cast<double>(i) / samples;
    const double psi = orbit.x(t);
    const double psid = orbit.xdot(t);
    const double V = p.voltage.value(t);
    const double Vd = p.voltage.derivative(t);
    const double psi2 = psi * psi;
    h.a[i] = 1.0 - 2.0 * p.e * V * V / (psi2 * psi) + 2.0 * p.e * p.g1 * V / psi2;
    h.b[i] = 2.0 * p.e * p.g2 * V / psi2;
    h.bdot[i] = 2.0 * p.e * p.g2 * (Vd / psi2 - 2.0 * V * psid / (psi2 * psi));
  }
  return h;
}

StabilityReport stability_report(const ActuatorParams& p, double T) {
  p.validate();
  StabilityReport rep;
  const double v0 = p.voltage.v0();
  const EquilibriumPair eq = equilibria(p.e, v0);

  const DelayLinearization lower = linearize_at_equilibrium(p, eq.x1);
  const DelayLinearization upper = linearize_at_equilibrium(p, eq.x2);
  rep.degree_sign_lower = poincare_degree_sign(lower.A, lower.B);
  rep.degree_sign_upper = poincare_degree_sign(upper.A, upper.B);
  rep.d0 = delay_bound_d0(upper);

  const BracketSet br = bracket_constants(p.e, p.voltage);

  if (p.damping.kind == DampingKind::Linear) {
    ActuatorParams p0 = p;
    p0.d = 0.0;
    const PeriodicOrbit orbit = find_periodic(p0, T, 32, OrbitGuess{eq.x2});
    rep.hill = hill_nondegenerate(make_hill_coefficients(p0, orbit));
    rep.hill_ok = rep.hill.ok;
    rep.has_hill = true;
    if (p.g2 != 0.0) {
      rep.gain_gates = gain_case_gates(p, br, T);
      rep.gain_case = rep.gain_gates.tag;
      rep.has_gain_case = true;
    } else {
      rep.notes += "gain-case gates need g2 != 0; ";
    }
  } else {
    rep.notes += "hill and gain-case gates need linear damping; ";
    rep.squeeze = squeeze_conditions(p.damping.coeff, br, T);
    rep.has_squeeze = true;
  }
  return rep;
}

Branch continue_branch(const PeriodicOrbit& start, BranchParam param, double to, int steps,
                       const ContinuationOptions& opts) {
  const ActuatorParams base = start.params();
  const double T = start.period();
  double from;
  switch (param) {
    case BranchParam::G1: from = base.g1; break;
    case BranchParam::G2: from = base.g2; break;
    default: from = base.d; break;
  }
  if (param == BranchParam::Delay && (to < 0.0 || to >= T))
    fail(ErrorCode::Config, "delay continuation path must stay in [0, T)");
  if (steps < 0) fail(ErrorCode::Config, "continuation requires steps >= 0");

  auto with_value = [&](double v) {
    ActuatorParams q = base;
    switch (param) {
      case BranchParam::G1: q.g1 = v; break;
      case BranchParam::G2: q.g2 = v; break;
      default: q.d = v; break;
    }
    return q;
  };

  auto multipliers_of = [&](const ActuatorParams& q,
                            const PeriodicOrbit& orb) -> std::vector<std::complex<double>> {
    if (!opts.with_multipliers) return {};
    if (q.d == 0.0) {
      const Monodromy mono = monodromy_ode(q, orb);
      return {mono.multipliers[0], mono.multipliers[1]};
    }
    return floquet_dde(q, orb, opts.floquet_m).multipliers;
  };

  Branch branch{param, {}, false, ""};
  branch.points.push_back(BranchPoint{from, start, multipliers_of(base, start)});
  if (steps == 0 || to == from) return branch;

  PeriodicOrbit prev = start;
  for (int i = 1; i <= steps; ++i) {
    const double v = from + (to - from) * static_cast<double>(i) / steps;
    const ActuatorParams q = with_value(v);
    try {
      OrbitOptions oo = opts.orbit;
      oo.tol = opts.branch_tol;
      PeriodicOrbit orb = find_periodic(q, T, prev.harmonics(), OrbitGuess{prev}, oo);
      branch.points.push_back(BranchPoint{v, orb, multipliers_of(q, orb)});
      prev = std::move(orb);
    } catch (const Error& e) {
      branch.truncated = true;
      branch.diagnostic = "stopped at parameter " + std::to_string(v) + ": " + e.what();
      break;
    }
  }
  return branch;
}

}  // namespace memsdde
