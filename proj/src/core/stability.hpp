#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "statics.hpp"
#include "types.hpp"

namespace memsdde {

// Linearization of the delayed system at an equilibrium (x_star, 0):
//   X'(t) = A X(t) + B X(t - d)
// with A = [[0, 1], [a - g1hat, b - g2hat]] and B = [[0, 0], [g1hat, g2hat]].
struct DelayLinearization {
  Eigen::Matrix2d A;
  Eigen::Matrix2d B;
  double a;      // (2 - 3 x2) / x2, negative on the upper branch
  double b;      // -dh/dv at (x_star, 0): -c (linear), -gamma/x^3 (squeeze)
  double g1hat;  // 2 (1 - x2) g1 / v0
  double g2hat;  // 2 (1 - x2) g2 / v0
};

// Closed-form solution C of (A+B)^T C + C (A+B) = -I for the 2x2 companion
// matrix [[0,1],[a,b]] with a < 0, b < 0, plus the eigenvalue ratio
// lambda = lambda_min(C)/lambda_max(C).
struct LyapunovCertificate {
  Eigen::Matrix2d C;
  double lambda_ratio;
  double residual_inf;  // ||(A+B)^T C + C (A+B) + I||_inf
};

// T-periodic Hill coefficients sampled on a uniform grid, with the analytic
// derivative of b; the damped Hill equation is y'' + (c + b(t)) y' + a(t) y = 0.
struct HillCoefficients {
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> bdot;
  double c = 0.0;
  double T = 0.0;
};

struct HillVerdict {
  bool ok;
  double margin_pointwise;  // min_t (4a - (c+b)^2 - 2 bdot^2)
  double margin_linf;       // (pi/T)^2 - max_t |4a - (c+b)^2 - 2 bdot^2|
  double margin_mean;       // |c + mean(b)|
};

enum class GainCase { A, B, C, D, None };

// Delay-continuation gate evaluation: bounds on the Hill coefficients of the
// linearization about the upper-branch orbit, split by the signs of the gains.
struct GainCaseReport {
  GainCase tag = GainCase::None;
  GainCase evaluated = GainCase::None;  // branch selected by the gain signs
  double b_star;                        // 2 g2 (1 - xi2) / Vmax
  double bdot_star;                     // bound on |b'(t)|
  double a_lower;                       // lower bound a_* for a(t)
  double a_upper;                       // upper bound a^* for a(t)
  double margin_q_positive;             // a_* - (c+b*)^2/4 - (bdot*)^2/2
  double margin_linf;                   // (pi/T)^2 + c^2/4 - a^*
  double margin_mean;                   // distance of c + mean-b bound from 0
  double margin_sign_gate;              // only for g2 < 0: best side of the damping gate
  double margin_extra_gate;             // only for g2 < 0: g2 + c Vmax/(1 - xi2)
};

// Squeeze-film existence constants: R solves R - ln(R+1) = a_hat (eta2 - xi2),
// M = 3 gamma R / eta2^4 + (3 eta2 - 2)/eta2, L* solves
// sin(T sqrt(L)) = T sqrt(L) (L - M)/(L + M) on [M, (pi/T)^2].
struct SqueezeFlags {
  double N;
  double a_hat;
  double R;
  double M;
  double Lstar;   // NaN when M > (pi/T)^2
  double H;       // H(L*) = (L*-M)/sqrt(L*) cot(T sqrt(L*)/2), NaN when L* undefined
  bool m_ok;      // M <= (pi/T)^2
  bool n_ok;      // N <= H(L*)
  bool satisfied;
};

DelayLinearization linearize_at_equilibrium(const ActuatorParams& p, double x_star);

LyapunovCertificate lyapunov_certificate(const DelayLinearization& lin);

// Explicit delay-stability bound
//   d0 = sqrt(lambda) |a| / (|g1hat+g2hat| max{1,(a-1)/b}
//        (max{1,|a-g1hat|+|b-g2hat|} + |g1hat+g2hat|)).
// Returns +infinity when g1hat + g2hat = 0 (no delayed term).
double delay_bound_d0(const DelayLinearization& lin);

// General n x n delay bound: solves the Lyapunov equation numerically and
// evaluates tau0 = (2 (||A||+||B||) ||CB||)^-1 sqrt(lmin(C)/lmax(C)) in the
// infinity norm. Returns +infinity for B = 0; throws NotHurwitz otherwise.
double khusainov_tau0(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

// h_n(d) = det((2 n pi i / T) I - A - exp(-2 n pi i d / T) B).
std::complex<double> hn_determinant(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double T,
                                    double d, int n);

struct NondegeneracyResult {
  bool ok;
  int witness_n;   // offending frequency index when !ok
  double min_abs;  // smallest |h_n(d)| over the scanned range
};

// True iff |h_n(d)| > tol for all |n| <= n_max with
// n_max = ceil(T (||A||_2 + ||B||_2) / (2 pi)); beyond that the frequency
// 2 n pi / T exceeds the spectral bound of A + e^{-i theta} B.
NondegeneracyResult is_nondegenerate_delay(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                           double T, double d, double tol = 1e-9);

// Sign of the Poincare-map degree: (-1)^2 sgn(det(A+B)) for the planar system.
int poincare_degree_sign(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

// Velocity bound for a T-periodic solution confined to [sigma, rho]:
//   Lambda = c (rho - sigma)
//          + max{|1 - sigma - e Vmin^2/rho^2|, |1 - rho - e Vmax^2/sigma^2|} T.
double velocity_bound(double sigma, double rho, double c, double e, const VoltageProfile& voltage,
                      double T);

// Nondegeneracy of the damped Hill equation: pointwise 4a >= (c+b)^2 + 2 bdot^2,
// ||4a - (c+b)^2 - 2 bdot^2||_inf <= (pi/T)^2, and c + mean(b) != 0.
HillVerdict hill_nondegenerate(const HillCoefficients& h);

// Requires linear damping and g2 != 0 (Inapplicable otherwise).
GainCaseReport gain_case_gates(const ActuatorParams& p, const BracketSet& brackets, double T);

SqueezeFlags squeeze_conditions(double gamma, const BracketSet& brackets, double T);

// Delay bound over a DC-voltage grid for both damping variants at fixed
// gains. The squeeze column reads the damping parameter as gamma/(1-x2)^3 at
// the upper equilibrium, which yields the bell-shaped profile of this sweep;
// per-configuration squeeze analysis (delay_bound_d0 on a squeeze
// linearization) keeps the gap-consistent gamma/x2^3.
struct DelaySweepRow {
  double v0;
  double d0_linear;
  double d0_squeeze;
};
std::vector<DelaySweepRow> delay_bound_sweep(double e, double c, double gamma, double g1,
                                             double g2, double v0_lo, double v0_hi,
                                             double v0_step);

namespace detail {
// Unique nonnegative root of R - ln(R+1) = target (target >= 0).
double solve_r_offset(double target);
// Root of sin(T sqrt(L)) = T sqrt(L) (L-M)/(L+M) on [M, (pi/T)^2];
// requires M <= (pi/T)^2, throws NoLstarRoot when no sign change exists.
double solve_lstar(double M, double T);
}  // namespace detail

}  // namespace memsdde
