#pragma once

#include <Eigen/Dense>
#include <complex>
#include <variant>
#include <vector>

#include "stability.hpp"
#include "types.hpp"

namespace memsdde {

// Truncated Fourier representation of a T-periodic solution:
//   x(t) = a0 + sum_k (ak cos(k w t) + bk sin(k w t)),  w = 2 pi / T.
// The delayed value x(t - d) is an exact evaluation in this basis.
class PeriodicOrbit {
 public:
  PeriodicOrbit(double T, Eigen::VectorXd coeffs, double residual, ActuatorParams params);

  double period() const { return T_; }
  int harmonics() const { return N_; }
  double residual() const { return residual_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }  // [a0, a1..aN, b1..bN]
  const ActuatorParams& params() const { return params_; }

  double mean() const { return coeffs_(0); }
  double x(double t) const;
  double xdot(double t) const;
  double xddot(double t) const;

  // Same trajectory with the time origin moved by d: y(t) = x(t - d).
  PeriodicOrbit shifted(double d) const;

 private:
  double T_;
  int N_;
  Eigen::VectorXd coeffs_;
  double residual_;
  ActuatorParams params_;
};

using OrbitGuess = std::variant<double, PeriodicOrbit>;

struct OrbitOptions {
  double tol = 1e-10;   // sup-norm bound on the collocation defect
  int max_newton = 50;
  double fd_step = 1e-7;
  double tail_rel = 1e-12;  // relative bound on the trailing quarter of coefficients
  int max_harmonics = 256;
};

// Trigonometric collocation at 4N equispaced nodes solved by damped
// Gauss-Newton; the returned orbit carries the sup defect over the nodes.
PeriodicOrbit find_periodic(const ActuatorParams& p, double T, int n_harmonics,
                            const OrbitGuess& guess, const OrbitOptions& opts = {});

enum class BranchParam { G1, G2, Delay };

struct BranchPoint {
  double value;
  PeriodicOrbit orbit;
  std::vector<std::complex<double>> multipliers;  // dominant first
};

struct Branch {
  BranchParam param;
  std::vector<BranchPoint> points;
  bool truncated = false;
  std::string diagnostic;
};

struct ContinuationOptions {
  OrbitOptions orbit;
  double branch_tol = 1e-9;  // residual bound for accepted branch members
  int floquet_m = 64;
  bool with_multipliers = true;
};

// Natural-parameter continuation seeded by the previous orbit; Newton failure
// truncates the branch (interpreted as leaving the local neighborhood) and is
// reported through `truncated`, not an exception.
Branch continue_branch(const PeriodicOrbit& start, BranchParam param, double to, int steps,
                       const ContinuationOptions& opts = {});

struct Monodromy {
  Eigen::Matrix2d M;
  std::array<std::complex<double>, 2> multipliers;
  double det;  // accumulated per-step determinant product, stable for stiff orbits
};

// Fundamental solution of the 2x2 variational equation over one period (d = 0).
Monodromy monodromy_ode(const ActuatorParams& p, const PeriodicOrbit& orbit,
                        int substeps = 8192);

struct FloquetOptions {
  int substeps_per_span = 0;  // 0: auto, a multiple of m with at least 8 per span
  bool richardson = true;     // accept only if the m vs 2m dominant change is <= 1e-4
  double accept_tol = 1e-4;
};

struct FloquetResult {
  std::vector<std::complex<double>> multipliers;  // sorted by modulus, descending
  double convergence;                             // |mu_dom(m) - mu_dom(2m)|
  int m;
};

// Discretized period map of the linearized DDE on m history nodes over [-d, 0]
// plus the current state; the (m+2)-dimensional monodromy is built by
// propagating all basis columns through the variational equation at once.
FloquetResult floquet_dde(const ActuatorParams& p, const PeriodicOrbit& orbit, int m,
                          const FloquetOptions& opts = {});

// Hill coefficients of the linearization about an orbit (linear damping only):
//   a(t) = 1 - 2 e V^2 / psi^3 + 2 e g1 V / psi^2,  b(t) = 2 e g2 V / psi^2.
HillCoefficients make_hill_coefficients(const ActuatorParams& p, const PeriodicOrbit& orbit,
                                        int samples = 4096);

// Everything the linear analysis knows about one configuration; every flag is
// computed (with its margin) or marked inapplicable in `notes`, never guessed.
struct StabilityReport {
  double d0 = 0.0;
  int degree_sign_lower = 0;
  int degree_sign_upper = 0;
  bool hill_ok = false;
  HillVerdict hill{};
  GainCase gain_case = GainCase::None;
  GainCaseReport gain_gates{};
  SqueezeFlags squeeze{};
  bool has_hill = false;
  bool has_gain_case = false;
  bool has_squeeze = false;
  std::string notes;
};

// Assembles the report for a DC-reducible configuration (delta may be
// nonzero; the delay bound and degree signs use the DC equilibria).
StabilityReport stability_report(const ActuatorParams& p, double T);

}  // namespace memsdde
