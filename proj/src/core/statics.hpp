#pragma once

#include <complex>

#include "types.hpp"

namespace memsdde {

// Roots of (1 - x) x^2 = e v0^2 bracketing the two equilibrium gaps.
struct EquilibriumPair {
  double x1;        // in (0, 2/3)
  double x2;        // in (2/3, 1)
  bool degenerate;  // both equal 2/3 at exact pull-in
};

// Constant upper/lower solutions: xi solve (1-x)x^2 = e Vmax^2, eta solve
// (1-x)x^2 = e Vmin^2, ordered 0 < eta1 <= xi1 < 2/3 < xi2 <= eta2 < 1.
struct BracketSet {
  double xi1;
  double eta1;
  double xi2;
  double eta2;
  bool degenerate;  // xi1 = xi2 = 2/3 when e Vmax^2 hits the pull-in value 4/27
};

enum class EquilibriumType { Saddle, StableSpiral, StableNode };

struct Classification {
  EquilibriumType type;
  std::complex<double> eig1;
  std::complex<double> eig2;
};

// Parameters of the physical (unit-carrying) equation.
struct PhysicalParams {
  double mass;      // kg
  double gap;       // m, rest gap length
  double area;      // m^2, electrode facing area
  double stiffness; // N/m
  double damping;   // N s/m
  double permittivity;  // F/m
  double gain_pos;  // V/m
  double gain_vel;  // V s/m

  static PhysicalParams defaults();  // the reference device
  void validate() const;
};

struct DimensionlessSet {
  double c;
  double e;
  double g1;
  double g2;
  double time_scale;  // seconds per dimensionless time unit
};

// Threshold DC voltage (2/9) sqrt(3/e) past which no equilibrium exists.
double pull_in_voltage(double e);

// Both equilibria located by bisection to absolute tolerance 1e-12.
// Throws PullInExceeded for v0 above the pull-in voltage; at the exact
// threshold the degenerate double root 2/3 is reported instead.
EquilibriumPair equilibria(double e, double v0);

// Local type of the autonomous equilibrium (x_star, 0); requires the residual
// of (1-x)x^2 = e v0^2 to be below 1e-8.
Classification classify_equilibrium(const ActuatorParams& p, double x_star);

// Requires 0 < Vmin^2 <= Vmax^2 <= 4/(27 e).
BracketSet bracket_constants(double e, const VoltageProfile& voltage);

DimensionlessSet nondimensionalize(const PhysicalParams& p);

namespace detail {
// Root of (1 - x) x^2 = target inside [lo, hi]; plain bisection, the iterate
// is robust across the pull-in double root where Newton stalls.
double cubic_gap_root(double target, double lo, double hi);
}  // namespace detail

}  // namespace memsdde
