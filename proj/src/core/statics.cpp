#include "statics.hpp"

#include <cmath>
#include <string>

namespace memsdde {

namespace {

constexpr double kThird2 = 2.0 / 3.0;
constexpr double kPullInLevel = 4.0 / 27.0;  // max of (1-x)x^2 on (0,1), at x = 2/3

double gap_cubic(double x) { return (1.0 - x) * x * x; }

}  // namespace

namespace detail {

double cubic_gap_root(double target, double lo, double hi) {
  double flo = gap_cubic(lo) - target;
  double fhi = gap_cubic(hi) - target;
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0)
    fail(ErrorCode::Internal, "cubic_gap_root: endpoints do not bracket a root");
  // bisect to interval width 1e-13, comfortably inside the 1e-12 contract
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = gap_cubic(mid) - target;
    if (fmid == 0.0) return mid;
    if (flo * fmid < 0.0) {
      hi = mid;
    } else {
      lo = mid;
      flo = fmid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

double pull_in_voltage(double e) {
  if (!(e > 0.0)) fail(ErrorCode::Config, "pull_in_voltage requires e > 0");
  return (2.0 / 9.0) * std::sqrt(3.0 / e);
}

EquilibriumPair equilibria(double e, double v0) {
  if (!(e > 0.0) || !(v0 > 0.0)) fail(ErrorCode::Config, "equilibria requires e > 0 and v0 > 0");
  const double vstar = pull_in_voltage(e);
  const double target = e * v0 * v0;
  if (std::abs(target - kPullInLevel) <= 1e-12 * kPullInLevel)
    return EquilibriumPair{kThird2, kThird2, true};
  if (v0 > vstar)
    fail(ErrorCode::PullInExceeded,
         "v0 = " + std::to_string(v0) + " exceeds the pull-in voltage " + std::to_string(vstar));
  return EquilibriumPair{detail::cubic_gap_root(target, 0.0, kThird2),
                         detail::cubic_gap_root(target, kThird2, 1.0), false};
}

Classification classify_equilibrium(const ActuatorParams& p, double x_star) {
  const double v0 = p.voltage.v0();
  const double residual = std::abs(gap_cubic(x_star) - p.e * v0 * v0);
  if (residual > 1e-8)
    fail(ErrorCode::NotAnEquilibrium,
         "equilibrium residual " + std::to_string(residual) + " exceeds 1e-8");

  // Jacobian [[0, 1], [(2-3x)/x, -dh/dv]]; trace -beta, determinant -(2-3x)/x.
  const double alpha = (2.0 - 3.0 * x_star) / x_star;
  const double beta = p.damping.dvel(x_star);
  const double disc = beta * beta + 4.0 * alpha;

  Classification out{};
  if (disc >= 0.0) {
    const double r = std::sqrt(disc);
    out.eig1 = std::complex<double>(0.5 * (-beta + r), 0.0);
    out.eig2 = std::complex<double>(0.5 * (-beta - r), 0.0);
  } else {
    const double im = 0.5 * std::sqrt(-disc);
    out.eig1 = std::complex<double>(-0.5 * beta, im);
    out.eig2 = std::complex<double>(-0.5 * beta, -im);
  }

  if (x_star < kThird2) {
    out.type = EquilibriumType::Saddle;
  } else {
    // spiral iff (dh/dv)^2 / 4 < (3x-2)/x, i.e. complex eigenvalues
    out.type = disc < 0.0 ? EquilibriumType::StableSpiral : EquilibriumType::StableNode;
  }
  return out;
}

BracketSet bracket_constants(double e, const VoltageProfile& voltage) {
  if (!(e > 0.0)) fail(ErrorCode::Config, "bracket_constants requires e > 0");
  const double vmin = voltage.min_value();
  const double vmax = voltage.max_value();
  const double tmin = e * vmin * vmin;
  const double tmax = e * vmax * vmax;
  if (!(tmin > 0.0) || tmin > tmax || tmax > kPullInLevel * (1.0 + 1e-12))
    fail(ErrorCode::VoltageRangeInvalid,
         "bracket_constants requires 0 < e Vmin^2 <= e Vmax^2 <= 4/27");

  BracketSet out{};
  if (std::abs(tmax - kPullInLevel) <= 1e-12 * kPullInLevel) {
    out.xi1 = out.xi2 = kThird2;
    out.degenerate = true;
  } else {
    out.xi1 = detail::cubic_gap_root(tmax, 0.0, kThird2);
    out.xi2 = detail::cubic_gap_root(tmax, kThird2, 1.0);
    out.degenerate = false;
  }
  if (std::abs(tmin - kPullInLevel) <= 1e-12 * kPullInLevel) {
    out.eta1 = out.eta2 = kThird2;
    out.degenerate = true;
  } else {
    out.eta1 = detail::cubic_gap_root(tmin, 0.0, kThird2);
    out.eta2 = detail::cubic_gap_root(tmin, kThird2, 1.0);
  }
  return out;
}

PhysicalParams PhysicalParams::defaults() {
  return PhysicalParams{21e-5, 3.8e-5, 3.96e-5, 320.0, 0.0014, 8.85e-12, 8.0, 8.0};
}

void PhysicalParams::validate() const {
  const bool ok = mass > 0.0 && gap > 0.0 && area > 0.0 && stiffness > 0.0 && damping >= 0.0 &&
                  permittivity > 0.0 && gain_pos > 0.0 && gain_vel > 0.0;
  if (!ok) fail(ErrorCode::Config, "physical parameters must be positive (damping may be zero)");
}

DimensionlessSet nondimensionalize(const PhysicalParams& p) {
  p.validate();
  DimensionlessSet out{};
  out.time_scale = std::sqrt(p.mass / p.stiffness);
  out.c = p.damping / std::sqrt(p.mass * p.stiffness);
  // the electrostatic coefficient scales with the cube of the rest gap length
  out.e = p.permittivity * p.area / (2.0 * p.stiffness * p.gap * p.gap * p.gap);
  out.g1 = p.gain_pos * p.gap;
  out.g2 = p.gain_vel * p.gap / out.time_scale;
  return out;
}

}  // namespace memsdde
