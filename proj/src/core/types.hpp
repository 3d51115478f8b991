#pragma once

#include <cmath>
#include <vector>

#include "errors.hpp"

namespace memsdde {

// One Fourier component of the zero-mean AC waveform: k >= 1 excludes any DC
// contribution, so the mean of delta*v(t) over a period is zero by construction.
struct Harmonic {
  int k;
  double cos_coeff;
  double sin_coeff;
};

// Drive voltage V(t) = v0 + delta * sum_k (c_k cos(2 pi k t / T) + s_k sin(2 pi k t / T)).
// Waveforms are finite harmonic sums so that delayed evaluation and
// differentiation are exact; arbitrary callables are not accepted.
class VoltageProfile {
 public:
  VoltageProfile(double v0, double delta, std::vector<Harmonic> harmonics, double period);

  // DC profile; the period is still needed by periodic-orbit routines.
  static VoltageProfile dc(double v0, double period);
  // v0 + delta*cos(2 pi t / T), the canonical single-harmonic drive.
  static VoltageProfile cosine(double v0, double delta, double period);

  double value(double t) const;
  double derivative(double t) const;

  double v0() const { return v0_; }
  double delta() const { return delta_; }
  double period() const { return period_; }
  const std::vector<Harmonic>& harmonics() const { return harmonics_; }

  // Extrema scanned on a uniform 4096-point grid over one period (the grid
  // contains the exact extrema of pure even/odd harmonics).
  double min_value() const { return vmin_; }
  double max_value() const { return vmax_; }
  double max_derivative() const { return vdot_max_; }

 private:
  double v0_;
  double delta_;
  double period_;
  std::vector<Harmonic> harmonics_;
  double vmin_;
  double vmax_;
  double vdot_max_;
};

enum class DampingKind { Linear, SqueezeFilm };

// Damping in the gap coordinate: h(x, v) = c*v (linear) or gamma*v/x^3 (squeeze film).
struct DampingModel {
  DampingKind kind = DampingKind::Linear;
  double coeff = 0.0;

  static DampingModel linear(double c);
  static DampingModel squeeze(double gamma);

  double force(double x, double v) const {
    return kind == DampingKind::Linear ? coeff * v : coeff * v / (x * x * x);
  }
  // d h / d v, independent of v for both variants.
  double dvel(double x) const {
    return kind == DampingKind::Linear ? coeff : coeff / (x * x * x);
  }
  // d h / d x.
  double dpos(double x, double v) const {
    return kind == DampingKind::Linear ? 0.0 : -3.0 * coeff * v / (x * x * x * x);
  }
};

// State of the movable electrode in gap coordinates; the physical domain is x > 0
// (x = 0 is the pull-in contact manifold).
struct State {
  double x = 0.0;
  double v = 0.0;
};

// Dimensionless parameters of the delayed actuator equation.
struct ActuatorParams {
  double e;               // electrostatic coefficient, > 0
  DampingModel damping;
  double g1 = 0.0;        // position feedback gain
  double g2 = 0.0;        // velocity feedback gain
  double d = 0.0;         // delay, >= 0
  VoltageProfile voltage;

  double period() const { return voltage.period(); }
  void validate() const;
};

}  // namespace memsdde
