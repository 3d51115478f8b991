#include "model.hpp"

#include <cmath>
#include <numbers>

namespace memsdde {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kScanGrid = 4096;

// Reduce t into [0, T) before forming phases so that evaluation at exact
// multiples of T reproduces the t = 0 value bit for bit.
double reduce_period(double t, double period) {
  double u = std::fmod(t, period);
  if (u < 0.0) u += period;
  return u;
}

}  // namespace

VoltageProfile::VoltageProfile(double v0, double delta, std::vector<Harmonic> harmonics,
                               double period)
    : v0_(v0), delta_(delta), period_(period), harmonics_(std::move(harmonics)) {
  if (!(v0 > 0.0) || !std::isfinite(v0))
    fail(ErrorCode::VoltageRangeInvalid, "voltage profile requires v0 > 0");
  if (!(delta >= 0.0) || !std::isfinite(delta))
    fail(ErrorCode::VoltageRangeInvalid, "voltage profile requires delta >= 0");
  if (!(period > 0.0) || !std::isfinite(period))
    fail(ErrorCode::VoltageRangeInvalid, "voltage profile requires period > 0");
  for (const Harmonic& h : harmonics_) {
    if (h.k < 1) fail(ErrorCode::VoltageRangeInvalid, "harmonic index k must be >= 1");
    if (!std::isfinite(h.cos_coeff) || !std::isfinite(h.sin_coeff))
      fail(ErrorCode::VoltageRangeInvalid, "harmonic coefficients must be finite");
  }

  vmin_ = value(0.0);
  vmax_ = vmin_;
  vdot_max_ = 0.0;
  for (int i = 0; i < kScanGrid; ++i) {
    const double t = period_ * static_cast<double>(i) / kScanGrid;
    const double v = value(t);
    vmin_ = std::min(vmin_, v);
    vmax_ = std::max(vmax_, v);
    vdot_max_ = std::max(vdot_max_, std::abs(derivative(t)));
  }
  if (!(vmin_ > 0.0))
    fail(ErrorCode::VoltageRangeInvalid, "voltage profile must stay positive over a period");
}

VoltageProfile VoltageProfile::dc(double v0, double period) {
  return VoltageProfile(v0, 0.0, {}, period);
}

VoltageProfile VoltageProfile::cosine(double v0, double delta, double period) {
  return VoltageProfile(v0, delta, {Harmonic{1, 1.0, 0.0}}, period);
}

double VoltageProfile::value(double t) const {
  if (delta_ == 0.0 || harmonics_.empty()) return v0_;
  const double u = reduce_period(t, period_);
  double ac = 0.0;
  for (const Harmonic& h : harmonics_) {
    const double phase = kTwoPi * h.k * u / period_;
    ac += h.cos_coeff * std::cos(phase) + h.sin_coeff * std::sin(phase);
  }
  return v0_ + delta_ * ac;
}

double VoltageProfile::derivative(double t) const {
  if (delta_ == 0.0 || harmonics_.empty()) return 0.0;
  const double u = reduce_period(t, period_);
  double acdot = 0.0;
  for (const Harmonic& h : harmonics_) {
    const double w = kTwoPi * h.k / period_;
    const double phase = w * u;
    acdot += w * (-h.cos_coeff * std::sin(phase) + h.sin_coeff * std::cos(phase));
  }
  return delta_ * acdot;
}

DampingModel DampingModel::linear(double c) {
  if (!(c >= 0.0) || !std::isfinite(c))
    fail(ErrorCode::Config, "linear damping coefficient must be finite and >= 0");
  return DampingModel{DampingKind::Linear, c};
}

DampingModel DampingModel::squeeze(double gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    fail(ErrorCode::Config, "squeeze-film damping coefficient must be finite and >= 0");
  return DampingModel{DampingKind::SqueezeFilm, gamma};
}

void ActuatorParams::validate() const {
  if (!(e > 0.0) || !std::isfinite(e)) fail(ErrorCode::Config, "e must be > 0");
  if (!(d >= 0.0) || !std::isfinite(d)) fail(ErrorCode::Config, "delay must be >= 0");
  if (!std::isfinite(g1) || !std::isfinite(g2)) fail(ErrorCode::Config, "gains must be finite");
}

double voltage_at(const VoltageProfile& profile, double t) { return profile.value(t); }

double feedback_voltage(const ActuatorParams& p, double t, const State& s, const State& s_d) {
  return p.voltage.value(t) + p.g1 * (s.x - s_d.x) + p.g2 * (s.v - s_d.v);
}

State rhs(const ActuatorParams& p, double t, const State& s, const State& s_d) {
  if (!(s.x > 0.0))
    fail(ErrorCode::NonPositiveGap, "gap coordinate reached x <= 0 (pull-in collapse)");
  const double V = feedback_voltage(p, t, s, s_d);
  const double accel = 1.0 - p.e * V * V / (s.x * s.x) - s.x - p.damping.force(s.x, s.v);
  return State{s.v, accel};
}

}  // namespace memsdde
