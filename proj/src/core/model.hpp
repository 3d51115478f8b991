#pragma once

#include "types.hpp"

namespace memsdde {

// Drive voltage at time t.
double voltage_at(const VoltageProfile& profile, double t);

// Closed-loop voltage V(t) + g1*(x - x_d) + g2*(v - v_d); the feedback term
// vanishes identically when the delayed state equals the current one.
double feedback_voltage(const ActuatorParams& p, double t, const State& s, const State& s_d);

// Right-hand side of the first-order system in gap coordinates:
//   x' = v
//   v' = 1 - e*V^2/x^2 - x - h(x, v)
// Throws NonPositiveGap for x <= 0 (pull-in contact, a physical outcome that the
// integrator turns into a structured event rather than a NaN).
State rhs(const ActuatorParams& p, double t, const State& s, const State& s_d);

}  // namespace memsdde
