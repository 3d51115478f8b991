#include "ddesolve.hpp"

#include <algorithm>
#include <cmath>

namespace memsdde {

Trajectory integrate(const ActuatorParams& p, const InitialHistory& history, double t_end,
                     double step) {
  p.validate();
  dde::DdeProblem<2> prob;
  prob.delay = p.d;
  prob.history = [&history](double t) {
    const State s = history.fn(t);
    return dde::Vec<2>{s.x, s.v};
  };
  prob.history_from = history.from;
  prob.rhs = [&p](double t, const dde::Vec<2>& y, const dde::Vec<2>& yd) {
    const State s = rhs(p, t, State{y[0], y[1]}, State{yd[0], yd[1]});
    return dde::Vec<2>{s.x, s.v};
  };
  prob.guard = [](const dde::Vec<2>& y) { return y[0] <= 0.0; };

  dde::DdeResult<2> res = dde::integrate(prob, t_end, step);

  std::vector<State> states;
  states.reserve(res.y.size());
  for (const auto& y : res.y) states.push_back(State{y[0], y[1]});
  std::optional<PullInEvent> event;
  if (res.event) event = PullInEvent{res.event->t_lo, res.event->t_hi, res.event->t_cross};
  return Trajectory(std::move(res.t), std::move(states), std::move(res.dense), event);
}

double settle_metric(const Trajectory& traj, const State& target, double window) {
  const auto& t = traj.times();
  const auto& s = traj.states();
  if (!(window <= t.back() - t.front() + 1e-12))
    fail(ErrorCode::Config, "settle window exceeds the trajectory span");
  const double t_from = t.back() - window;
  double sup = 0.0;
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_from) continue;
    sup = std::max(sup, std::hypot(s[i].x - target.x, s[i].v - target.v));
  }
  return sup;
}

}  // namespace memsdde
