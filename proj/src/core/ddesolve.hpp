#pragma once

#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "dde_core.hpp"
#include "model.hpp"

namespace memsdde {

struct PullInEvent {
  double t_lo;
  double t_hi;
  double t_cross;
};

// Time-stamped trajectory with dense output for delayed lookups. Samples keep
// x > 0; a pull-in event terminates the record early.
class Trajectory {
 public:
  Trajectory(std::vector<double> t, std::vector<State> s, dde::DenseSpan<2> dense,
             std::optional<PullInEvent> event)
      : t_(std::move(t)), s_(std::move(s)), dense_(std::move(dense)), event_(event) {}

  const std::vector<double>& times() const { return t_; }
  const std::vector<State>& states() const { return s_; }
  const dde::DenseSpan<2>& dense() const { return dense_; }
  const std::optional<PullInEvent>& pull_in() const { return event_; }

  double t_end() const { return t_.back(); }
  State back() const { return s_.back(); }
  State at(double t) const {
    const auto y = dense_.eval(t);
    return State{y[0], y[1]};
  }

 private:
  std::vector<double> t_;
  std::vector<State> s_;
  dde::DenseSpan<2> dense_;
  std::optional<PullInEvent> event_;
};

// Initial data: a constant state, or a function of time valid on [from, 0].
struct InitialHistory {
  std::function<State(double)> fn;
  double from;

  static InitialHistory constant(const State& s) {
    return InitialHistory{[s](double) { return s; },
                          -std::numeric_limits<double>::infinity()};
  }
  static InitialHistory segment(std::function<State(double)> fn, double from) {
    return InitialHistory{std::move(fn), from};
  }
};

// Method-of-steps integration of the delayed actuator equation; with d = 0 a
// single initial state suffices and the run is plain forced integration.
Trajectory integrate(const ActuatorParams& p, const InitialHistory& history, double t_end,
                     double step);

// Supremum over the trailing window of the Euclidean distance to the target.
double settle_metric(const Trajectory& traj, const State& target, double window);

}  // namespace memsdde
