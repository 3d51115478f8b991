#pragma once

// Fixed-step classical RK4 by the method of steps, dimension-generic so that
// scalar benchmark equations and the planar actuator share one integrator.
// Each accepted step stores endpoint values and derivatives; cubic Hermite on
// those matches the O(h^4) one-step accuracy and serves the delayed lookups.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "errors.hpp"

namespace memsdde::dde {

template <int N>
using Vec = std::array<double, N>;

template <int N>
struct StepRecord {
  double t0, t1;
  Vec<N> y0, y1, f0, f1;
};

template <int N>
Vec<N> hermite_eval(const StepRecord<N>& r, double t) {
  const double h = r.t1 - r.t0;
  const double s = (t - r.t0) / h;
  const double s2 = s * s;
  const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
  const double h10 = s * (1.0 - s) * (1.0 - s);
  const double h01 = s2 * (3.0 - 2.0 * s);
  const double h11 = s2 * (s - 1.0);
  Vec<N> out;
  for (int i = 0; i < N; ++i)
    out[i] = h00 * r.y0[i] + h * h10 * r.f0[i] + h01 * r.y1[i] + h * h11 * r.f1[i];
  return out;
}

// Piecewise dense output over [t_begin, t_end]; evaluation outside is an error.
template <int N>
class DenseSpan {
 public:
  void append(const StepRecord<N>& r) { steps_.push_back(r); }
  bool empty() const { return steps_.empty(); }
  double t_begin() const { return steps_.empty() ? 0.0 : steps_.front().t0; }
  double t_end() const { return steps_.empty() ? 0.0 : steps_.back().t1; }

  Vec<N> eval(double t) const {
    const StepRecord<N>& r = locate(t);
    return hermite_eval(r, t);
  }

  const std::vector<StepRecord<N>>& steps() const { return steps_; }

 private:
  const StepRecord<N>& locate(double t) const {
    if (steps_.empty() || t < t_begin() - 1e-12 || t > t_end() + 1e-12)
      fail(ErrorCode::Internal, "dense output evaluated outside its span");
    // binary search on step start times
    size_t lo = 0, hi = steps_.size() - 1;
    while (lo < hi) {
      const size_t mid = (lo + hi + 1) / 2;
      if (steps_[mid].t0 <= t)
        lo = mid;
      else
        hi = mid - 1;
    }
    return steps_[lo];
  }

  std::vector<StepRecord<N>> steps_;
};

struct CollapseEvent {
  double t_lo;     // last time with a valid state
  double t_hi;     // first time past the crossing
  double t_cross;  // refined crossing time
};

template <int N>
struct DdeResult {
  std::vector<double> t;
  std::vector<Vec<N>> y;
  DenseSpan<N> dense;
  std::optional<CollapseEvent> event;
};

template <int N>
struct DdeProblem {
  // f(t, y, y_delayed)
  std::function<Vec<N>(double, const Vec<N>&, const Vec<N>&)> rhs;
  double delay = 0.0;
  // history on [-delay, 0]; must be valid from history_from (<= -delay)
  std::function<Vec<N>(double)> history;
  double history_from = -std::numeric_limits<double>::infinity();
  // invalid-state predicate; a true verdict terminates the run as an event
  std::function<bool(const Vec<N>&)> guard;
};

namespace internal {

template <std::size_t N>
bool finite(const std::array<double, N>& y) {
  for (double v : y)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace internal

// Advances in spans of one delay length; with delay = 0 this is plain RK4 with
// the stage state standing in for the delayed state. Step boundaries align to
// multiples of the delay so the method-of-steps derivative discontinuities at
// t = 0, d, 2d, ... fall on grid points.
template <int N>
DdeResult<N> integrate(const DdeProblem<N>& prob, double t_end, double step) {
  if (!(step > 0.0)) fail(ErrorCode::Config, "integrate requires step > 0");
  if (!(t_end > 0.0)) fail(ErrorCode::Config, "integrate requires t_end > 0");
  const double d = prob.delay;
  if (d > 0.0 && prob.history_from > -d + 1e-15)
    fail(ErrorCode::HistoryTooShort, "initial history must cover [-d, 0]");

  DdeResult<N> out;
  Vec<N> y = prob.history(0.0);
  double t = 0.0;
  out.t.push_back(t);
  out.y.push_back(y);

  auto delayed = [&](double tq) -> Vec<N> {
    if (tq <= 0.0) return prob.history(tq);
    return out.dense.eval(tq);
  };

  // single RK4 step; delayed lookups stay in finalized data because h <= d
  auto attempt = [&](double h, Vec<N>& y_next, Vec<N>& f_at_t, Vec<N>& f_at_next) -> bool {
    try {
      auto eval = [&](double ts, const Vec<N>& ys) {
        return prob.rhs(ts, ys, d > 0.0 ? delayed(ts - d) : ys);
      };
      const Vec<N> k1 = eval(t, y);
      Vec<N> ytmp;
      for (int i = 0; i < N; ++i) ytmp[i] = y[i] + 0.5 * h * k1[i];
      const Vec<N> k2 = eval(t + 0.5 * h, ytmp);
      for (int i = 0; i < N; ++i) ytmp[i] = y[i] + 0.5 * h * k2[i];
      const Vec<N> k3 = eval(t + 0.5 * h, ytmp);
      for (int i = 0; i < N; ++i) ytmp[i] = y[i] + h * k3[i];
      const Vec<N> k4 = eval(t + h, ytmp);
      for (int i = 0; i < N; ++i)
        y_next[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (!internal::finite(y_next)) return false;
      f_at_t = k1;
      if (prob.guard && prob.guard(y_next)) {
        // endpoint derivative may be singular past the guard; the x-component
        // Hermite only needs f0 and the velocity component, so reuse k4
        f_at_next = k4;
        return true;
      }
      f_at_next = eval(t + h, y_next);
      return internal::finite(f_at_next);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NonPositiveGap) return false;
      throw;
    }
  };

  // with a delay, steps divide the span length so boundaries land on
  // multiples of d; at least 8 steps resolve each span
  const int per_span = d > 0.0 ? std::max(8, static_cast<int>(std::ceil(d / step))) : 0;
  const double h_nominal = d > 0.0 ? d / per_span : step;

  while (t < t_end - 1e-12 * std::max(1.0, t_end)) {
    const double h_entry = std::min(h_nominal, t_end - t);
    double h = h_entry;
    Vec<N> y_next, f0, f1;
    int halvings = 0;
    bool ok = attempt(h, y_next, f0, f1);
    while (!ok && halvings < 60) {
      h *= 0.5;
      ++halvings;
      ok = attempt(h, y_next, f0, f1);
    }
    if (!ok) {
      // state became invalid inside every sub-step: the crossing is pinned
      // to machine resolution, bracketed by the entry step
      out.event = CollapseEvent{t, t + h_entry, t + h};
      return out;
    }

    StepRecord<N> rec{t, t + h, y, y_next, f0, f1};
    if (prob.guard && prob.guard(y_next)) {
      // refine the crossing on the Hermite interpolant to 1e-10 in time
      double lo = t, hi = t + h;
      while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        (prob.guard(hermite_eval(rec, mid)) ? hi : lo) = mid;
      }
      out.event = CollapseEvent{t, t + h, 0.5 * (lo + hi)};
      return out;
    }

    out.dense.append(rec);
    t = rec.t1;
    y = y_next;
    out.t.push_back(t);
    out.y.push_back(y);
  }
  return out;
}

}  // namespace memsdde::dde
