#pragma once

// Adaptive Dormand-Prince 5(4) integration of real ODE systems, with output
// at requested times through the stepper's continuous extension and a
// per-step hook for event location.

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace slgeo::ode {

using State = std::vector<double>;
using Rhs = std::function<void(const State& x, State& dxdt, double t)>;

struct Options {
  double atol = 1e-10;
  double rtol = 1e-10;
  double h0 = 1e-3;
  long max_steps = 5'000'000;
};

struct StepStats {
  long accepted = 0;
  long rejected = 0;
};

/// One accepted step [t_old, t_new] with dense evaluation inside it.
class StepView {
 public:
  using Interp = std::function<void(double t, State& out)>;
  StepView(double t_old, double t_new, const State& x_old, const State& x_new, Interp interp)
      : t_old_(t_old), t_new_(t_new), x_old_(x_old), x_new_(x_new), interp_(std::move(interp)) {}

  double t_old() const { return t_old_; }
  double t_new() const { return t_new_; }
  const State& x_old() const { return x_old_; }
  const State& x_new() const { return x_new_; }
  State state_at(double t) const;

 private:
  double t_old_, t_new_;
  const State& x_old_;
  const State& x_new_;
  Interp interp_;
};

using OutputFn = std::function<void(double t, const State& x)>;
using StepFn = std::function<void(const StepView& step)>;

/// Integrates dx/dt = f(x, t) from t0 to t1 (either direction).  `out` is
/// called once per entry of `output_times`, which must be monotone in the
/// direction of integration and lie in the closed span.  Throws
/// NumericalError on step-size underflow, a non-finite state, or when
/// `max_steps` is exceeded.
StepStats integrate(const Rhs& f, State x0, double t0, double t1,
                    std::span<const double> output_times, const OutputFn& out,
                    const Options& opts = {}, const StepFn& on_step = {});

/// Time in (t_old, t_new] where g(state, t) changes sign inside the step.
/// `direction` > 0 keeps only rising crossings, < 0 only falling ones, 0 both.
using EventFn = std::function<double(const State& x, double t)>;
std::optional<double> locate_crossing(const StepView& step, const EventFn& g, int direction = 0);

/// `n` equally spaced times from t0 to t1 inclusive.
std::vector<double> linspace(double t0, double t1, int n);

}  // namespace slgeo::ode
