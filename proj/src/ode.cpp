#include "slgeo/ode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "slgeo/error.hpp"

namespace slgeo::ode {

namespace odeint = boost::numeric::odeint;

namespace {

using Dopri = odeint::runge_kutta_dopri5<State>;
using Checker = odeint::default_error_checker<double, odeint::range_algebra, odeint::default_operations>;
using Controlled = odeint::controlled_runge_kutta<Dopri, Checker>;

bool all_finite(const State& x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

State StepView::state_at(double t) const {
  if (t == t_old_) return x_old_;
  if (t == t_new_) return x_new_;
  State out(x_old_.size());
  interp_(t, out);
  return out;
}

StepStats integrate(const Rhs& f, State x0, double t0, double t1,
                    std::span<const double> output_times, const OutputFn& out,
                    const Options& opts, const StepFn& on_step) {
  if (!std::isfinite(t0) || !std::isfinite(t1)) throw DomainError("integrate: non-finite time span");
  if (!(opts.atol > 0) || !(opts.rtol >= 0)) throw DomainError("integrate: tolerances must be positive");
  if (!all_finite(x0)) throw DomainError("integrate: non-finite initial state");
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  for (std::size_t i = 0; i < output_times.size(); ++i) {
    const double ti = output_times[i];
    if (dir * (ti - t0) < 0 || dir * (ti - t1) > 0) {
      throw DomainError("integrate: output time " + std::to_string(ti) + " outside the span");
    }
    if (i > 0 && dir * (ti - output_times[i - 1]) < 0) {
      throw DomainError("integrate: output times are not monotone");
    }
  }

  Controlled ctrl{Checker(opts.atol, opts.rtol)};
  auto sys = [&f](const State& x, State& dxdt, double t) { f(x, dxdt, t); };

  const std::size_t n = x0.size();
  State x = std::move(x0);
  State dxdt(n), x_new(n), dxdt_new(n);
  sys(x, dxdt, t0);

  StepStats stats;
  std::size_t next = 0;
  double t = t0;
  while (next < output_times.size() && output_times[next] == t0) out(t0, x), ++next;
  if (t0 == t1) return stats;

  double dt = dir * std::min(std::abs(opts.h0), std::abs(t1 - t0));
  while (dir * (t1 - t) > 0) {
    if (stats.accepted + stats.rejected >= opts.max_steps) {
      throw NumericalError("integrate: step budget of " + std::to_string(opts.max_steps) +
                           " exhausted at t = " + std::to_string(t));
    }
    const double remaining = t1 - t;
    const bool clipped = dir * (dt - remaining) >= 0;
    if (clipped) dt = remaining;
    const double t_old = t;
    const auto res = ctrl.try_step(sys, x, dxdt, t, x_new, dxdt_new, dt);
    if (res == odeint::fail) {
      ++stats.rejected;
      if (std::abs(dt) < 1e-14 * std::max(1.0, std::abs(t))) {
        throw NumericalError("integrate: step size underflow at t = " + std::to_string(t));
      }
      continue;
    }
    ++stats.accepted;
    if (clipped) t = t1;
    if (!all_finite(x_new)) {
      throw NumericalError("integrate: non-finite state at t = " + std::to_string(t));
    }
    const double t_new = t;
    StepView::Interp interp = [&](double ti, State& o) {
      ctrl.stepper().calc_state(ti, o, x, dxdt, t_old, x_new, dxdt_new, t_new);
    };
    const StepView view(t_old, t_new, x, x_new, interp);
    while (next < output_times.size() && dir * (output_times[next] - t_new) <= 0) {
      out(output_times[next], view.state_at(output_times[next]));
      ++next;
    }
    if (on_step) on_step(view);
    std::swap(x, x_new);
    std::swap(dxdt, dxdt_new);
  }
  return stats;
}

std::optional<double> locate_crossing(const StepView& step, const EventFn& g, int direction) {
  const double g0 = g(step.x_old(), step.t_old());
  const double g1 = g(step.x_new(), step.t_new());
  const bool rising = g0 < 0 && g1 >= 0;
  const bool falling = g0 > 0 && g1 <= 0;
  if (!((rising && direction >= 0) || (falling && direction <= 0))) return std::nullopt;
  if (g1 == 0) return step.t_new();

  auto h = [&](double t) { return g(step.state_at(t), t); };
  double lo = std::min(step.t_old(), step.t_new());
  double hi = std::max(step.t_old(), step.t_new());
  double hlo = lo == step.t_old() ? g0 : g1;
  double hhi = hi == step.t_new() ? g1 : g0;
  std::uintmax_t iters = 100;
  const auto tol = boost::math::tools::eps_tolerance<double>(52);
  const auto [a, b] = boost::math::tools::toms748_solve(h, lo, hi, hlo, hhi, tol, iters);
  return 0.5 * (a + b);
}

std::vector<double> linspace(double t0, double t1, int n) {
  if (n < 1) throw DomainError("linspace: need at least one point");
  std::vector<double> v(static_cast<std::size_t>(n));
  if (n == 1) {
    v[0] = t0;
    return v;
  }
  for (int i = 0; i < n; ++i) v[i] = t0 + (t1 - t0) * i / (n - 1);
  v.back() = t1;
  return v;
}

}  // namespace slgeo::ode
