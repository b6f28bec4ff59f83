#include "slgeo/reduced.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "slgeo/elliptic.hpp"
#include "slgeo/error.hpp"
#include "slgeo/ode.hpp"
#include "slgeo/parallel.hpp"

namespace slgeo {

namespace {

constexpr double kPi = std::numbers::pi;

void require_open_A(double A, const char* who) {
  if (!(A > 0.0 && A < 1.0)) {
    throw DomainError(std::string(who) + ": A must lie in (0, 1), got " + std::to_string(A));
  }
}

// Root of an increasing or decreasing function on [lo, hi] with a sign change,
// bisected until the interval cannot shrink.
template <class F>
double bisect(F h, double lo, double hi) {
  double hlo = h(lo);
  for (int i = 0; i < 2000; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double hm = h(mid);
    if (hm == 0.0) return mid;
    if ((hm < 0) == (hlo < 0)) {
      lo = mid;
      hlo = hm;
    } else {
      hi = mid;
    }
  }
  return std::abs(h(lo)) <= std::abs(h(hi)) ? lo : hi;
}

// Divides the polynomial c (ascending) by (v - r), dropping the remainder.
std::vector<double> deflate(const std::vector<double>& c, double r) {
  const std::size_t n = c.size() - 1;
  std::vector<double> out(n);
  double carry = c[n];
  for (std::size_t i = n; i-- > 0;) {
    out[i] = carry;
    carry = c[i] + r * carry;
  }
  return out;
}

double horner(const std::vector<double>& c, double v) {
  double s = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) s = s * v + c[i];
  return s;
}

// Q(v) - A^2 = (v - alpha)(beta - v) Rt(v) with Rt > 0 on [alpha, beta].
struct Deflated {
  std::vector<double> rt;
  double operator()(double v) const { return horner(rt, v); }
};

Deflated deflate_turning(const CoeffVector& a, double A, const TurningData& td) {
  auto c = q_coefficients(a);
  c[0] -= A * A;
  auto p = deflate(deflate(c, td.alpha), td.beta);
  for (double& x : p) x = -x;
  return {std::move(p)};
}

}  // namespace

QEval q_eval(const CoeffVector& a, double u) {
  QEval q{1.0, 0.0};
  // Product rule accumulated term by term so zeros of single factors are fine.
  for (int j = 0; j < a.m(); ++j) {
    const double f = a[j] * u + 1.0;
    q.deriv = q.deriv * f + q.value * a[j];
    q.value *= f;
  }
  return q;
}

std::vector<double> q_coefficients(const CoeffVector& a) {
  std::vector<double> c{1.0};
  for (int j = 0; j < a.m(); ++j) {
    std::vector<double> next(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i] += c[i];
      next[i + 1] += a[j] * c[i];
    }
    c = std::move(next);
  }
  return c;
}

double sum_a_over(const CoeffVector& a, double u) {
  double s = 0.0;
  for (int j = 0; j < a.m(); ++j) s += a[j] / (a[j] * u + 1.0);
  return s;
}

double sum_a2_over(const CoeffVector& a, double u) {
  double s = 0.0;
  for (int j = 0; j < a.m(); ++j) s += a[j] * a[j] / (a[j] * u + 1.0);
  return s;
}

TurningData turning_points(const CoeffVector& a, double A) {
  require_open_A(A, "turning_points");
  const double A2 = A * A;
  auto h = [&](double u) { return q_eval(a, u).value - A2; };
  TurningData td;
  td.A = A;
  td.alpha = bisect(h, -1.0 / a.amax(), 0.0);
  td.beta = bisect(h, 0.0, -1.0 / a.amin());
  if (a.m() == 3) {
    const auto c = q_coefficients(a);
    if (c[3] != 0.0) {
      const double third = -c[2] / c[3] - td.alpha - td.beta;
      td.gamma = {third, td.beta, td.alpha};
      std::sort(td.gamma.begin(), td.gamma.end(), std::greater<>());
    }
  }
  return td;
}

double compute_A(const CoeffVector& a, double u0, double theta0) {
  for (int j = 0; j < a.m(); ++j) {
    if (!(a[j] * u0 + 1.0 > 0.0)) {
      throw DomainError("compute_A: a_j u + 1 <= 0 at j = " + std::to_string(j + 1));
    }
  }
  return std::sqrt(q_eval(a, u0).value) * std::sin(theta0);
}

ReducedState rhs_reduced(const CoeffVector& a, const ReducedState& s) {
  const double sq = std::sqrt(std::max(q_eval(a, s.u).value, 0.0));
  const double st = std::sin(s.theta);
  return {2.0 * sq * std::cos(s.theta), -sq * st * sum_a_over(a, s.u),
          -sq * st * sum_a2_over(a, s.u)};
}

ReducedResult integrate_reduced(const CoeffVector& a, const ReducedState& s0, double t0,
                                double t1, const ReducedOptions& opts) {
  const double A = compute_A(a, s0.u, s0.theta);
  ode::Rhs f = [&a](const ode::State& x, ode::State& dx, double) {
    const ReducedState d = rhs_reduced(a, {x[0], x[1], x[2]});
    dx[0] = d.u;
    dx[1] = d.theta;
    dx[2] = d.psi;
  };
  const std::vector<double> times =
      opts.times.empty() ? ode::linspace(t0, t1, opts.samples) : opts.times;
  ReducedResult res;
  auto out = [&](double t, const ode::State& x) {
    res.traj.times.push_back(t);
    res.traj.states.push_back({x[0], x[1], x[2]});
  };
  auto A_of = [&](const ode::State& x) {
    return std::sqrt(std::max(q_eval(a, x[0]).value, 0.0)) * std::sin(x[1]);
  };
  const ode::EventFn cos_theta = [](const ode::State& x, double) { return std::cos(x[1]); };
  auto on_step = [&](const ode::StepView& step) {
    res.max_A_drift = std::max(res.max_A_drift, std::abs(A_of(step.x_new()) - A));
    if (opts.record_u_minima) {
      if (auto tc = ode::locate_crossing(step, cos_theta, t1 >= t0 ? +1 : -1)) {
        res.u_minima.push_back(*tc);
      }
    }
  };
  ode::Options o;
  o.atol = opts.tol;
  o.rtol = opts.tol;
  res.traj.step_stats = ode::integrate(f, {s0.u, s0.theta, s0.psi}, t0, t1, times, out, o, on_step);
  return res;
}

double period_T(const CoeffVector& a, double A) {
  require_open_A(A, "period_T");
  const TurningData td = turning_points(a, A);
  const Deflated rt = deflate_turning(a, A, td);
  return endpoint_sqrt_quadrature([&](double v) { return 1.0 / std::sqrt(rt(v)); }, td.alpha,
                                  td.beta);
}

double rotation_Psi(const CoeffVector& a, double A) {
  require_open_A(A, "rotation_Psi");
  const TurningData td = turning_points(a, A);
  const Deflated rt = deflate_turning(a, A, td);
  return A * endpoint_sqrt_quadrature(
                 [&](double v) { return sum_a2_over(a, v) / std::sqrt(rt(v)); }, td.alpha,
                 td.beta);
}

std::pair<double, double> psi_limits(const CoeffVector& a) {
  return {kPi * (a.amax() - a.amin()), kPi * std::sqrt(2.0 * a.sum_squares())};
}

std::pair<double, double> angles_of_u(const CoeffVector& a, double A, double u, double u0,
                                      double psi0) {
  if (A == 0.0) {
    for (double x : {u, u0}) {
      if (!(x > -1.0 / a.amax() && x < -1.0 / a.amin())) {
        throw DomainError("angles_of_u: u outside (-1/a_max, -1/a_min)");
      }
    }
    return {0.0, psi0};
  }
  require_open_A(A, "angles_of_u");
  const TurningData td = turning_points(a, A);
  for (double x : {u, u0}) {
    if (!(x >= td.alpha && x <= td.beta)) {
      throw DomainError("angles_of_u: u = " + std::to_string(x) + " outside [alpha, beta]");
    }
  }
  const double theta = std::asin(std::min(1.0, A / std::sqrt(q_eval(a, u).value)));
  const Deflated rt = deflate_turning(a, A, td);
  const double integral = endpoint_sqrt_quadrature_partial(
      [&](double v) { return sum_a2_over(a, v) / std::sqrt(rt(v)); }, td.alpha, td.beta, u0, u);
  return {theta, psi0 - 0.5 * A * integral};
}

std::vector<PsiSample> psi_scan(const CoeffVector& a, const ScanOptions& opts) {
  if (opts.grid < 2) throw DomainError("psi_scan: grid needs at least 2 points");
  if (!(opts.A_lo > 0 && opts.A_hi < 1 && opts.A_lo < opts.A_hi)) {
    throw DomainError("psi_scan: need 0 < A_lo < A_hi < 1");
  }
  const auto As = ode::linspace(opts.A_lo, opts.A_hi, opts.grid);
  std::vector<PsiSample> out(As.size());
  parallel_for(As.size(), [&](std::size_t i) {
    const double A = As[i];
    const TurningData td = turning_points(a, A);
    out[i] = {A, rotation_Psi(a, A), period_T(a, A), td.alpha, td.beta};
  });
  return out;
}

TorusSolution torus_solution_at(const CoeffVector& a, double A, const Rational& q) {
  TorusSolution s;
  s.A = A;
  const TurningData td = turning_points(a, A);
  s.alpha = td.alpha;
  s.beta = td.beta;
  s.T = period_T(a, A);
  s.Psi = rotation_Psi(a, A);
  s.q = q;
  s.b_mult = q.den;
  s.residual = std::abs(s.Psi - 2 * kPi * q.value());
  return s;
}

RationalSearch find_rational_A(const CoeffVector& a, const Rational& q, const ScanOptions& opts) {
  RationalSearch out;
  if (a.is_degenerate_pm1()) {
    if (q == Rational(1, 1)) {
      out.constant_psi = true;
      out.solutions.push_back(torus_solution_at(a, 0.5, q));
      return out;
    }
    throw NumericalError("no bracket: Psi is identically 2 pi for these weights, q = " +
                         q.to_string());
  }
  const double target = 2 * kPi * q.value();
  const auto scan = psi_scan(a, opts);
  std::vector<std::pair<double, double>> brackets;
  std::vector<double> exact;
  for (std::size_t i = 0; i < scan.size(); ++i) {
    const double d0 = scan[i].Psi - target;
    if (d0 == 0.0) exact.push_back(scan[i].A);
    if (i + 1 < scan.size()) {
      const double d1 = scan[i + 1].Psi - target;
      if ((d0 < 0 && d1 > 0) || (d0 > 0 && d1 < 0)) brackets.emplace_back(scan[i].A, scan[i + 1].A);
    }
  }
  if (brackets.empty() && exact.empty()) {
    throw NumericalError("no bracket: 2 pi q = " + std::to_string(target) +
                         " is not crossed by Psi on the scan grid");
  }
  std::vector<double> roots(brackets.size());
  parallel_for(brackets.size(), [&](std::size_t i) {
    auto h = [&](double A) { return rotation_Psi(a, A) - target; };
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(
        h, brackets[i].first, brackets[i].second, boost::math::tools::eps_tolerance<double>(50),
        iters);
    const double A0 = r.first, A1 = r.second;
    roots[i] = std::abs(h(A0)) <= std::abs(h(A1)) ? A0 : A1;
  });
  roots.insert(roots.end(), exact.begin(), exact.end());
  std::sort(roots.begin(), roots.end());
  for (double A : roots) {
    TorusSolution s = torus_solution_at(a, A, q);
    if (s.residual > opts.tol) {
      throw NumericalError("find_rational_A: refinement stalled at A = " + std::to_string(A) +
                           " with |Psi - 2 pi q| = " + std::to_string(s.residual));
    }
    out.solutions.push_back(s);
  }
  return out;
}

CoeffVector b_to_a(double b1, double b2, double b3) {
  if (b1 == 0 && b2 == 0 && b3 == 0) throw DomainError("b_to_a: b is all zero");
  const double scale = std::max({std::abs(b1), std::abs(b2), std::abs(b3)});
  if (std::abs(b1 + b2 + b3) > 1e-12 * scale) throw DomainError("b_to_a: b must sum to zero");
  const double r = 1.0 / std::sqrt(3.0);
  // Build from differences; the sum of these is zero up to rounding, which
  // CoeffVector tolerates.
  return CoeffVector({r * (b3 - b2), r * (b1 - b3), r * (b2 - b1)});
}

std::vector<double> a_to_b(const CoeffVector& a) {
  if (a.m() != 3) throw DomainError("a_to_b: m must be 3");
  const double r = 1.0 / std::sqrt(3.0);
  return {r * (a[1] - a[2]), r * (a[2] - a[0]), r * (a[0] - a[1])};
}

M3Data closed_form_m3_data(const CoeffVector& a, double A) {
  if (a.m() != 3) throw DomainError("closed form needs m = 3");
  int negatives = 0;
  for (int j = 0; j < 3; ++j) {
    if (a[j] == 0.0) throw DomainError("closed form needs nonzero weights");
    if (a[j] < 0) ++negatives;
  }
  if (!(A >= 0.0 && A < 1.0)) throw DomainError("closed form needs A in [0, 1)");
  M3Data d;
  d.A = A;
  d.sign = negatives == 2 ? 1 : -1;
  const CoeffVector an({d.sign * a[0], d.sign * a[1], d.sign * a[2]});
  double alpha = -1.0 / an.amax();
  double beta = -1.0 / an.amin();
  if (A > 0.0) {
    const TurningData td = turning_points(an, A);
    alpha = td.alpha;
    beta = td.beta;
  }
  const auto c = q_coefficients(an);
  d.gamma3 = alpha;
  d.gamma2 = beta;
  d.gamma1 = -c[2] / c[3] - alpha - beta;
  if (A == 0.0) {
    // Exact roots -1/a_j; avoids cancellation in the sum.
    double mid = 0.0;
    for (int j = 0; j < 3; ++j) {
      if (an[j] < 0 && -1.0 / an[j] != beta) mid = -1.0 / an[j];
    }
    if (mid != 0.0) d.gamma1 = mid;
    else d.gamma1 = beta;  // repeated negative weight: gamma1 = gamma2
  }
  const double lead = c[3];  // product of the normalized weights, > 0
  d.a_ell = std::sqrt(lead * (d.gamma1 - d.gamma3));
  d.k = std::sqrt(std::clamp((d.gamma2 - d.gamma3) / (d.gamma1 - d.gamma3), 0.0, 1.0));
  if (d.k >= 1.0) throw DomainError("closed form: modulus 1, the period is infinite");
  const double K = complete_K(d.k);
  d.c_at_alpha = d.sign > 0 ? 0.0 : K;
  d.period = 2.0 * K / d.a_ell;
  return d;
}

double closed_form_u_m3(const M3Data& d, double c_shift, double t) {
  const double sn = jacobi(d.a_ell * t + c_shift, d.k).sn;
  return d.sign * (d.gamma3 + (d.gamma2 - d.gamma3) * sn * sn);
}

double closed_form_u_m3(const CoeffVector& a, double A, double c_shift, double t) {
  return closed_form_u_m3(closed_form_m3_data(a, A), c_shift, t);
}

double closed_form_theta_j_m3(const CoeffVector& a, const M3Data& d, double c_shift, int j,
                              double theta_j0, double t) {
  if (j < 0 || j >= 3) throw DomainError("closed_form_theta_j_m3: j out of range");
  if (a[j] == 0.0 || d.A == 0.0 || t == 0.0) return theta_j0;
  auto f = [&](double tau) { return a[j] / (a[j] * closed_form_u_m3(d, c_shift, tau) + 1.0); };
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, t, 15, 1e-13);
  return theta_j0 - d.A * integral;
}

ExplicitM3 explicit_m3_data(long b1, long b2, long b3) {
  if (!(b2 > b3 && b3 > 0 && 0 > b1) || b1 + b2 + b3 != 0) {
    throw DomainError("explicit A = 0 solution needs integers b2 > b3 > 0 > b1 summing to 0");
  }
  const CoeffVector a = b_to_a(static_cast<double>(b1), static_cast<double>(b2),
                               static_cast<double>(b3));
  const double a1 = a[0], a2 = a[1], a3 = a[2];
  ExplicitM3 d{b1, b2, b3, a, 0, 0, 0, 0, 0};
  d.a_ell = std::sqrt(a2 * (a1 - a3));
  d.k = std::sqrt(a1 * (a2 - a3) / (a2 * (a1 - a3)));
  d.c1 = std::sqrt((a3 - a1) / a3);
  d.c2 = std::sqrt((a3 - a2) / a3);
  d.c3 = std::sqrt((a2 - a3) / a2);
  return d;
}

CVector explicit_A0_m3(const ExplicitM3& d, double t) {
  const JacobiTriple j = jacobi(d.a_ell * t, d.k);
  CVector w(3);
  w << d.c1 * j.dn, d.c2 * j.cn, d.c3 * j.sn;
  return w;
}

CVector explicit_A0_m3_dt(const ExplicitM3& d, double t) {
  const JacobiTriple j = jacobi(d.a_ell * t, d.k);
  const double s = d.a_ell;
  CVector w(3);
  w << -d.c1 * d.k * d.k * j.sn * j.cn * s, -d.c2 * j.sn * j.dn * s, d.c3 * j.cn * j.dn * s;
  return w;
}

}  // namespace slgeo
