#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "oracles.hpp"
#include "slgeo/elliptic.hpp"
#include "slgeo/error.hpp"
#include "slgeo/reduced.hpp"

using namespace slgeo;
using std::numbers::pi;

namespace {

const CoeffVector& a312() {
  static const CoeffVector a = CoeffVector::from_ints({-3, 1, 2});
  return a;
}

double wrap(double x) { return std::remainder(x, 2 * pi); }

// One period of the reduced flow starting at the lower turning point.
struct PeriodOracle {
  double T, Psi;
};

PeriodOracle period_by_ode(const CoeffVector& a, double A) {
  const TurningData td = turning_points(a, A);
  // Start just after the minimum so the first upward crossing is the next one.
  const oracle::Vec x0{td.alpha, pi / 2, 0.0};
  const double T_guess = period_T(a, A);
  const auto mins = oracle::reduced_u_minima(a.values(), x0, 0.0, 2.5 * T_guess, 1e-3);
  REQUIRE(mins.size() >= 2);
  const auto f = oracle::reduced(a.values());
  const double psi0 = oracle::rk78_to(f, x0, 0.0, mins[0])[2];
  const double psi1 = oracle::rk78_to(f, x0, 0.0, mins[1])[2];
  return {mins[1] - mins[0], psi0 - psi1};
}

}  // namespace

TEST_CASE("Q and its derivative") {
  const CoeffVector& a = a312();
  const QEval q0 = q_eval(a, 0.0);
  CHECK(q0.value == 1.0);
  CHECK(std::abs(q0.deriv) < 1e-15);
  CHECK(std::abs(q_eval(a, -1.0 / 2.0).value) < 1e-15);
  CHECK(std::abs(q_eval(a, 1.0 / 3.0).value) < 1e-15);
  const double u = 0.1;
  const QEval q = q_eval(a, u);
  CHECK(std::abs(q.value - (1 - 3 * u) * (1 + u) * (1 + 2 * u)) < 1e-15);
  CHECK(std::abs(q.deriv - oracle::derivative([&](double v) { return q_eval(a, v).value; }, u)) <
        1e-11);
  const auto c = q_coefficients(a);
  REQUIRE(c.size() == 4);
  // (1 - 3u)(1 + u)(1 + 2u) = 1 + 0u - 7u^2 - 6u^3
  CHECK(std::abs(c[0] - 1) < 1e-15);
  CHECK(std::abs(c[1]) < 1e-15);
  CHECK(std::abs(c[2] + 7) < 1e-15);
  CHECK(std::abs(c[3] + 6) < 1e-15);
  CHECK(std::abs(sum_a_over(a, 0.0)) < 1e-15);
  CHECK(std::abs(sum_a2_over(a, 0.0) - 14.0) < 1e-15);
}

TEST_CASE("turning points") {
  const CoeffVector a = CoeffVector::from_ints({-2, 1, 1});
  const TurningData td = turning_points(a, 0.5);
  CHECK(std::abs(q_eval(a, td.alpha).value - 0.25) < 1e-12);
  CHECK(std::abs(q_eval(a, td.beta).value - 0.25) < 1e-12);
  CHECK(td.alpha < 0);
  CHECK(td.alpha > -1.0);
  CHECK(td.beta > 0);
  CHECK(td.beta < 0.5);
  for (int i = 1; i < 20; ++i) {
    const double u = td.alpha + (td.beta - td.alpha) * i / 20.0;
    CHECK(q_eval(a, u).value > 0.25);
  }

  const TurningData near1 = turning_points(a312(), 1.0 - 1e-8);
  CHECK(std::abs(near1.alpha) < 1e-3);
  CHECK(std::abs(near1.beta) < 1e-3);
  const TurningData near0 = turning_points(a312(), 1e-8);
  CHECK(std::abs(near0.alpha + 0.5) < 1e-6);
  CHECK(std::abs(near0.beta - 1.0 / 3.0) < 1e-6);

  const TurningData g = turning_points(a312(), 0.4);
  REQUIRE(g.gamma.size() == 3);
  // One negative weight: the extra root lies below alpha.
  CHECK(g.gamma[0] == g.beta);
  CHECK(g.gamma[1] == g.alpha);
  CHECK(g.gamma[2] < g.alpha);
  for (double r : g.gamma) CHECK(std::abs(q_eval(a312(), r).value - 0.16) < 1e-10);
  CHECK(turning_points(CoeffVector::from_ints({-2, -1, 1, 2}), 0.4).gamma.empty());

  CHECK_THROWS_AS(turning_points(a, 0.0), DomainError);
  CHECK_THROWS_AS(turning_points(a, 1.0), DomainError);
}

TEST_CASE("compute A") {
  CHECK(compute_A(a312(), 0.0, pi / 2) == 1.0);
  CHECK(compute_A(a312(), 0.0, 0.0) == 0.0);
  const TurningData td = turning_points(a312(), 0.37);
  CHECK(std::abs(compute_A(a312(), td.alpha, pi / 2) - 0.37) < 1e-12);
  CHECK(std::abs(compute_A(a312(), td.beta, pi / 2) - 0.37) < 1e-12);
  CHECK_THROWS_AS(compute_A(a312(), 0.5, 0.0), DomainError);
}

TEST_CASE("reduced flow special starts") {
  const CoeffVector& a = a312();
  ReducedOptions opts;
  opts.tol = 1e-12;
  // A = 0: theta stays 0, psi is constant and u climbs to the root of Q.
  const ReducedResult r0 = integrate_reduced(a, {0.0, 0.0, 0.3}, 0.0, 0.5, opts);
  double prev = -1.0;
  for (const ReducedState& s : r0.traj.states) {
    CHECK(s.theta == 0.0);
    CHECK(s.psi == 0.3);
    CHECK(s.u >= prev);
    CHECK(s.u <= 1.0 / 3.0 + 1e-6);
    prev = s.u;
  }
  // A = 1: u stays at 0 and psi drops at the rate sum a_j^2.
  const ReducedResult r1 = integrate_reduced(a, {0.0, pi / 2, 0.1}, 0.0, 3.0, opts);
  for (std::size_t i = 0; i < r1.traj.states.size(); ++i) {
    const ReducedState& s = r1.traj.states[i];
    CHECK(std::abs(s.u) < 1e-12);
    CHECK(std::abs(s.psi - (0.1 - 14.0 * r1.traj.times[i])) < 1e-9);
  }
}

TEST_CASE("reduced flow matches the full system") {
  const CoeffVector a = CoeffVector::from_ints({-3, -1, 1, 3});
  const std::vector<double> th0{0.4, 0.1, -0.3, 0.5};
  const WState w0 = lift(a, 0.05, th0);
  double theta0 = 0.0, psi0 = 0.0;
  for (int j = 0; j < 4; ++j) {
    theta0 += th0[j];
    psi0 += a[j] * th0[j];
  }
  IntegrateOptions wo;
  wo.tol = 1e-12;
  wo.samples = 61;
  ReducedOptions ro;
  ro.tol = 1e-12;
  ro.samples = 61;
  const auto wt = integrate_w(a, w0, 0.0, 6.0, wo);
  const auto rt = integrate_reduced(a, {0.05, theta0, psi0}, 0.0, 6.0, ro);
  double worst = 0.0;
  for (std::size_t i = 0; i < wt.states.size(); ++i) {
    const Projected p = project(a, wt.states[i].w, 1e-7);
    double th = 0.0, ps = 0.0;
    for (int j = 0; j < 4; ++j) {
      th += p.thetas[j];
      ps += a[j] * p.thetas[j];
    }
    const ReducedState& s = rt.traj.states[i];
    worst = std::max({worst, std::abs(p.u - s.u), std::abs(wrap(th - s.theta)),
                      std::abs(wrap(ps - s.psi))});
  }
  CHECK(worst < 1e-7);
}

TEST_CASE("reduced flow invariants") {
  for (const auto& av : {std::vector<double>{-3, 1, 2}, std::vector<double>{-2, 1, 1},
                         std::vector<double>{-3, -1, 1, 3}}) {
    const CoeffVector a(av);
    const double A = 0.45;
    const TurningData td = turning_points(a, A);
    const double T = period_T(a, A);
    const double Psi = rotation_Psi(a, A);
    ReducedOptions opts;
    opts.tol = 1e-12;
    opts.times = {};
    for (int k = 0; k <= 4; ++k) {
      for (double f : {0.0, 0.3, 0.7}) opts.times.push_back((k + f) * T);
    }
    std::sort(opts.times.begin(), opts.times.end());
    const ReducedResult r = integrate_reduced(a, {td.alpha, pi / 2, 0.0}, 0.0, 4.8 * T, opts);
    CHECK(r.max_A_drift < 1e-8);
    for (std::size_t i = 0; i < r.traj.states.size(); ++i) {
      const ReducedState& s = r.traj.states[i];
      const double Q = q_eval(a, s.u).value;
      CHECK(std::abs(std::sqrt(Q) * std::sin(s.theta) - A) < 1e-8);
      const double du = rhs_reduced(a, s).u;
      CHECK(std::abs(du * du - 4 * (Q - A * A)) < 1e-8);
      CHECK(s.u >= td.alpha - 1e-9);
      CHECK(s.u <= td.beta + 1e-9);
      CHECK(std::sin(s.theta) > 0);
    }
    // Same phase in consecutive periods: psi drops by Psi each time.
    for (std::size_t i = 0; i + 3 < r.traj.states.size(); ++i) {
      const double drop = r.traj.states[i].psi - r.traj.states[i + 3].psi;
      CHECK(std::abs(drop - Psi) < 1e-7);
    }
    // Back at alpha after each period.
    for (std::size_t i = 3; i < r.traj.states.size(); i += 3) {
      CHECK(std::abs(r.traj.states[i].u - td.alpha) < 1e-8);
    }
    // and at beta half a period in.
    const ReducedResult half =
        integrate_reduced(a, {td.alpha, pi / 2, 0.0}, 0.0, 0.5 * T, {.tol = 1e-12, .samples = 2});
    CHECK(std::abs(half.traj.states.back().u - td.beta) < 1e-8);
  }
}

TEST_CASE("period against the trajectory") {
  const std::vector<std::pair<std::vector<double>, double>> cases{
      {{-3, 1, 2}, 0.5}, {{-2, 1, 1}, 0.3}, {{-3, -1, 1, 3}, 0.7}};
  for (const auto& [av, A] : cases) {
    const CoeffVector a(av);
    const PeriodOracle o = period_by_ode(a, A);
    CHECK(std::abs(period_T(a, A) / o.T - 1.0) < 1e-6);
    CHECK(std::abs(rotation_Psi(a, A) / o.Psi - 1.0) < 1e-6);
  }
  // The library's own minima recorder gives the same spacing.
  const CoeffVector& a = a312();
  const TurningData td = turning_points(a, 0.5);
  ReducedOptions opts;
  opts.tol = 1e-12;
  opts.record_u_minima = true;
  const double T = period_T(a, 0.5);
  const ReducedResult r = integrate_reduced(a, {td.alpha, pi / 2 - 1e-9, 0.0}, 0.0, 3.5 * T, opts);
  REQUIRE(r.u_minima.size() >= 3);
  for (std::size_t i = 0; i + 1 < r.u_minima.size(); ++i) {
    CHECK(std::abs((r.u_minima[i + 1] - r.u_minima[i]) / T - 1.0) < 1e-6);
  }
}

TEST_CASE("period limits and the m = 3 elliptic form") {
  for (const auto& av : {std::vector<double>{-3, 1, 2}, std::vector<double>{-2, 1, 1}}) {
    const CoeffVector a(av);
    const double lim = 2 * pi / std::sqrt(2 * a.sum_squares());
    CHECK(std::abs(period_T(a, 1.0 - 1e-6) / lim - 1.0) < 1e-3);
  }
  for (const auto& av : {std::vector<double>{-3, 1, 2}, std::vector<double>{-2, -1, 3}}) {
    const CoeffVector a(av);
    for (double A : {0.2, 0.5, 0.8}) {
      const M3Data d = closed_form_m3_data(a, A);
      const double k = std::sqrt((d.gamma2 - d.gamma3) / (d.gamma1 - d.gamma3));
      const double prod = std::abs(a[0] * a[1] * a[2]);
      const double a_ell = std::sqrt(prod * (d.gamma1 - d.gamma3));
      CHECK(std::abs(period_T(a, A) - 2 * oracle::complete_K(k) / a_ell) < 1e-9);
      CHECK(std::abs(d.period - period_T(a, A)) < 1e-9);
    }
  }
}

TEST_CASE("rotation Psi") {
  for (int m = 3; m <= 6; ++m) {
    std::vector<long> w(static_cast<std::size_t>(m), 0);
    w.front() = -1;
    w.back() = 1;
    const CoeffVector a = CoeffVector::from_ints(w);
    for (double A : {0.1, 0.3, 0.5, 0.7, 0.9}) CHECK(std::abs(rotation_Psi(a, A) - 2 * pi) < 1e-8);
  }
  CHECK(std::abs(rotation_Psi(a312(), 1e-3) / (5 * pi) - 1.0) < 0.02);
  CHECK(std::abs(rotation_Psi(a312(), 1.0 - 1e-4) / (pi * std::sqrt(28.0)) - 1.0) < 0.02);
  CHECK_THROWS_AS(rotation_Psi(a312(), 1.0), DomainError);
  CHECK_THROWS_AS(period_T(a312(), -0.1), DomainError);

  // Smoothness: second differences on a fine grid shrink like h^2.
  const CoeffVector& a = a312();
  double worst = 0.0;
  const double h = 1e-3;
  for (double A = 0.05; A < 0.95; A += 0.01) {
    const double d2 = rotation_Psi(a, A + h) - 2 * rotation_Psi(a, A) + rotation_Psi(a, A - h);
    worst = std::max(worst, std::abs(d2));
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("Psi limits") {
  const auto [l0, l1] = psi_limits(CoeffVector::from_ints({-1, 0, 1}));
  CHECK(std::abs(l0 - 2 * pi) < 1e-15);
  CHECK(std::abs(l1 - 2 * pi) < 1e-15);
  const auto [m0, m1] = psi_limits(a312());
  CHECK(std::abs(m0 - 5 * pi) < 1e-14);
  CHECK(std::abs(m1 - pi * std::sqrt(28.0)) < 1e-14);
  const auto [n0, n1] = psi_limits(CoeffVector::from_ints({-2, 1, 1}));
  CHECK(std::abs(n0 - 3 * pi) < 1e-14);
  CHECK(std::abs(n1 - pi * std::sqrt(12.0)) < 1e-14);
  CHECK(m0 < m1);
  CHECK(n0 < n1);
}

TEST_CASE("angles along an increasing leg") {
  const CoeffVector a = CoeffVector::from_ints({-2, 1, 1});
  const double A = 0.3;
  const TurningData td = turning_points(a, A);
  const auto [th0, ps0] = angles_of_u(a, A, td.alpha, td.alpha, 0.7);
  CHECK(std::abs(th0 - pi / 2) < 1e-6);
  CHECK(ps0 == 0.7);
  const auto [tz, pz] = angles_of_u(a, 0.0, 0.1, -0.2, 0.7);
  CHECK(tz == 0.0);
  CHECK(pz == 0.7);

  const double T = period_T(a, A);
  ReducedOptions opts;
  opts.tol = 1e-12;
  opts.samples = 21;
  const ReducedResult r = integrate_reduced(a, {td.alpha, pi / 2, 0.0}, 0.0, 0.5 * T, opts);
  for (std::size_t i = 1; i + 1 < r.traj.states.size(); ++i) {
    const ReducedState& s = r.traj.states[i];
    const auto [th, ps] = angles_of_u(a, A, s.u, td.alpha, 0.0);
    CHECK(std::abs(th - s.theta) < 1e-7);
    CHECK(std::abs(ps - s.psi) < 1e-7);
  }
  CHECK_THROWS_AS(angles_of_u(a, A, td.beta + 0.01, td.alpha, 0.0), DomainError);
}

TEST_CASE("rational search") {
  const RationalSearch deg = find_rational_A(CoeffVector::from_ints({-1, 0, 1}), Rational(1, 1));
  CHECK(deg.constant_psi);
  CHECK(!deg.solutions.empty());
  CHECK_THROWS_AS(find_rational_A(CoeffVector::from_ints({-1, 0, 1}), Rational(2, 1)),
                  NumericalError);

  const RationalSearch rs = find_rational_A(a312(), Rational(13, 5));
  CHECK(!rs.constant_psi);
  REQUIRE(!rs.solutions.empty());
  for (const TorusSolution& s : rs.solutions) {
    CHECK(std::abs(s.Psi - 2 * pi * 13 / 5) < 1e-10);
    CHECK(s.residual < 1e-10);
    CHECK(s.b_mult == 5);
    CHECK(s.T > 0);
    CHECK(s.alpha < 0);
    CHECK(s.beta > 0);
    CHECK(std::abs(period_T(a312(), s.A) - s.T) < 1e-12);
    const auto [lo, hi] = psi_limits(a312());
    CHECK(s.Psi > lo);
    CHECK(s.Psi < hi);
  }
  try {
    (void)find_rational_A(a312(), Rational(1, 1));
    FAIL("expected an error");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("no bracket") != std::string::npos);
  }

  const auto scan = psi_scan(a312(), {.grid = 16});
  CHECK(scan.size() == 16);
  for (const PsiSample& p : scan) CHECK(std::abs(p.Psi - rotation_Psi(a312(), p.A)) < 1e-12);
  CHECK_THROWS_AS(psi_scan(a312(), {.grid = 1}), DomainError);
}

TEST_CASE("rational recognition") {
  CHECK(recognize_rational(2.6) == Rational(13, 5));
  CHECK(recognize_rational(18.0 / 7.0) == Rational(18, 7));
  CHECK(!recognize_rational(std::sqrt(7.0)).has_value());
  CHECK(Rational(-4, 6) == Rational(-2, 3));
  CHECK(Rational::parse("21/8") == Rational(21, 8));
  CHECK(Rational(6, 3).to_string() == "2");
  CHECK_THROWS_AS(Rational(1, 0), DomainError);
}

TEST_CASE("b coordinates") {
  const CoeffVector a = b_to_a(-2, 1, 1);
  CHECK(std::abs(a[0]) < 1e-15);
  CHECK(std::abs(a[1] + std::sqrt(3.0)) < 1e-15);
  CHECK(std::abs(a[2] - std::sqrt(3.0)) < 1e-15);

  const auto b = a_to_b(a312());
  const CoeffVector back = b_to_a(b[0], b[1], b[2]);
  for (int j = 0; j < 3; ++j) CHECK(std::abs(back[j] - a312()[j]) < 1e-14);

  // Two equal b's exactly when some a_j vanishes, the (-1, 0, 1) pattern up to scale.
  for (const auto& bb : {std::vector<double>{-3, 1, 2}, std::vector<double>{-2, 1, 1},
                         std::vector<double>{1, 1, -2}, std::vector<double>{-5, 4, 1}}) {
    const CoeffVector x = b_to_a(bb[0], bb[1], bb[2]);
    const bool distinct = bb[0] != bb[1] && bb[1] != bb[2] && bb[0] != bb[2];
    bool zero = false;
    for (int j = 0; j < 3; ++j) zero = zero || std::abs(x[j]) < 1e-14;
    CHECK(distinct == !zero);
  }
  CHECK_THROWS_AS(b_to_a(0, 0, 0), DomainError);
  CHECK_THROWS_AS(b_to_a(1, 1, 1), DomainError);
}

TEST_CASE("m = 3 closed form for u") {
  for (const auto& av : {std::vector<double>{-3, 1, 2}, std::vector<double>{-2, -1, 3}}) {
    const CoeffVector a(av);
    const double A = 0.5;
    const M3Data d = closed_form_m3_data(a, A);
    const TurningData td = turning_points(a, A);
    // sn(0) = 0 and sn(K) = 1 give the turning points.
    CHECK(std::abs(closed_form_u_m3(d, 0.0, 0.0) - d.sign * d.gamma3) < 1e-14);
    CHECK(std::abs(closed_form_u_m3(d, 0.0, complete_K(d.k) / d.a_ell) - d.sign * d.gamma2) < 1e-12);
    CHECK(std::abs(closed_form_u_m3(d, d.c_at_alpha, 0.0) - td.alpha) < 1e-12);

    ReducedOptions opts;
    opts.tol = 1e-12;
    opts.samples = 41;
    const ReducedResult r = integrate_reduced(a, {td.alpha, pi / 2, 0.0}, 0.0, d.period, opts);
    double worst = 0.0, ode_res = 0.0;
    for (std::size_t i = 0; i < r.traj.states.size(); ++i) {
      const double t = r.traj.times[i];
      worst = std::max(worst, std::abs(closed_form_u_m3(d, d.c_at_alpha, t) - r.traj.states[i].u));
      const auto u = [&](double s) { return closed_form_u_m3(d, d.c_at_alpha, s); };
      const double du = oracle::derivative(u, t);
      ode_res = std::max(ode_res, std::abs(du * du - 4 * (q_eval(a, u(t)).value - A * A)));
    }
    CHECK(worst < 1e-6);
    CHECK(ode_res < 1e-9);

    // theta_j by quadrature against the full system.
    const std::vector<double> th0{pi / 2, 0.0, 0.0};
    const WState w0 = lift(a, td.alpha, th0);
    IntegrateOptions wo;
    wo.tol = 1e-12;
    wo.samples = 9;
    const auto wt = integrate_w(a, w0, 0.0, d.period, wo);
    for (std::size_t i = 1; i < wt.states.size(); ++i) {
      const double t = wt.times[i];
      for (int j = 0; j < 3; ++j) {
        const double th = closed_form_theta_j_m3(a, d, d.c_at_alpha, j, th0[j], t);
        CHECK(std::abs(wrap(th - std::arg(wt.states[i].w(j)))) < 1e-7);
      }
    }
  }
  CHECK_THROWS_AS(closed_form_m3_data(CoeffVector::from_ints({-2, -1, 1, 2}), 0.5), DomainError);
  CHECK_THROWS_AS(closed_form_m3_data(CoeffVector::from_ints({-1, 0, 1}), 0.5), DomainError);
}

TEST_CASE("explicit A = 0 solution") {
  const ExplicitM3 d = explicit_m3_data(-3, 2, 1);
  const CVector w0 = explicit_A0_m3(d, 0.0);
  CHECK(std::abs(w0(2)) == 0.0);
  CHECK(std::abs(w0(1) - d.c2) == 0.0);
  const double K = complete_K(d.k);
  const double period = 4 * K / d.a_ell;
  double worst_sum = 0.0, worst_rhs = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double t = -period + 2 * period * i / 200.0;
    const CVector w = explicit_A0_m3(d, t);
    CHECK(std::abs(w(1)) <= std::abs(w0(1)) + 1e-15);
    worst_sum = std::max(worst_sum, std::abs(w.squaredNorm() - 3.0));
    worst_rhs = std::max(worst_rhs, (explicit_A0_m3_dt(d, t) - rhs_w(d.a, w)).norm());
    for (int j = 0; j < 3; ++j) {
      const double dj = oracle::derivative([&](double s) { return explicit_A0_m3(d, s)(j).real(); }, t);
      CHECK(std::abs(dj - explicit_A0_m3_dt(d, t)(j).real()) < 1e-8);
    }
  }
  CHECK(worst_sum < 1e-12);
  CHECK(worst_rhs < 1e-9);

  // Against the integrated w-system from the t = 0 state, u = -1/a_3.
  const WState s0{w0, -1.0 / d.a[2]};
  IntegrateOptions wo;
  wo.tol = 1e-12;
  wo.samples = 41;
  const auto tr = integrate_w(d.a, s0, 0.0, period, wo);
  double worst = 0.0;
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    worst = std::max(worst, (tr.states[i].w - explicit_A0_m3(d, tr.times[i])).norm());
  }
  CHECK(worst < 1e-6);

  CHECK_THROWS_AS(explicit_m3_data(-3, 1, 2), DomainError);
  CHECK_THROWS_AS(explicit_m3_data(-3, 2, 2), DomainError);
  CHECK_THROWS_AS(explicit_m3_data(-4, 2, 1), DomainError);
}
