#pragma once

// Reference computations used only by the tests.  None of them calls into the
// library's integrators, quadrature or elliptic code: ODEs go through
// Boost.Odeint's Fehlberg 7(8) pair, integrals through Boost.Math's
// tanh-sinh and Gauss-Kronrod rules.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include <Eigen/Dense>

namespace oracle {

using Vec = std::vector<double>;
using cplx = std::complex<double>;
using System = std::function<void(const Vec&, Vec&, double)>;

/// State of dx/dt = f(x) at each requested time (times increasing or
/// decreasing from t0 = times.front()).
inline std::vector<Vec> rk78(const System& f, Vec x0, const std::vector<double>& times,
                             double tol = 1e-13) {
  namespace ode = boost::numeric::odeint;
  auto stepper = ode::make_controlled(tol, tol, ode::runge_kutta_fehlberg78<Vec>());
  std::vector<Vec> out;
  const double dt = times.size() > 1 && times[1] < times[0] ? -1e-3 : 1e-3;
  ode::integrate_times(stepper, f, x0, times.begin(), times.end(), dt,
                       [&](const Vec& x, double) { out.push_back(x); });
  return out;
}

inline Vec rk78_to(const System& f, const Vec& x0, double t0, double t1, double tol = 1e-13) {
  if (t0 == t1) return x0;
  return rk78(f, x0, {t0, t1}, tol).back();
}

/// (sn, cn, dn)' = (cn dn, -sn dn, -k^2 sn cn) from (0, 1, 1).
inline Vec jacobi_ode(double t, double k) {
  const System f = [k](const Vec& x, Vec& dx, double) {
    dx[0] = x[1] * x[2];
    dx[1] = -x[0] * x[2];
    dx[2] = -k * k * x[0] * x[1];
  };
  return rk78_to(f, {0.0, 1.0, 1.0}, 0.0, t, 1e-14);
}

/// K(k) from the defining integral.
inline double complete_K(double k) {
  auto f = [k](double x) { return 1.0 / std::sqrt(1.0 - k * k * std::sin(x) * std::sin(x)); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, std::numbers::pi / 2,
                                                                      20, 1e-15);
}

/// int_alpha^beta f(u) / sqrt((u - alpha)(beta - u)) du straight from the
/// singular integrand.
inline double singular_integral(const std::function<double(double)>& f, double alpha, double beta) {
  boost::math::quadrature::tanh_sinh<double> ts;
  // The second argument is the signed distance to the nearer end point,
  // free of the cancellation in u - alpha or beta - u.
  auto g = [&](double u, double xc) {
    const bool left_half = u < 0.5 * (alpha + beta);
    const double left = left_half ? std::abs(xc) : u - alpha;
    const double right = left_half ? beta - u : std::abs(xc);
    return f(u) / std::sqrt(left * right);
  };
  return ts.integrate(g, alpha, beta);
}

/// Real-coordinate view (Re v_1, Im v_1, ...).
inline Eigen::VectorXd real_view(const Eigen::VectorXcd& v) {
  Eigen::VectorXd x(2 * v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    x(2 * j) = v(j).real();
    x(2 * j + 1) = v(j).imag();
  }
  return x;
}

/// omega = sum_j dx_j ^ dy_j contracted in real coordinates.
inline double omega_real(const Eigen::VectorXcd& v, const Eigen::VectorXcd& w) {
  const Eigen::VectorXd x = real_view(v), y = real_view(w);
  double s = 0.0;
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    s += x(2 * j) * y(2 * j + 1) - x(2 * j + 1) * y(2 * j);
  }
  return s;
}

inline double metric_real(const Eigen::VectorXcd& v, const Eigen::VectorXcd& w) {
  return real_view(v).dot(real_view(w));
}

/// The w-system in real coordinates (Re w_1, Im w_1, ..., Re w_m, Im w_m, u),
/// products over k != j taken directly.
inline System wsystem(const std::vector<double>& a) {
  return [a](const Vec& x, Vec& dx, double) {
    const std::size_t m = a.size();
    std::vector<cplx> w(m);
    for (std::size_t j = 0; j < m; ++j) w[j] = {x[2 * j], x[2 * j + 1]};
    cplx all = 1.0;
    for (std::size_t j = 0; j < m; ++j) all *= w[j];
    for (std::size_t j = 0; j < m; ++j) {
      cplx others = 1.0;
      for (std::size_t k = 0; k < m; ++k) {
        if (k != j) others *= w[k];
      }
      const cplx d = a[j] * std::conj(others);
      dx[2 * j] = d.real();
      dx[2 * j + 1] = d.imag();
    }
    dx[2 * m] = 2 * all.real();
  };
}

inline Vec pack(const Eigen::VectorXcd& w, double u) {
  Vec x;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    x.push_back(w(j).real());
    x.push_back(w(j).imag());
  }
  x.push_back(u);
  return x;
}

inline Eigen::VectorXcd unpack_w(const Vec& x) {
  const std::size_t m = (x.size() - 1) / 2;
  Eigen::VectorXcd w(static_cast<Eigen::Index>(m));
  for (std::size_t j = 0; j < m; ++j) w(static_cast<Eigen::Index>(j)) = {x[2 * j], x[2 * j + 1]};
  return w;
}

/// The reduced system in (u, theta, psi).
inline System reduced(const std::vector<double>& a) {
  return [a](const Vec& x, Vec& dx, double) {
    double Q = 1.0, s1 = 0.0, s2 = 0.0;
    for (double aj : a) {
      const double f = aj * x[0] + 1.0;
      Q *= f;
      s1 += aj / f;
      s2 += aj * aj / f;
    }
    const double r = std::sqrt(Q);
    dx[0] = 2 * r * std::cos(x[1]);
    dx[1] = -r * std::sin(x[1]) * s1;
    dx[2] = -r * std::sin(x[1]) * s2;
  };
}

/// Times in (t0, t1) where u has a local minimum, i.e. cos(theta) crosses
/// zero upwards.  Each crossing is bracketed on a grid of width `h` and
/// refined with TOMS 748, integrating from the bracket's left end.
inline std::vector<double> reduced_u_minima(const std::vector<double>& a, const Vec& x0, double t0,
                                            double t1, double h = 0.01) {
  const System f = reduced(a);
  std::vector<double> grid;
  for (double t = t0; t < t1; t += h) grid.push_back(t);
  grid.push_back(t1);
  const auto states = rk78(f, x0, grid);
  std::vector<double> minima;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double g0 = std::cos(states[i][1]), g1 = std::cos(states[i + 1][1]);
    if (!(g0 < 0 && g1 >= 0)) continue;
    auto g = [&](double t) { return std::cos(rk78_to(f, states[i], grid[i], t)[1]); };
    boost::uintmax_t iters = 100;
    const auto br = boost::math::tools::toms748_solve(
        g, grid[i], grid[i + 1], g0, g1, boost::math::tools::eps_tolerance<double>(50), iters);
    minima.push_back(0.5 * (br.first + br.second));
  }
  return minima;
}

/// Five-point central difference.
inline double derivative(const std::function<double(double)>& f, double t, double h = 1e-3) {
  return (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) / (12 * h);
}

inline Eigen::VectorXcd random_cvector(std::mt19937_64& rng, int m, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Eigen::VectorXcd v(m);
  for (int j = 0; j < m; ++j) v(j) = {n(rng), n(rng)};
  return v;
}

}  // namespace oracle
