#include "slgeo/elliptic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/trapezoidal.hpp>

#include "slgeo/error.hpp"

namespace slgeo {

namespace {

constexpr double kClamp = 1e-15;
constexpr int kMaxAgm = 64;

void require_modulus(double k) {
  if (!(k >= 0.0 && k <= 1.0)) {
    throw DomainError("elliptic modulus must lie in [0, 1], got " + std::to_string(k));
  }
}

double agm(double a, double b) {
  for (int n = 0; n < kMaxAgm; ++n) {
    const double an = 0.5 * (a + b);
    const double bn = std::sqrt(a * b);
    if (std::abs(an - bn) <= 4 * std::numeric_limits<double>::epsilon() * an) return an;
    a = an;
    b = bn;
  }
  return a;
}

// Wrap f so that a non-finite sample turns into a NumericalError instead of a
// silently poisoned sum.
struct FiniteGuard {
  const RealFn* f;
  double operator()(double x) const {
    const double y = (*f)(x);
    if (!std::isfinite(y)) {
      throw NumericalError("quadrature: non-finite integrand at u = " + std::to_string(x));
    }
    return y;
  }
};

}  // namespace

double complete_K(double k) {
  require_modulus(k);
  if (k >= 1.0) throw DomainError("complete_K diverges at k = 1");
  if (k < kClamp) return std::numbers::pi / 2;
  // sqrt(1 - k^2) written to keep precision as k -> 1.
  const double kp = std::sqrt((1.0 - k) * (1.0 + k));
  return std::numbers::pi / (2.0 * agm(1.0, kp));
}

JacobiTriple jacobi(double t, double k) {
  require_modulus(k);
  if (!std::isfinite(t)) throw DomainError("jacobi: non-finite argument");
  if (k < kClamp) return {std::sin(t), std::cos(t), 1.0};
  if (k > 1.0 - kClamp) {
    const double sech = 1.0 / std::cosh(t);
    return {std::tanh(t), sech, sech};
  }

  // Reduce modulo the real period 4K so that 2^N a_N t stays moderate.
  const double period = 4.0 * complete_K(k);
  t -= period * std::nearbyint(t / period);

  std::array<double, kMaxAgm + 1> a{};
  std::array<double, kMaxAgm + 1> c{};
  a[0] = 1.0;
  double b = std::sqrt((1.0 - k) * (1.0 + k));
  c[0] = k;
  int n = 0;
  while (std::abs(c[n]) > std::numeric_limits<double>::epsilon() && n < kMaxAgm) {
    a[n + 1] = 0.5 * (a[n] + b);
    c[n + 1] = 0.5 * (a[n] - b);
    b = std::sqrt(a[n] * b);
    ++n;
  }

  double phi = std::ldexp(a[n] * t, n);
  for (int j = n; j > 0; --j) {
    const double s = std::clamp(c[j] / a[j] * std::sin(phi), -1.0, 1.0);
    phi = 0.5 * (phi + std::asin(s));
  }
  const double sn = std::sin(phi);
  const double cn = std::cos(phi);
  // dn > 0 for k < 1; the usual cn / cos(phi_1 - phi_0) is 0/0 at odd multiples of K.
  const double dn = std::sqrt((1.0 - k * sn) * (1.0 + k * sn));
  return {sn, cn, dn};
}

double endpoint_sqrt_quadrature(const RealFn& f, double alpha, double beta) {
  if (!(alpha < beta)) throw DomainError("endpoint_sqrt_quadrature: need alpha < beta");
  const double width = beta - alpha;
  const FiniteGuard guard{&f};
  auto g = [&](double phi) {
    const double s = std::sin(phi);
    return guard(alpha + width * s * s);
  };
  double err = 0.0;
  double l1 = 0.0;
  return boost::math::quadrature::trapezoidal(g, 0.0, std::numbers::pi, 1e-12, 20, &err, &l1);
}

double endpoint_sqrt_quadrature_partial(const RealFn& f, double alpha, double beta, double u0,
                                        double u1) {
  if (!(alpha < beta)) throw DomainError("endpoint_sqrt_quadrature: need alpha < beta");
  auto in_range = [&](double u) { return u >= alpha && u <= beta; };
  if (!in_range(u0) || !in_range(u1)) {
    throw DomainError("endpoint_sqrt_quadrature_partial: limits outside [alpha, beta]");
  }
  const double width = beta - alpha;
  auto to_phi = [&](double u) {
    return std::asin(std::sqrt(std::clamp((u - alpha) / width, 0.0, 1.0)));
  };
  const FiniteGuard guard{&f};
  auto g = [&](double phi) {
    const double s = std::sin(phi);
    return 2.0 * guard(alpha + width * s * s);
  };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, to_phi(u0), to_phi(u1),
                                                                       15, 1e-13);
}

}  // namespace slgeo
