#pragma once

// Jacobi elliptic functions sn, cn, dn of real argument and modulus k in
// [0, 1], the complete integral K(k), and quadrature for integrands with
// inverse square root singularities at both ends of the interval.

#include <functional>

namespace slgeo {

struct JacobiTriple {
  double sn = 0.0;
  double cn = 1.0;
  double dn = 1.0;
};

/// K(k) = int_0^{pi/2} dx / sqrt(1 - k^2 sin^2 x), by the arithmetic-geometric
/// mean.  Requires 0 <= k < 1.
double complete_K(double k);

/// sn, cn, dn at (t, k) by the descending Landen/AGM scheme.  Moduli within
/// 1e-15 of 0 or 1 fall back to the trigonometric and hyperbolic limits.
JacobiTriple jacobi(double t, double k);

using RealFn = std::function<double(double)>;

/// int_alpha^beta f(u) du / sqrt((u - alpha)(beta - u)).
///
/// With u = alpha + (beta - alpha) sin^2(phi) the integral becomes
/// int_0^pi f(u(phi)) dphi over a full period of a smooth function, where the
/// trapezoid rule converges geometrically.  Nodes are doubled until successive
/// estimates agree to 1e-12 relative, up to 2^20 nodes.
double endpoint_sqrt_quadrature(const RealFn& f, double alpha, double beta);

/// The same integrand over a sub-interval [u0, u1] of [alpha, beta].  Uses
/// adaptive Gauss-Kronrod in the phi variable; u1 < u0 flips the sign.
double endpoint_sqrt_quadrature_partial(const RealFn& f, double alpha, double beta, double u0,
                                        double u1);

}  // namespace slgeo
