#pragma once

// The reduced system in (u, theta, psi):
//
//   du/dt     = 2 Q(u)^{1/2} cos(theta)
//   dtheta/dt = -Q(u)^{1/2} sin(theta) sum_j a_j   / (a_j u + 1)
//   dpsi/dt   = -Q(u)^{1/2} sin(theta) sum_j a_j^2 / (a_j u + 1)
//
// with Q(u) = prod_j (a_j u + 1) and first integral A = Q(u)^{1/2} sin(theta).
// For 0 < A < 1, u oscillates between the turning points alpha < 0 < beta with
// period T, and psi drops by Psi(A) per period.

#include <optional>
#include <utility>
#include <vector>

#include "slgeo/calibration.hpp"
#include "slgeo/rational.hpp"
#include "slgeo/wsystem.hpp"

namespace slgeo {

struct ReducedState {
  double u = 0.0;
  double theta = 0.0;
  double psi = 0.0;
};

using ReducedTrajectory = Trajectory<ReducedState>;

struct QEval {
  double value = 0.0;
  double deriv = 0.0;
};

QEval q_eval(const CoeffVector& a, double u);

/// Coefficients of Q in ascending powers of u (length m + 1).
std::vector<double> q_coefficients(const CoeffVector& a);

/// sum_j a_j / (a_j u + 1) and sum_j a_j^2 / (a_j u + 1).
double sum_a_over(const CoeffVector& a, double u);
double sum_a2_over(const CoeffVector& a, double u);

struct TurningData {
  double A = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  /// For m = 3 all three real roots of Q - A^2, ordered gamma[0] >= gamma[1]
  /// >= gamma[2].  Empty otherwise.
  std::vector<double> gamma;
};

/// Roots of Q(u) = A^2 in (-1/a_max, 0) and (0, -1/a_min), by bisection to
/// full precision.  Requires 0 < A < 1.
TurningData turning_points(const CoeffVector& a, double A);

/// A = Q(u0)^{1/2} sin(theta0).
double compute_A(const CoeffVector& a, double u0, double theta0);

struct ReducedOptions {
  double tol = 1e-10;
  int samples = 101;
  std::vector<double> times;   // explicit output times; overrides samples
  bool record_u_minima = false;
};

struct ReducedResult {
  ReducedTrajectory traj;
  double max_A_drift = 0.0;        // over accepted steps
  std::vector<double> u_minima;    // times where cos(theta) rises through 0
};

ReducedResult integrate_reduced(const CoeffVector& a, const ReducedState& s0, double t0,
                                double t1, const ReducedOptions& opts = {});

/// Right-hand side of the reduced system.
ReducedState rhs_reduced(const CoeffVector& a, const ReducedState& s);

/// T(A) = int_alpha^beta du / sqrt(Q(u) - A^2).
double period_T(const CoeffVector& a, double A);

/// Psi(A) = A int_alpha^beta S(v) dv / sqrt(Q(v) - A^2), S = sum a_j^2/(a_j v+1).
/// Always evaluated by quadrature, including on the (-1, 0, ..., 0, 1) family.
double rotation_Psi(const CoeffVector& a, double A);

/// (pi (a_max - a_min), pi sqrt(2 sum a_j^2)): the limits of Psi as A -> 0 and
/// A -> 1.
std::pair<double, double> psi_limits(const CoeffVector& a);

/// theta and psi as functions of u on a leg where u increases.  With A = 0 the
/// angles are constant.
std::pair<double, double> angles_of_u(const CoeffVector& a, double A, double u, double u0,
                                      double psi0);

struct TorusSolution {
  double A = 0.0;
  double T = 0.0;
  double Psi = 0.0;
  Rational q;
  long b_mult = 1;
  double alpha = 0.0;
  double beta = 0.0;
  double residual = 0.0;  // |Psi - 2 pi q|
};

struct ScanOptions {
  int grid = 256;
  double A_lo = 1e-3;
  double A_hi = 1.0 - 1e-3;
  double tol = 1e-10;
};

struct PsiSample {
  double A, Psi, T, alpha, beta;
};

/// Psi, T and turning points on an equally spaced A grid.
std::vector<PsiSample> psi_scan(const CoeffVector& a, const ScanOptions& opts = {});

struct RationalSearch {
  /// Psi is identically 2 pi and every A closes after one period.
  bool constant_psi = false;
  std::vector<TorusSolution> solutions;
};

/// All A in the scan range with Psi(A) = 2 pi q, one per sign change of
/// Psi - 2 pi q on the scan grid.  Throws NumericalError("no bracket ...")
/// when there is none.
RationalSearch find_rational_A(const CoeffVector& a, const Rational& q,
                               const ScanOptions& opts = {});

/// Populates a TorusSolution at a given A.
TorusSolution torus_solution_at(const CoeffVector& a, double A, const Rational& q);

/// a_1 = (b_3 - b_2)/sqrt3, a_2 = (b_1 - b_3)/sqrt3, a_3 = (b_2 - b_1)/sqrt3.
CoeffVector b_to_a(double b1, double b2, double b3);
std::vector<double> a_to_b(const CoeffVector& a);

/// Data of the sn^2 solution for m = 3.  In a frame where two weights are
/// negative, u = gamma3 + (gamma2 - gamma3) sn^2(a_ell t + c, k); with one
/// negative weight the frame is reached by a -> -a, u -> -u, recorded as
/// sign = -1.
struct M3Data {
  double A = 0.0;
  double gamma1 = 0.0, gamma2 = 0.0, gamma3 = 0.0;  // roots in the normalized frame
  double a_ell = 0.0;
  double k = 0.0;  // modulus, k^2 = (gamma2 - gamma3)/(gamma1 - gamma3)
  int sign = 1;
  /// c that puts u(0) at the lower turning point alpha.
  double c_at_alpha = 0.0;
  double period = 0.0;  // 2 K(k) / a_ell
};

M3Data closed_form_m3_data(const CoeffVector& a, double A);
double closed_form_u_m3(const M3Data& d, double c_shift, double t);
double closed_form_u_m3(const CoeffVector& a, double A, double c_shift, double t);

/// theta_j(t) = theta_j(0) - A int_0^t a_j / (a_j u + 1) dt along the closed
/// form, by quadrature.
double closed_form_theta_j_m3(const CoeffVector& a, const M3Data& d, double c_shift, int j,
                              double theta_j0, double t);

/// The explicit dn/cn/sn solution with A = 0 for integer b-coordinates.
struct ExplicitM3 {
  long b1, b2, b3;
  CoeffVector a;
  double a_ell;
  double k;
  double c1, c2, c3;  // prefactors of dn, cn, sn
};

/// Requires integers b2 > b3 > 0 > b1 with b1 + b2 + b3 = 0.
ExplicitM3 explicit_m3_data(long b1, long b2, long b3);
CVector explicit_A0_m3(const ExplicitM3& d, double t);
/// d w / d t from the derivatives of sn, cn, dn.
CVector explicit_A0_m3_dt(const ExplicitM3& d, double t);

}  // namespace slgeo
