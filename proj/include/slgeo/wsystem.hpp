#pragma once

// The complex ODE system on (w_1, ..., w_m, u) whose solutions sweep out
// U(1)^{m-2}-invariant special Lagrangian cones:
//
//   dw_j/dt = a_j * conj(prod_{k != j} w_k),   du/dt = 2 Re(w_1 ... w_m),
//
// with the algebraic constraint |w_j|^2 = a_j u + 1 carried along as a drift
// monitor rather than imposed.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "slgeo/calibration.hpp"
#include "slgeo/ode.hpp"

namespace slgeo {

/// Weights a_1..a_m with zero sum.  Entries may come in any order; the
/// extreme weights are available as amin()/amax().
class CoeffVector {
 public:
  explicit CoeffVector(std::vector<double> a);
  /// Integer weights; requires hcf(|a_j|, a_j != 0) = 1.
  static CoeffVector from_ints(const std::vector<long>& a);
  /// Parses "-3,1,2".
  static CoeffVector parse(const std::string& text);

  int m() const { return static_cast<int>(a_.size()); }
  double operator[](int j) const { return a_[static_cast<std::size_t>(j)]; }
  const std::vector<double>& values() const { return a_; }
  bool integral() const { return integral_; }
  double amin() const;
  double amax() const;
  double sum_squares() const;
  /// One weight -1, one weight +1, the rest zero.
  bool is_degenerate_pm1() const;
  std::string to_string() const;

 private:
  std::vector<double> a_;
  bool integral_ = false;
};

struct WState {
  CVector w;
  double u = 0.0;
};

struct ConservedSet {
  std::vector<double> pj;  // a_m |w_j|^2 - a_j |w_m|^2, j < m
  double pm = 0.0;         // Im(w_1 ... w_m)
  double H = 0.0;          // 2 pm
};

struct InvariantReport {
  ConservedSet conserved;
  double constraint_residual = 0.0;  // max_j | |w_j|^2 - a_j u - 1 |
  std::optional<double> A_residual;  // |Im(w_1...w_m) - A| when A is given
};

template <class S>
struct Trajectory {
  std::vector<double> times;
  std::vector<S> states;
  ode::StepStats step_stats;
};

using WTrajectory = Trajectory<WState>;

/// Product of all entries of w.
cplx product(const CVector& w);

/// Right-hand side of the w-system.  Products over k != j use prefix and
/// suffix products so zero entries are handled without division.
CVector rhs_w(const CoeffVector& a, const CVector& w);

struct IntegrateOptions {
  double tol = 1e-10;
  int samples = 101;             // output times, equally spaced over the span
  std::vector<double> times;     // explicit output times; overrides samples
  double drift_factor = 1e3;     // abort once constraint drift > factor * tol
};

/// Integrates the w-system jointly with u.  `w0` must satisfy the constraint
/// for w0.u within 1e-10.
WTrajectory integrate_w(const CoeffVector& a, const WState& w0, double t0, double t1,
                        const IntegrateOptions& opts = {});

InvariantReport invariants_w(const CoeffVector& a, const WState& s,
                             std::optional<double> A = std::nullopt);

/// w_j = e^{i theta_j} sqrt(a_j u + 1).
WState lift(const CoeffVector& a, double u, const std::vector<double>& thetas);

struct Projected {
  double u = 0.0;
  std::vector<double> thetas;  // principal arguments in (-pi, pi]
};

/// Inverse of lift.  u is the mean of (|w_j|^2 - 1)/a_j over a_j != 0;
/// throws if some w_j = 0 or the moduli disagree with that u beyond `tol`.
Projected project(const CoeffVector& a, const CVector& w, double tol = 1e-8);

/// Unwraps a sequence of angles so that consecutive entries differ by less
/// than pi.
void unwrap(std::vector<double>& angles);

/// Poisson bracket for the weighted symplectic structure in which the
/// w-system is Hamiltonian:
///   {f, g} = sum_j a_j (df/dx_j dg/dy_j - df/dy_j dg/dx_j),
/// with w_j = x_j + i y_j, gradients by central differences.  Coordinates
/// with a_j = 0 are frozen and do not contribute.
using PhaseFn = std::function<double(const CVector&)>;
double poisson_bracket(const CoeffVector& a, const PhaseFn& f, const PhaseFn& g,
                       const CVector& z, double h = 1e-5);

/// Brackets among (p_1, ..., p_{m-1}, p_m, H), an (m+1)x(m+1) matrix.  When
/// `active` is given it lists the coordinates taking part; a zero weight
/// among them is an error.
Eigen::MatrixXd poisson_check(const CoeffVector& a, const CVector& z, double h = 1e-5,
                              const std::vector<int>& active = {});

/// The conserved functions in the order used by poisson_check.
std::vector<PhaseFn> conserved_functions(const CoeffVector& a);

}  // namespace slgeo
