#pragma once

// Flat Calabi-Yau structure of C^m: the metric g, the Kahler form omega and
// the holomorphic volume form Omega = dz_1 ^ ... ^ dz_m, evaluated on tangent
// frames.  Tangent vectors are stored in complex coordinates; a vector v in
// C^m is the real vector (Re v_1, Im v_1, ..., Re v_m, Im v_m) of R^{2m}.

#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace slgeo {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// A point of C^m.
using ComplexPoint = CVector;

/// k tangent vectors of C^m, one per column.
struct TangentFrame {
  CMatrix vectors;

  int dim() const { return static_cast<int>(vectors.rows()); }
  int size() const { return static_cast<int>(vectors.cols()); }
};

/// Phase e^{i theta}; theta is reduced to [0, 2 pi).
class Phase {
 public:
  Phase() = default;
  explicit Phase(double theta);

  double theta() const { return theta_; }
  cplx unit() const { return std::polar(1.0, theta_); }

  static Phase one() { return Phase(0.0); }
  static Phase i() { return Phase(std::numbers::pi / 2); }
  /// i^n, the phase of the U(1)^{m-2}-invariant cones when n = m - 2.
  static Phase i_pow(int n);

  Phase operator*(const Phase& other) const { return Phase(theta_ + other.theta_); }

 private:
  double theta_ = 0.0;
};

struct CalibrationReport {
  double max_omega_residual = 0.0;
  double max_imag_residual = 0.0;
  double calibration_defect = 0.0;
  int sample_count = 0;
  int worst_sample_index = -1;

  double worst() const;
  bool passes(double tol) const;
  /// Fold another report in; sample indices of `other` are offset by the
  /// current count.
  void merge(const CalibrationReport& other);
};

/// omega(v, w) = sum_j Im(conj(v_j) w_j).
double kahler_form(const CVector& v, const CVector& w);

/// g(v, w) = Re sum_j conj(v_j) w_j.
double metric_inner(const CVector& v, const CVector& w);

/// Omega evaluated on an m-frame: the complex determinant of its columns.
cplx holomorphic_volume(const TangentFrame& frame);

/// Gram-Schmidt with respect to metric_inner.  Throws DomainError when the
/// frame is rank deficient relative to `rank_tol`.
TangentFrame orthonormalize(const TangentFrame& frame, double rank_tol = 1e-12);

/// Residuals of the special Lagrangian condition with phase e^{i theta} on
/// the plane spanned by `frame`: max |omega(e_i, e_j)|, |Im(e^{-i theta}
/// Omega)| and ||Omega| - 1| on an orthonormalized frame.  Orientation is not
/// fixed, so Omega = -e^{i theta} passes as well.
CalibrationReport sl_check(const TangentFrame& frame, const Phase& phase);

inline constexpr double kAnalyticFrameTol = 1e-8;
inline constexpr double kFiniteDifferenceFrameTol = 1e-6;

/// A parameterization from k reals into C^m.
using PointMap = std::function<ComplexPoint(std::span<const double>)>;

/// Central-difference Jacobian of `map` at `params`; column i is
/// d map / d params_i.
TangentFrame finite_diff_frame(const PointMap& map, std::span<const double> params,
                               double h = 1e-5);

/// Real 2m-vector view of a complex m-vector, interleaved (Re, Im).
Eigen::VectorXd to_real(const CVector& v);
CVector from_real(const Eigen::VectorXd& x);

}  // namespace slgeo
