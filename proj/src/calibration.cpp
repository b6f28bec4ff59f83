#include "slgeo/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "slgeo/error.hpp"

namespace slgeo {

namespace {

void require_same_dim(const CVector& v, const CVector& w) {
  if (v.size() != w.size()) {
    throw DomainError("dimension mismatch: " + std::to_string(v.size()) + " vs " +
                      std::to_string(w.size()));
  }
}

}  // namespace

Phase::Phase(double theta) {
  constexpr double two_pi = 2 * std::numbers::pi;
  theta_ = std::fmod(theta, two_pi);
  if (theta_ < 0) theta_ += two_pi;
  if (theta_ >= two_pi) theta_ = 0.0;
}

Phase Phase::i_pow(int n) {
  const int r = ((n % 4) + 4) % 4;
  return Phase(r * std::numbers::pi / 2);
}

double CalibrationReport::worst() const {
  return std::max({max_omega_residual, max_imag_residual, calibration_defect});
}

bool CalibrationReport::passes(double tol) const {
  return max_omega_residual < tol && max_imag_residual < tol && calibration_defect < tol;
}

void CalibrationReport::merge(const CalibrationReport& other) {
  if (other.sample_count == 0) return;
  if (sample_count == 0 || other.worst() > worst()) {
    worst_sample_index = sample_count + other.worst_sample_index;
  }
  max_omega_residual = std::max(max_omega_residual, other.max_omega_residual);
  max_imag_residual = std::max(max_imag_residual, other.max_imag_residual);
  calibration_defect = std::max(calibration_defect, other.calibration_defect);
  sample_count += other.sample_count;
}

double kahler_form(const CVector& v, const CVector& w) {
  require_same_dim(v, w);
  return v.dot(w).imag();  // Eigen's dot conjugates the first argument
}

double metric_inner(const CVector& v, const CVector& w) {
  require_same_dim(v, w);
  return v.dot(w).real();
}

cplx holomorphic_volume(const TangentFrame& frame) {
  if (frame.size() != frame.dim()) {
    throw DomainError("holomorphic_volume needs an m-frame in C^m, got " +
                      std::to_string(frame.size()) + " vectors in C^" +
                      std::to_string(frame.dim()));
  }
  return frame.vectors.determinant();
}

TangentFrame orthonormalize(const TangentFrame& frame, double rank_tol) {
  TangentFrame out{frame.vectors};
  double scale = 0.0;
  for (int c = 0; c < frame.size(); ++c) scale = std::max(scale, frame.vectors.col(c).norm());
  if (scale == 0.0) throw DomainError("orthonormalize: zero frame");

  // Two passes of modified Gram-Schmidt; the real inner product is the
  // real part of the Hermitian one.
  for (int c = 0; c < out.size(); ++c) {
    CVector v = out.vectors.col(c);
    for (int pass = 0; pass < 2; ++pass) {
      for (int p = 0; p < c; ++p) {
        const CVector e = out.vectors.col(p);
        v -= metric_inner(e, v) * e;
      }
    }
    const double n = v.norm();
    if (!(n > rank_tol * scale)) {
      throw DomainError("orthonormalize: frame is rank deficient at column " +
                        std::to_string(c));
    }
    out.vectors.col(c) = v / n;
  }
  return out;
}

CalibrationReport sl_check(const TangentFrame& frame, const Phase& phase) {
  if (frame.size() != frame.dim()) {
    throw DomainError("sl_check needs an m-frame in C^m");
  }
  const TangentFrame e = orthonormalize(frame);
  CalibrationReport rep;
  for (int i = 0; i < e.size(); ++i) {
    for (int j = i + 1; j < e.size(); ++j) {
      rep.max_omega_residual = std::max(
          rep.max_omega_residual, std::abs(kahler_form(e.vectors.col(i), e.vectors.col(j))));
    }
  }
  const cplx omega_value = holomorphic_volume(e);
  rep.max_imag_residual = std::abs((std::conj(phase.unit()) * omega_value).imag());
  rep.calibration_defect = std::abs(std::abs(omega_value) - 1.0);
  rep.sample_count = 1;
  rep.worst_sample_index = 0;
  return rep;
}

TangentFrame finite_diff_frame(const PointMap& map, std::span<const double> params, double h) {
  if (!(h > 0)) throw DomainError("finite_diff_frame: step must be positive");
  std::vector<double> p(params.begin(), params.end());
  const int k = static_cast<int>(p.size());
  TangentFrame frame;
  for (int i = 0; i < k; ++i) {
    const double p0 = p[i];
    p[i] = p0 + h;
    const CVector plus = map(p);
    p[i] = p0 - h;
    const CVector minus = map(p);
    p[i] = p0;
    if (i == 0) frame.vectors.resize(plus.size(), k);
    const CVector d = (plus - minus) / (2 * h);
    if (!d.allFinite()) {
      throw NumericalError("finite_diff_frame: non-finite evaluation in direction " +
                           std::to_string(i));
    }
    frame.vectors.col(i) = d;
  }
  return frame;
}

Eigen::VectorXd to_real(const CVector& v) {
  Eigen::VectorXd x(2 * v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    x(2 * j) = v(j).real();
    x(2 * j + 1) = v(j).imag();
  }
  return x;
}

CVector from_real(const Eigen::VectorXd& x) {
  CVector v(x.size() / 2);
  for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = cplx(x(2 * j), x(2 * j + 1));
  return v;
}

}  // namespace slgeo
