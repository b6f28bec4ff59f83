#include "slgeo/moment.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "slgeo/error.hpp"

namespace slgeo {

int MomentSpec::dim() const {
  if (generators.empty()) throw DomainError("moment spec without generators");
  const auto& g = generators.front();
  return static_cast<int>(std::max(g.X.rows(), g.v.size()));
}

void MomentSpec::validate(double tol) const {
  const int m = dim();
  for (std::size_t k = 0; k < generators.size(); ++k) {
    const auto& g = generators[k];
    if (g.X.rows() != m || g.X.cols() != m || g.v.size() != m) {
      throw DomainError("generator " + std::to_string(k) + " has the wrong shape");
    }
    if ((g.X + g.X.adjoint()).cwiseAbs().maxCoeff() > tol) {
      throw DomainError("generator " + std::to_string(k) + " is not anti-Hermitian");
    }
    if (std::abs(g.X.trace()) > tol) {
      throw DomainError("generator " + std::to_string(k) + " is not trace-free");
    }
  }
  if (!require_abelian) return;
  for (std::size_t i = 0; i < generators.size(); ++i) {
    for (std::size_t j = i + 1; j < generators.size(); ++j) {
      const auto& a = generators[i];
      const auto& b = generators[j];
      // Bracket of the affine fields Xz + v: ([Xa, Xb], Xa vb - Xb va).
      const double lin = (a.X * b.X - b.X * a.X).cwiseAbs().maxCoeff();
      const double trans = (a.X * b.v - b.X * a.v).cwiseAbs().maxCoeff();
      if (lin > tol || trans > tol) {
        throw DomainError("generators " + std::to_string(i) + " and " + std::to_string(j) +
                          " do not commute");
      }
    }
  }
}

Generator diagonal_generator(const std::vector<double>& d) {
  const auto m = static_cast<Eigen::Index>(d.size());
  Generator g{CMatrix::Zero(m, m), CVector::Zero(m)};
  for (Eigen::Index j = 0; j < m; ++j) g.X(j, j) = cplx(0.0, d[static_cast<std::size_t>(j)]);
  return g;
}

Generator translation_generator(const CVector& v) {
  return {CMatrix::Zero(v.size(), v.size()), v};
}

std::vector<double> moment_value(const MomentSpec& spec, const ComplexPoint& z) {
  std::vector<double> mu;
  mu.reserve(spec.generators.size());
  for (const auto& g : spec.generators) {
    if (g.X.cols() != z.size()) throw DomainError("moment_value: dimension mismatch");
    const cplx quad = z.dot(g.X * z);  // z^* X z, purely imaginary
    mu.push_back((cplx(0.0, 0.5) * quad).real() + g.v.dot(z).imag());
  }
  return mu;
}

double moment_identity_residual(const MomentSpec& spec, const ComplexPoint& z, const CVector& w,
                                double h) {
  const auto plus = moment_value(spec, z + h * w);
  const auto minus = moment_value(spec, z - h * w);
  double worst = 0.0;
  for (std::size_t k = 0; k < spec.generators.size(); ++k) {
    const auto& g = spec.generators[k];
    const double dmu = (plus[k] - minus[k]) / (2 * h);
    worst = std::max(worst, std::abs(dmu - kahler_form(g.X * z + g.v, w)));
  }
  return worst;
}

CMatrix expm_skew(const CMatrix& X) { return X.exp(); }

}  // namespace slgeo
