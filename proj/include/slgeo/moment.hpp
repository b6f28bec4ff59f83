#pragma once

// Moment maps of affine symmetry groups of C^m.  A generator (X, v) with X
// anti-Hermitian and trace-free and v in C^m is the vector field
// z -> X z + v; its moment function is
//
//   mu(z) = Re((i/2) z^* X z) + Im(v^* z),
//
// normalized by mu(0) = 0 and characterized by d mu(w) = omega(X z + v, w).
// For X = i diag(a) this gives mu = -(1/2) sum a_j |z_j|^2.

#include <string>
#include <vector>

#include "slgeo/calibration.hpp"

namespace slgeo {

struct Generator {
  CMatrix X;
  CVector v;
};

struct MomentSpec {
  std::vector<Generator> generators;
  /// Reject non-commuting generators.  Off for the non-abelian actions
  /// (SO(m), SU(2) on S^3 C^2), whose moment components are still
  /// individually well defined.
  bool require_abelian = true;

  int dim() const;
  /// Checks shapes, anti-Hermitian/trace-free matrix parts, and commutation
  /// when required.  Throws DomainError.
  void validate(double tol = 1e-12) const;
};

/// i diag(d) with v = 0.
Generator diagonal_generator(const std::vector<double>& d);
/// X = 0 with translation v.
Generator translation_generator(const CVector& v);

std::vector<double> moment_value(const MomentSpec& spec, const ComplexPoint& z);

/// max over generators of |d mu(w) - omega(X z + v, w)|, with d mu(w) from a
/// central difference of step h.
double moment_identity_residual(const MomentSpec& spec, const ComplexPoint& z,
                                const CVector& w, double h = 1e-6);

/// Matrix exponential of an anti-Hermitian matrix.
CMatrix expm_skew(const CMatrix& X);

}  // namespace slgeo
