#pragma once

// Explicit special Lagrangian families in C^m.  Each family is a map from a
// parameter box into C^m together with its phase, a default sampling grid,
// the moment map of its symmetry group, and (where it has one) a set of
// defining equations.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slgeo/calibration.hpp"
#include "slgeo/moment.hpp"
#include "slgeo/rational.hpp"
#include "slgeo/reduced.hpp"
#include "slgeo/wsystem.hpp"

namespace slgeo {

enum class FamilyKind {
  HL_TORUS,
  SO_CONE,
  PRODUCT,
  MARSHALL,
  CASE_A_CONE,
  CASE_B,
  TORUS_CONE,
  EXPLICIT_M3,
  SPECIAL_PM1,
  AC_FROM_CONE,
  QUADRIC,
  HELICOID,
  PERP4,
};

std::string kind_name(FamilyKind k);
FamilyKind parse_kind(const std::string& name);
std::vector<FamilyKind> all_kinds();

/// One parameter axis of a sampling grid.  Periodic axes leave out the
/// upper end point.
struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  bool periodic = false;
};

/// Cartesian grid with `n` points per axis (one point, the midpoint, when an
/// axis has lo == hi).
std::vector<std::vector<double>> product_grid(const std::vector<Axis>& axes, int n);

/// n points drawn uniformly from the box spanned by `axes` with a 64-bit
/// Mersenne twister seeded by `seed`.
std::vector<std::vector<double>> random_grid(const std::vector<Axis>& axes, int n,
                                             std::uint64_t seed);

/// Unit-norm points of the link of an SL cone.
struct ConeLink {
  std::string name;
  int m = 0;
  int dim = 0;  // m - 1 parameters
  Phase phase;
  PointMap map;
  std::vector<Axis> axes;
  MomentSpec moment;
};

/// The unit sphere of R^m (phase 1).
ConeLink sphere_link(int m);
/// The case-A cone for weights a (phase i^{m-2}), normalized to the sphere.
ConeLink case_a_link(const CoeffVector& a);
/// The cone for integers b2 > b3 > 0 > b1 (phase i), normalized.
ConeLink explicit_m3_link(long b1, long b2, long b3);

struct FamilySpec {
  FamilyKind kind = FamilyKind::HL_TORUS;
  int m = 3;
  Phase phase;

  std::vector<double> levels;   // HL: a_1..a_{m-1};  PRODUCT: (a, b, c)
  double b = 0.0;               // HL product level
  double c = 0.0;               // SO_CONE, AC_FROM_CONE, QUADRIC, PERP4
  double d = 0.0;               // MARSHALL
  std::vector<double> weights;  // CASE_A, TORUS_CONE, QUADRIC
  std::vector<long> bvec;       // EXPLICIT_M3
  cplx B{1.0, 0.0}, C{0.0, 0.0};  // SPECIAL_PM1
  std::optional<TorusSolution> torus;  // TORUS_CONE
  std::optional<ConeLink> link;        // AC_FROM_CONE, PERP4
  int solve_index = 0;          // QUADRIC: coordinate solved from the others
  int sign_first = 1, sign_last = 1;  // CASE_A sign pattern

  static FamilySpec hl_torus(int m, std::vector<double> levels, double b);
  static FamilySpec so_cone(int m, double c);
  static FamilySpec product(double a, double b, double c);
  static FamilySpec marshall(double d);
  static FamilySpec case_a(const CoeffVector& a, int sign_first = 1, int sign_last = 1);
  static FamilySpec case_b(int m);
  static FamilySpec torus_cone(const CoeffVector& a, const TorusSolution& sol);
  static FamilySpec explicit_m3(long b1, long b2, long b3);
  static FamilySpec special_pm1(int m, cplx B, cplx C);
  static FamilySpec ac_from_cone(ConeLink link, double c);
  static FamilySpec quadric(const CoeffVector& a, double c, int solve_index);
  static FamilySpec helicoid();
  static FamilySpec perp4(ConeLink link3, double c);

  std::string describe() const;
};

struct SamplePoint {
  ComplexPoint point;
  TangentFrame frame;
  std::vector<double> params;
  bool analytic_frame = false;
};

using FrameMap = std::function<TangentFrame(std::span<const double>)>;

struct Family {
  FamilySpec spec;
  std::string name;
  int param_dim = 0;
  PointMap map;
  FrameMap frame;  // analytic tangent frame; empty -> see below
  /// Frame from the null space of the implicit residual's Jacobian instead
  /// of differencing the map.
  bool null_space_frame = false;
  std::vector<Axis> axes;  // parameter box the grid is drawn from
  std::vector<std::vector<double>> grid;
  MomentSpec moment;
  std::vector<double> moment_level;  // expected moment_value on the family
  /// The quadratic in the family's defining equations equals
  /// level_factors[k] * moment_value[k] (e.g. -2 for diagonal generators).
  std::vector<double> level_factors;
  bool has_implicit = false;

  SamplePoint sample(std::span<const double> params) const;
  double tolerance() const { return frame ? kAnalyticFrameTol : kFiniteDifferenceFrameTol; }
};

/// Builds the sampler, grid and moment data for a spec.  `grid_n` sets the
/// points per grid axis (0 keeps each family's default).
Family make_family(const FamilySpec& spec, int grid_n = 0);

/// One representative of every kind, with parameters on smooth strata.
std::vector<FamilySpec> catalog();
/// A line describing the construction behind a kind.
std::string kind_summary(FamilyKind k);

/// Defining equations; zero exactly on the family.  Throws DomainError for
/// kinds that have none.
Eigen::VectorXd implicit_residual(const FamilySpec& spec, const ComplexPoint& z);
bool has_implicit_form(FamilyKind k);

/// Tangent frame spanning the null space of the real Jacobian of `residual`
/// at z (singular values below `threshold` relative to the largest).
TangentFrame null_space_frame(const std::function<Eigen::VectorXd(const ComplexPoint&)>& residual,
                              const ComplexPoint& z, int expected_dim, double h = 1e-6,
                              double threshold = 1e-10);

// Samplers named after the individual constructions.

SamplePoint hl_sample(int m, const std::vector<double>& levels, double b, double rho,
                      const std::vector<double>& phases);
ComplexPoint so_cone_sample(int m, double c, double theta, const std::vector<double>& x);
ComplexPoint ac_from_cone(const ConeLink& link, double c, double theta,
                          std::span<const double> link_params);
ComplexPoint case_a_sample(const CoeffVector& a, double u, const std::vector<double>& angles,
                           double r, int sign_first = 1, int sign_last = 1);
ComplexPoint case_b_sample(int m, double r, const std::vector<double>& angles);
SamplePoint torus_cone_sample(const CoeffVector& a, const TorusSolution& sol, double r, double t,
                              const std::vector<double>& orbit_coords);
SamplePoint explicit_m3_sample(long b1, long b2, long b3, double r, double s, double t);
ComplexPoint special_pm1_sample(cplx B, cplx C, int m, double r, double t,
                                const std::vector<double>& angles);
ComplexPoint quadric_sample(const CoeffVector& a, double c, double theta,
                            const std::vector<double>& x);
/// Checks Phi(theta + pi, ((-1)^{a_j} x_j)) = Phi(theta, x); returns the gap.
double quadric_identification_gap(const CoeffVector& a, double c, double theta,
                                  const std::vector<double>& x);
ComplexPoint helicoid_sample(double t, double x1, double x2);
ComplexPoint perp4_sample(const ConeLink& link3, double theta, double x4, double c,
                          std::span<const double> link_params);

struct ConformalResidual {
  double inner = 0.0;     // g(dPhi/ds, dPhi/dt)
  double norm_gap = 0.0;  // |dPhi/ds|^2 - |dPhi/dt|^2
};

/// For Phi(s, t) = 3^{-1/2} (e^{i b_j s} w_j(t)) built on the explicit A = 0
/// solution.  `modulus_scale` multiplies the moduli of w (1 = true solution).
ConformalResidual conformal_residual(long b1, long b2, long b3, double s, double t,
                                     double modulus_scale = 1.0);

/// Basis of {alpha : sum alpha_j = 0, sum a_j alpha_j = 0}, orthonormal
/// columns (m x (m-2)).
Eigen::MatrixXd orbit_basis(const std::vector<double>& a);
/// Least-norm alpha with sum alpha_j = theta and sum a_j alpha_j = psi.
Eigen::VectorXd orbit_particular(const std::vector<double>& a, double theta, double psi);

/// Marshall's three generators of su(2) inside su(4).
std::vector<Generator> marshall_generators();

}  // namespace slgeo
