#include "slgeo/families.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

#include "slgeo/elliptic.hpp"
#include "slgeo/error.hpp"
#include "slgeo/ode.hpp"
#include "slgeo/verify.hpp"

namespace slgeo {
namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI{0.0, 1.0};

void require(bool ok, const std::string& msg) {
  if (!ok) throw DomainError(msg);
}

Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& M) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > 1e-12 * std::max(1.0, s(0))) ++rank;
  }
  return svd.matrixV().rightCols(M.cols() - rank);
}

Eigen::MatrixXd sum_and_weight_rows(const std::vector<double>& a) {
  const auto m = static_cast<Eigen::Index>(a.size());
  Eigen::MatrixXd M(2, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    M(0, j) = 1.0;
    M(1, j) = a[static_cast<std::size_t>(j)];
  }
  return M;
}

std::vector<double> hyperspherical(std::span<const double> phi) {
  const std::size_t m = phi.size() + 1;
  std::vector<double> x(m);
  double s = 1.0;
  for (std::size_t k = 0; k + 1 < m; ++k) {
    x[k] = s * std::cos(phi[k]);
    s *= std::sin(phi[k]);
  }
  x[m - 1] = s;
  return x;
}

std::vector<Axis> sphere_axes(int m) {
  std::vector<Axis> axes(static_cast<std::size_t>(m - 2), Axis{0.25, kPi - 0.25, false});
  axes.push_back({0.0, 2 * kPi, true});
  return axes;
}

std::vector<Generator> so_generators(int m) {
  std::vector<Generator> gens;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      Generator g{CMatrix::Zero(m, m), CVector::Zero(m)};
      g.X(i, j) = 1.0;
      g.X(j, i) = -1.0;
      gens.push_back(std::move(g));
    }
  }
  return gens;
}

// i diag(n) for each column n of N.
std::vector<Generator> diagonal_generators(const Eigen::MatrixXd& N) {
  std::vector<Generator> gens;
  for (Eigen::Index k = 0; k < N.cols(); ++k) {
    std::vector<double> d(static_cast<std::size_t>(N.rows()));
    for (Eigen::Index j = 0; j < N.rows(); ++j) d[static_cast<std::size_t>(j)] = N(j, k);
    gens.push_back(diagonal_generator(d));
  }
  return gens;
}

void check_unit(const ComplexPoint& z, const std::string& who) {
  require(std::abs(z.norm() - 1.0) < 1e-9, who + ": link point is not unit norm");
}

double sum_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

// z^n for n >= 0, conj(z)^{-n} otherwise: the same argument as z^n without
// dividing by |z|.
cplx pow_s(cplx z, long n) {
  if (n < 0) return std::pow(std::conj(z), static_cast<int>(-n));
  return std::pow(z, static_cast<int>(n));
}

// ---------------------------------------------------------------------------
// Point maps shared by the standalone samplers and the families.

ComplexPoint hl_point(int m, const std::vector<double>& levels, double b,
                      std::span<const double> p) {
  require(m >= 2 && static_cast<int>(levels.size()) == m - 1, "hl: need m - 1 levels");
  require(static_cast<int>(p.size()) == m, "hl: need rho and m - 1 phases");
  const double rho = p[0];
  require(rho > 0, "hl: rho must be positive");
  std::vector<double> mod(static_cast<std::size_t>(m));
  double P = rho;
  for (int j = 0; j + 1 < m; ++j) {
    const double r2 = levels[static_cast<std::size_t>(j)] + rho * rho;
    require(r2 > 0, "hl: |z_" + std::to_string(j + 1) + "|^2 would be negative");
    mod[static_cast<std::size_t>(j)] = std::sqrt(r2);
    P *= mod[static_cast<std::size_t>(j)];
  }
  mod[static_cast<std::size_t>(m - 1)] = rho;
  const double ratio = b / P;
  require(std::abs(ratio) <= 1.0, "hl: |b| exceeds the product of the moduli");
  const double total = (m % 2 == 1) ? std::asin(ratio) : std::acos(ratio);
  const double free_sum = sum_of(p.subspan(1));
  ComplexPoint z(m);
  for (int j = 0; j + 1 < m; ++j) z(j) = std::polar(mod[static_cast<std::size_t>(j)], p[1 + j]);
  z(m - 1) = std::polar(rho, total - free_sum);
  return z;
}

ComplexPoint product_point(double a, double b, double c, std::span<const double> p) {
  require(p.size() == 3, "product: parameters are (rho, phi1, x)");
  const double rho = p[0];
  const double r1sq = a + rho * rho;
  require(rho > 0 && r1sq > 0, "product: moduli must be positive");
  const double r1 = std::sqrt(r1sq);
  const double ratio = b / (r1 * rho);
  require(std::abs(ratio) <= 1.0, "product: |b| exceeds |z1||z2|");
  const double phi2 = std::acos(ratio) - p[1];
  ComplexPoint z(3);
  z << std::polar(r1, p[1]), std::polar(rho, phi2), cplx(p[2], c);
  return z;
}

std::vector<Generator> marshall_gens_impl() {
  const double s3 = std::sqrt(3.0);
  CMatrix X1 = CMatrix::Zero(4, 4), X2 = CMatrix::Zero(4, 4), X3 = CMatrix::Zero(4, 4);
  X1.diagonal() << cplx(0, 3), cplx(0, 1), cplx(0, -1), cplx(0, -3);
  X2(0, 1) = s3;
  X2(1, 0) = -s3;
  X2(1, 2) = 2;
  X2(2, 1) = -2;
  X2(2, 3) = s3;
  X2(3, 2) = -s3;
  X3(0, 1) = X3(1, 0) = cplx(0, s3);
  X3(1, 2) = X3(2, 1) = cplx(0, 2);
  X3(2, 3) = X3(3, 2) = cplx(0, s3);
  const CVector zero = CVector::Zero(4);
  return {{X1, zero}, {X2, zero}, {X3, zero}};
}

Eigen::VectorXd marshall_residual(double d, const ComplexPoint& z) {
  const double s3 = std::sqrt(3.0);
  const cplx z1 = z(0), z2 = z(1), z3 = z(2), z4 = z(3);
  const cplx e1 = s3 * (z1 * std::conj(z2) + z3 * std::conj(z4)) + 2.0 * z2 * std::conj(z3);
  const double quad = 3 * std::norm(z1) + std::norm(z2) - std::norm(z3) - 3 * std::norm(z4);
  const cplx poly = 2 * s3 * (z1 * z3 * z3 * z3 + z2 * z2 * z2 * z4) - 9.0 * z1 * z2 * z3 * z4 +
                    4.5 * z1 * z1 * z4 * z4 - 1.5 * z2 * z2 * z3 * z3;
  Eigen::VectorXd r(4);
  r << e1.real(), e1.imag(), quad, poly.imag() - d;
  return r;
}

ComplexPoint marshall_seed(double d, double rho) {
  require(rho > 0, "marshall: rho must be positive");
  const double ratio = 2 * d / (9 * std::pow(rho, 4));
  require(std::abs(ratio) <= 1.0, "marshall: rho too small for level d");
  ComplexPoint z = ComplexPoint::Zero(4);
  z(0) = rho;
  z(3) = std::polar(rho, 0.5 * std::asin(ratio));
  return z;
}

ComplexPoint quadric_point(const CoeffVector& a, double c, int solve, double theta,
                           std::span<const double> xs) {
  const int m = a.m();
  require(static_cast<int>(xs.size()) == m - 1, "quadric: need m - 1 free coordinates");
  require(solve >= 0 && solve < m && a[static_cast<std::size_t>(solve)] != 0.0,
          "quadric: solved coordinate needs a nonzero weight");
  std::vector<double> x(static_cast<std::size_t>(m));
  double rest = 0.0;
  for (int j = 0, k = 0; j < m; ++j) {
    if (j == solve) continue;
    x[static_cast<std::size_t>(j)] = xs[static_cast<std::size_t>(k++)];
    rest += a[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
  }
  const double sq = (c - rest) / a[static_cast<std::size_t>(solve)];
  require(sq >= 0, "quadric: no real point over these coordinates");
  x[static_cast<std::size_t>(solve)] = std::sqrt(sq);
  ComplexPoint z(m);
  for (int j = 0; j < m; ++j) {
    z(j) = std::polar(1.0, a[static_cast<std::size_t>(j)] * theta) * x[static_cast<std::size_t>(j)];
  }
  return z;
}

// Reduced trajectory of a torus cone, started at the lower turning point and
// stored at checkpoints; states in between are integrated from the nearest
// checkpoint.
struct TorusTrack {
  CoeffVector a;
  TorusSolution sol;
  std::vector<double> times;
  std::vector<ReducedState> states;
  double tol = 1e-11;

  TorusTrack(const CoeffVector& a_, const TorusSolution& s, int checkpoints) : a(a_), sol(s) {
    require(sol.A > 0 && sol.A < 1 && sol.T > 0, "torus cone: invalid solution");
    ReducedOptions o;
    o.tol = tol;
    o.times = ode::linspace(0.0, span(), std::max(checkpoints, 2));
    const ReducedResult r = integrate_reduced(a, start(), 0.0, span(), o);
    times = r.traj.times;
    states = r.traj.states;
  }

  double span() const { return static_cast<double>(sol.b_mult) * sol.T; }
  ReducedState start() const { return {sol.alpha, kPi / 2, 0.0}; }

  ReducedState at(double t) const {
    auto it = std::lower_bound(times.begin(), times.end(), t);
    std::size_t i = static_cast<std::size_t>(it - times.begin());
    if (i == times.size()) i = times.size() - 1;
    if (i > 0 && std::abs(times[i - 1] - t) < std::abs(times[i] - t)) --i;
    if (times[i] == t) return states[i];
    ReducedOptions o;
    o.tol = tol;
    o.times = {times[i], t};
    return integrate_reduced(a, states[i], times[i], t, o).traj.states.back();
  }
};

// z_j = r e^{i alpha_j} sqrt(a_j u + 1) and its frame (d/dr, d/dt, d/dsigma).
SamplePoint torus_point(const CoeffVector& a, const ReducedState& s, double r,
                        std::span<const double> sigma, std::vector<double> params) {
  const int m = a.m();
  require(static_cast<int>(sigma.size()) == m - 2, "torus cone: need m - 2 orbit coordinates");
  const Eigen::MatrixXd N = orbit_basis(a.values());
  const ReducedState ds = rhs_reduced(a, s);
  Eigen::VectorXd sig(m - 2);
  for (int k = 0; k < m - 2; ++k) sig(k) = sigma[static_cast<std::size_t>(k)];
  const Eigen::VectorXd alpha = orbit_particular(a.values(), s.theta, s.psi) + N * sig;
  const Eigen::VectorXd dalpha = orbit_particular(a.values(), ds.theta, ds.psi);
  SamplePoint sp;
  sp.params = std::move(params);
  sp.point.resize(m);
  CMatrix F(m, m);
  for (int j = 0; j < m; ++j) {
    const double aj = a[static_cast<std::size_t>(j)];
    const double q = aj * s.u + 1.0;
    require(q > 0, "torus cone: a_j u + 1 must stay positive");
    const cplx unit = std::polar(1.0, alpha(j)) * std::sqrt(q);
    sp.point(j) = r * unit;
    F(j, 0) = unit;
    F(j, 1) = sp.point(j) * (kI * dalpha(j) + aj * ds.u / (2 * q));
    for (int k = 0; k < m - 2; ++k) F(j, 2 + k) = kI * N(j, k) * sp.point(j);
  }
  sp.frame.vectors = F;
  sp.analytic_frame = true;
  return sp;
}

SamplePoint explicit_point(const ExplicitM3& d, double r, double s, double t) {
  const CVector w = explicit_A0_m3(d, t);
  const CVector wt = explicit_A0_m3_dt(d, t);
  const double bs[3] = {static_cast<double>(d.b1), static_cast<double>(d.b2),
                        static_cast<double>(d.b3)};
  const double f = 1.0 / std::sqrt(3.0);
  SamplePoint sp;
  sp.params = {r, s, t};
  sp.point.resize(3);
  CMatrix F(3, 3);
  for (int j = 0; j < 3; ++j) {
    const cplx e = std::polar(1.0, bs[j] * s);
    sp.point(j) = r * f * e * w(j);
    F(j, 0) = f * e * w(j);
    F(j, 1) = kI * bs[j] * sp.point(j);
    F(j, 2) = r * f * e * wt(j);
  }
  sp.frame.vectors = F;
  sp.analytic_frame = true;
  return sp;
}

Eigen::MatrixXd pm1_basis(int m) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2, m);
  M.row(0).setOnes();
  M(1, 0) = 1.0;
  M(1, m - 1) = -1.0;
  return kernel_basis(M);
}

SamplePoint special_pm1_point(cplx B, cplx C, int m, double r, double t,
                              const Eigen::VectorXd& alpha, std::vector<double> params,
                              const Eigen::MatrixXd* N) {
  const cplx et = std::polar(1.0, t);
  const cplx w1 = B * et + C / et;
  const cplx wm = kI * std::conj(B) / et - kI * std::conj(C) * et;
  const cplx w1t = kI * B * et - kI * C / et;
  const cplx wmt = std::conj(B) / et + std::conj(C) * et;
  SamplePoint sp;
  sp.params = std::move(params);
  sp.point.resize(m);
  CVector dt = CVector::Zero(m);
  for (int j = 0; j < m; ++j) {
    const cplx e = std::polar(1.0, alpha(j));
    cplx w = 1.0;
    if (j == 0) {
      w = w1;
      dt(j) = r * e * w1t;
    } else if (j == m - 1) {
      w = wm;
      dt(j) = r * e * wmt;
    }
    sp.point(j) = r * e * w;
  }
  if (N != nullptr) {
    CMatrix F(m, m);
    for (int j = 0; j < m; ++j) {
      F(j, 0) = r > 0 ? sp.point(j) / r : cplx(0.0);
      F(j, 1) = dt(j);
      for (Eigen::Index k = 0; k < N->cols(); ++k) F(j, 2 + k) = kI * (*N)(j, k) * sp.point(j);
    }
    sp.frame.vectors = F;
    sp.analytic_frame = true;
  }
  return sp;
}

int default_n(int varying) {
  if (varying <= 0) return 1;
  const int n = static_cast<int>(std::floor(std::pow(2000.0, 1.0 / varying)));
  return std::clamp(n, 3, 16);
}

int varying_axes(const std::vector<Axis>& axes) {
  return static_cast<int>(
      std::count_if(axes.begin(), axes.end(), [](const Axis& x) { return x.lo != x.hi; }));
}

// Smallest rho on a 0.05 grid with all moduli squared >= 0.05 and the product
// of moduli >= 1.5 |b|.
double hl_rho_lo(const std::vector<double>& levels, double b) {
  for (double rho = 0.3; rho < 50.0; rho += 0.05) {
    double P = rho;
    bool ok = true;
    for (double l : levels) {
      const double r2 = l + rho * rho;
      if (r2 < 0.05) {
        ok = false;
        break;
      }
      P *= std::sqrt(r2);
    }
    if (ok && P >= 1.5 * std::abs(b)) return rho;
  }
  throw DomainError("hl: no feasible rho range");
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<std::vector<double>> product_grid(const std::vector<Axis>& axes, int n) {
  require(n >= 1, "grid needs at least one point per axis");
  std::vector<std::vector<double>> ticks;
  for (const Axis& ax : axes) {
    std::vector<double> t;
    if (ax.lo == ax.hi) {
      t.push_back(ax.lo);
    } else if (ax.periodic) {
      for (int k = 0; k < n; ++k) t.push_back(ax.lo + (ax.hi - ax.lo) * k / n);
    } else if (n == 1) {
      t.push_back(0.5 * (ax.lo + ax.hi));
    } else {
      t = ode::linspace(ax.lo, ax.hi, n);
    }
    ticks.push_back(std::move(t));
  }
  std::vector<std::vector<double>> grid{{}};
  for (const auto& t : ticks) {
    std::vector<std::vector<double>> next;
    next.reserve(grid.size() * t.size());
    for (const auto& g : grid) {
      for (double v : t) {
        auto p = g;
        p.push_back(v);
        next.push_back(std::move(p));
      }
    }
    grid = std::move(next);
  }
  return grid;
}

std::vector<std::vector<double>> random_grid(const std::vector<Axis>& axes, int n,
                                             std::uint64_t seed) {
  require(n >= 1, "random grid needs at least one point");
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> out(static_cast<std::size_t>(n));
  for (auto& p : out) {
    for (const Axis& ax : axes) {
      std::uniform_real_distribution<double> dist(ax.lo, ax.hi);
      p.push_back(ax.lo == ax.hi ? ax.lo : dist(rng));
    }
  }
  return out;
}

std::string kind_name(FamilyKind k) {
  switch (k) {
    case FamilyKind::HL_TORUS: return "hl";
    case FamilyKind::SO_CONE: return "so-cone";
    case FamilyKind::PRODUCT: return "product";
    case FamilyKind::MARSHALL: return "marshall";
    case FamilyKind::CASE_A_CONE: return "case-a";
    case FamilyKind::CASE_B: return "case-b";
    case FamilyKind::TORUS_CONE: return "torus-cone";
    case FamilyKind::EXPLICIT_M3: return "explicit-m3";
    case FamilyKind::SPECIAL_PM1: return "special-pm1";
    case FamilyKind::AC_FROM_CONE: return "ac-cone";
    case FamilyKind::QUADRIC: return "quadric";
    case FamilyKind::HELICOID: return "helicoid";
    case FamilyKind::PERP4: return "perp4";
  }
  return "?";
}

std::vector<FamilyKind> all_kinds() {
  return {FamilyKind::HL_TORUS,    FamilyKind::SO_CONE,     FamilyKind::PRODUCT,
          FamilyKind::MARSHALL,    FamilyKind::CASE_A_CONE, FamilyKind::CASE_B,
          FamilyKind::TORUS_CONE,  FamilyKind::EXPLICIT_M3, FamilyKind::SPECIAL_PM1,
          FamilyKind::AC_FROM_CONE, FamilyKind::QUADRIC,    FamilyKind::HELICOID,
          FamilyKind::PERP4};
}

FamilyKind parse_kind(const std::string& name) {
  for (FamilyKind k : all_kinds()) {
    if (kind_name(k) == name) return k;
  }
  throw DomainError("unknown family '" + name + "'");
}

std::string kind_summary(FamilyKind k) {
  switch (k) {
    case FamilyKind::HL_TORUS:
      return "T^{m-1}-invariant Harvey-Lawson family: |z_j|^2 - |z_m|^2 = a_j and Im or Re of "
             "z_1...z_m = b (phase 1)";
    case FamilyKind::SO_CONE:
      return "SO(m)-invariant family {lambda x : x in S^{m-1}, Im(lambda^m) = c} (phase 1)";
    case FamilyKind::PRODUCT:
      return "U(1) x R-invariant product in C^3: |z1|^2 - |z2|^2 = a, Re(z1 z2) = b, "
             "Im z3 = c (phase 1)";
    case FamilyKind::MARSHALL:
      return "SU(2)-invariant 4-folds in C^4 = S^3 C^2, moment zero and a quartic level d "
             "(phase 1)";
    case FamilyKind::CASE_A_CONE:
      return "U(1)^{m-2}-invariant cone with A = 0, u over its full range, optional sign "
             "extension (phase i^{m-2})";
    case FamilyKind::CASE_B:
      return "cone {(r e^{i alpha_j})} with sum alpha_j = pi/2 (phase i^{m-2})";
    case FamilyKind::TORUS_CONE:
      return "closed U(1)^{m-2}-invariant cone on T^{m-1} from a rational rotation number "
             "(phase i^{m-2})";
    case FamilyKind::EXPLICIT_M3:
      return "cone on T^2 in C^3 in Jacobi dn/cn/sn form with integer b_j (phase i)";
    case FamilyKind::SPECIAL_PM1:
      return "weights (-1, 0, ..., 0, 1) with w_1 = B e^{it} + C e^{-it} (phase i^{m-2})";
    case FamilyKind::AC_FROM_CONE:
      return "asymptotically conical family c (sin m theta)^{-1/m} e^{i theta} z over a cone "
             "link (phase of the cone)";
    case FamilyKind::QUADRIC:
      return "U(1)-orbits of real quadric points (e^{i a_j theta} x_j), sum a_j x_j^2 = c "
             "(phase i)";
    case FamilyKind::HELICOID:
      return "R-invariant helicoid (e^{it} x1, e^{-it} x2, x3 + it), x1^2 - x2^2 + 2 x3 = 0 "
             "(phase i)";
    case FamilyKind::PERP4:
      return "U(1)-orbits in C^4 of a C^3 cone crossed with R at level c (phase i times the "
             "cone phase)";
  }
  return "";
}

// ---------------------------------------------------------------------------
// Links.

ConeLink sphere_link(int m) {
  require(m >= 2, "sphere link needs m >= 2");
  ConeLink L;
  L.name = "sphere";
  L.m = m;
  L.dim = m - 1;
  L.phase = Phase::one();
  L.map = [m](std::span<const double> p) {
    require(static_cast<int>(p.size()) == m - 1, "sphere link: need m - 1 angles");
    const auto x = hyperspherical(p);
    ComplexPoint z(m);
    for (int j = 0; j < m; ++j) z(j) = x[static_cast<std::size_t>(j)];
    return z;
  };
  L.axes = sphere_axes(m);
  L.moment.generators = so_generators(m);
  L.moment.require_abelian = false;
  return L;
}

ConeLink case_a_link(const CoeffVector& a) {
  const int m = a.m();
  ConeLink L;
  L.name = "case-a(" + a.to_string() + ")";
  L.m = m;
  L.dim = m - 1;
  L.phase = Phase::i_pow(m - 2);
  const Eigen::MatrixXd N = orbit_basis(a.values());
  L.map = [a, N, m](std::span<const double> p) {
    require(static_cast<int>(p.size()) == m - 1, "case-a link: parameters are (u, sigma)");
    Eigen::VectorXd sig(m - 2);
    for (int k = 0; k < m - 2; ++k) sig(k) = p[1 + static_cast<std::size_t>(k)];
    const Eigen::VectorXd alpha = N * sig;
    return case_a_sample(a, p[0], std::vector<double>(alpha.data(), alpha.data() + m),
                         1.0 / std::sqrt(static_cast<double>(m)));
  };
  const double lo = -1.0 / a.amax(), hi = -1.0 / a.amin();
  const double pad = 0.05 * (hi - lo);
  L.axes.push_back({lo + pad, hi - pad, false});
  for (int k = 0; k < m - 2; ++k) L.axes.push_back({0.0, 2 * kPi, true});
  L.moment.generators = diagonal_generators(N);
  return L;
}

ConeLink explicit_m3_link(long b1, long b2, long b3) {
  const ExplicitM3 d = explicit_m3_data(b1, b2, b3);
  ConeLink L;
  L.name = "explicit-m3(" + std::to_string(b1) + "," + std::to_string(b2) + "," +
           std::to_string(b3) + ")";
  L.m = 3;
  L.dim = 2;
  L.phase = Phase::i();
  L.map = [d](std::span<const double> p) {
    require(p.size() == 2, "explicit-m3 link: parameters are (s, t)");
    return explicit_point(d, 1.0, p[0], p[1]).point;
  };
  L.axes = {{0.0, 2 * kPi, true}, {0.0, 4 * complete_K(d.k) / d.a_ell, true}};
  L.moment.generators = {diagonal_generator(
      {static_cast<double>(b1), static_cast<double>(b2), static_cast<double>(b3)})};
  return L;
}

// ---------------------------------------------------------------------------
// Standalone samplers.

SamplePoint hl_sample(int m, const std::vector<double>& levels, double b, double rho,
                      const std::vector<double>& phases) {
  require(static_cast<int>(phases.size()) == m - 1, "hl: need m - 1 phases");
  SamplePoint sp;
  sp.params.push_back(rho);
  sp.params.insert(sp.params.end(), phases.begin(), phases.end());
  const PointMap map = [m, levels, b](std::span<const double> p) {
    return hl_point(m, levels, b, p);
  };
  sp.point = map(sp.params);
  sp.frame = finite_diff_frame(map, sp.params);
  return sp;
}

ComplexPoint so_cone_sample(int m, double c, double theta, const std::vector<double>& x) {
  require(static_cast<int>(x.size()) == m, "so-cone: x must have m entries");
  double n2 = 0.0;
  for (double v : x) n2 += v * v;
  require(std::abs(std::sqrt(n2) - 1.0) < 1e-10, "so-cone: x must be a unit vector");
  const double s = std::sin(m * theta);
  require(c != 0.0 && c / s > 0.0, "so-cone: theta out of range for this c");
  const cplx lambda = std::polar(std::pow(c / s, 1.0 / m), theta);
  ComplexPoint z(m);
  for (int j = 0; j < m; ++j) z(j) = lambda * x[static_cast<std::size_t>(j)];
  return z;
}

ComplexPoint ac_from_cone(const ConeLink& link, double c, double theta,
                          std::span<const double> link_params) {
  require(c > 0, "ac-cone: c must be positive");
  require(theta > 0 && theta < kPi / link.m, "ac-cone: theta must lie in (0, pi/m)");
  const ComplexPoint z = link.map(link_params);
  check_unit(z, "ac-cone");
  const double scale = c * std::pow(std::sin(link.m * theta), -1.0 / link.m);
  return std::polar(scale, theta) * z;
}

ComplexPoint case_a_sample(const CoeffVector& a, double u, const std::vector<double>& angles,
                           double r, int sign_first, int sign_last) {
  const int m = a.m();
  require(static_cast<int>(angles.size()) == m, "case-a: need m angles");
  require(r >= 0, "case-a: r must be non-negative");
  require(std::abs(sign_first) == 1 && std::abs(sign_last) == 1, "case-a: signs must be +-1");
  double s0 = 0.0, s1 = 0.0, scale = 1.0;
  for (int j = 0; j < m; ++j) {
    s0 += angles[static_cast<std::size_t>(j)];
    s1 += a[static_cast<std::size_t>(j)] * angles[static_cast<std::size_t>(j)];
    scale += std::abs(angles[static_cast<std::size_t>(j)]) * (1 + std::abs(a[static_cast<std::size_t>(j)]));
  }
  require(std::abs(s0) < 1e-10 * scale && std::abs(s1) < 1e-10 * scale,
          "case-a: angles must satisfy sum alpha = 0 and sum a alpha = 0");
  const double lo = -1.0 / a.amax(), hi = -1.0 / a.amin();
  const double eps = 1e-12 * (hi - lo);
  require(u >= lo - eps && u <= hi + eps, "case-a: u outside [-1/a_max, -1/a_min]");
  const auto vals = a.values();
  const auto first = std::min_element(vals.begin(), vals.end()) - vals.begin();
  const auto last = vals.rend() - 1 - std::max_element(vals.rbegin(), vals.rend());
  ComplexPoint z(m);
  for (int j = 0; j < m; ++j) {
    const double q = std::max(vals[static_cast<std::size_t>(j)] * u + 1.0, 0.0);
    double sign = 1.0;
    if (j == first) sign *= sign_first;
    if (j == last) sign *= sign_last;
    z(j) = sign * r * std::polar(std::sqrt(q), angles[static_cast<std::size_t>(j)]);
  }
  return z;
}

ComplexPoint case_b_sample(int m, double r, const std::vector<double>& angles) {
  require(static_cast<int>(angles.size()) == m, "case-b: need m angles");
  require(std::abs(sum_of(angles) - kPi / 2) < 1e-10 * (1 + sum_of(angles)),
          "case-b: angles must sum to pi/2");
  ComplexPoint z(m);
  for (int j = 0; j < m; ++j) z(j) = std::polar(r, angles[static_cast<std::size_t>(j)]);
  return z;
}

SamplePoint torus_cone_sample(const CoeffVector& a, const TorusSolution& sol, double r, double t,
                              const std::vector<double>& orbit_coords) {
  const TorusTrack track(a, sol, 2);
  std::vector<double> params{r, t};
  params.insert(params.end(), orbit_coords.begin(), orbit_coords.end());
  return torus_point(a, track.at(t), r, orbit_coords, params);
}

SamplePoint explicit_m3_sample(long b1, long b2, long b3, double r, double s, double t) {
  return explicit_point(explicit_m3_data(b1, b2, b3), r, s, t);
}

ComplexPoint special_pm1_sample(cplx B, cplx C, int m, double r, double t,
                                const std::vector<double>& angles) {
  require(m >= 2, "special-pm1: m >= 2");
  require(std::abs(std::norm(B) + std::norm(C) - 1.0) < 1e-12,
          "special-pm1: need |B|^2 + |C|^2 = 1");
  require(static_cast<int>(angles.size()) == m, "special-pm1: need m angles");
  require(std::abs(sum_of(angles)) < 1e-10 && std::abs(angles.front() - angles.back()) < 1e-10,
          "special-pm1: angles need sum 0 and alpha_1 = alpha_m");
  const Eigen::VectorXd alpha = Eigen::Map<const Eigen::VectorXd>(angles.data(), m);
  return special_pm1_point(B, C, m, r, t, alpha, {}, nullptr).point;
}

ComplexPoint quadric_sample(const CoeffVector& a, double c, double theta,
                            const std::vector<double>& x) {
  const int m = a.m();
  require(static_cast<int>(x.size()) == m, "quadric: x must have m entries");
  double lhs = 0.0;
  for (int j = 0; j < m; ++j) lhs += a[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
  require(std::abs(lhs - c) <= 1e-10 * (1 + std::abs(c)), "quadric: x is not on the quadric");
  ComplexPoint z(m);
  for (int j = 0; j < m; ++j) {
    z(j) = std::polar(1.0, a[static_cast<std::size_t>(j)] * theta) * x[static_cast<std::size_t>(j)];
  }
  return z;
}

double quadric_identification_gap(const CoeffVector& a, double c, double theta,
                                  const std::vector<double>& x) {
  require(a.integral(), "quadric identification needs integer weights");
  std::vector<double> flipped = x;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (static_cast<long>(std::llround(a[j])) % 2 != 0) flipped[j] = -flipped[j];
  }
  return (quadric_sample(a, c, theta + kPi, flipped) - quadric_sample(a, c, theta, x)).norm();
}

ComplexPoint helicoid_sample(double t, double x1, double x2) {
  ComplexPoint z(3);
  z << std::polar(x1, t), std::polar(x2, -t), cplx(0.5 * (x2 * x2 - x1 * x1), t);
  return z;
}

ComplexPoint perp4_sample(const ConeLink& link3, double theta, double x4, double c,
                          std::span<const double> link_params) {
  require(link3.m == 3, "perp4: link must be in C^3");
  const double rho2 = c + 3 * x4 * x4;
  require(rho2 > 0, "perp4: c + 3 x4^2 must be positive");
  const ComplexPoint y = link3.map(link_params);
  check_unit(y, "perp4");
  ComplexPoint z(4);
  z.head(3) = std::polar(std::sqrt(rho2), theta) * y;
  z(3) = std::polar(x4, -3 * theta);
  return z;
}

ConformalResidual conformal_residual(long b1, long b2, long b3, double s, double t,
                                     double modulus_scale) {
  const ExplicitM3 d = explicit_m3_data(b1, b2, b3);
  const CVector w = modulus_scale * explicit_A0_m3(d, t);
  // d/dt through the w-system, so rescaled moduli do not give a solution.
  const CVector wt = rhs_w(d.a, w);
  const double bs[3] = {static_cast<double>(b1), static_cast<double>(b2), static_cast<double>(b3)};
  const double f = 1.0 / std::sqrt(3.0);
  CVector ps(3), pt(3);
  for (int j = 0; j < 3; ++j) {
    const cplx e = std::polar(f, bs[j] * s);
    ps(j) = kI * bs[j] * e * w(j);
    pt(j) = e * wt(j);
  }
  return {metric_inner(ps, pt), ps.squaredNorm() - pt.squaredNorm()};
}

Eigen::MatrixXd orbit_basis(const std::vector<double>& a) {
  return kernel_basis(sum_and_weight_rows(a));
}

Eigen::VectorXd orbit_particular(const std::vector<double>& a, double theta, double psi) {
  const Eigen::MatrixXd M = sum_and_weight_rows(a);
  const Eigen::Vector2d rhs(theta, psi);
  return M.transpose() * (M * M.transpose()).ldlt().solve(rhs);
}

std::vector<Generator> marshall_generators() { return marshall_gens_impl(); }

// ---------------------------------------------------------------------------

bool has_implicit_form(FamilyKind k) {
  switch (k) {
    case FamilyKind::HL_TORUS:
    case FamilyKind::PRODUCT:
    case FamilyKind::MARSHALL:
    case FamilyKind::QUADRIC:
    case FamilyKind::HELICOID:
      return true;
    default:
      return false;
  }
}

Eigen::VectorXd implicit_residual(const FamilySpec& spec, const ComplexPoint& z) {
  require(z.size() == spec.m, "implicit_residual: point has the wrong dimension");
  const int m = spec.m;
  switch (spec.kind) {
    case FamilyKind::HL_TORUS: {
      Eigen::VectorXd r(m);
      for (int j = 0; j + 1 < m; ++j) {
        r(j) = std::norm(z(j)) - std::norm(z(m - 1)) - spec.levels[static_cast<std::size_t>(j)];
      }
      cplx prod = 1.0;
      for (int j = 0; j < m; ++j) prod *= z(j);
      r(m - 1) = ((m % 2 == 1) ? prod.imag() : prod.real()) - spec.b;
      return r;
    }
    case FamilyKind::PRODUCT: {
      Eigen::VectorXd r(3);
      r << std::norm(z(0)) - std::norm(z(1)) - spec.levels[0],
          (z(0) * z(1)).real() - spec.levels[1], z(2).imag() - spec.levels[2];
      return r;
    }
    case FamilyKind::MARSHALL:
      return marshall_residual(spec.d, z);
    case FamilyKind::QUADRIC: {
      // sum a_j |z_j|^2 = c, and arg z_j = a_j theta mod pi for a common theta.
      const CoeffVector a(spec.weights);
      require(a.integral(), "quadric residual needs integer weights");
      const int ref = spec.solve_index;
      const long ar = std::lround(a[static_cast<std::size_t>(ref)]);
      Eigen::VectorXd r(m);
      double q = 0.0;
      for (int j = 0; j < m; ++j) q += a[static_cast<std::size_t>(j)] * std::norm(z(j));
      r(0) = q - spec.c;
      for (int j = 0, row = 1; j < m; ++j) {
        if (j == ref) continue;
        const long aj = std::lround(a[static_cast<std::size_t>(j)]);
        r(row++) = (pow_s(z(j), ar) * pow_s(std::conj(z(ref)), aj)).imag();
      }
      return r;
    }
    case FamilyKind::HELICOID: {
      const double t = z(2).imag();
      Eigen::VectorXd r(3);
      r << std::norm(z(0)) - std::norm(z(1)) + 2 * z(2).real(), (z(0) * z(1)).imag(),
          (z(0) * std::polar(1.0, -t)).imag();
      return r;
    }
    default:
      throw DomainError("family '" + kind_name(spec.kind) + "' has no implicit form");
  }
}

TangentFrame null_space_frame(const std::function<Eigen::VectorXd(const ComplexPoint&)>& residual,
                              const ComplexPoint& z, int expected_dim, double h,
                              double threshold) {
  const Eigen::MatrixXd J = residual_jacobian(residual, z, h);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > threshold * s(0)) ++rank;
  }
  const int null_dim = static_cast<int>(J.cols()) - rank;
  if (null_dim != expected_dim) {
    throw NumericalError("null_space_frame: Jacobian null space has dimension " +
                         std::to_string(null_dim) + ", expected " + std::to_string(expected_dim));
  }
  TangentFrame F;
  F.vectors.resize(z.size(), null_dim);
  for (int k = 0; k < null_dim; ++k) F.vectors.col(k) = from_real(svd.matrixV().col(rank + k));
  return F;
}

// ---------------------------------------------------------------------------
// Spec constructors.

FamilySpec FamilySpec::hl_torus(int m, std::vector<double> levels, double b) {
  require(m >= 2 && static_cast<int>(levels.size()) == m - 1, "hl: need m - 1 levels");
  FamilySpec s;
  s.kind = FamilyKind::HL_TORUS;
  s.m = m;
  s.phase = Phase::one();
  s.levels = std::move(levels);
  s.b = b;
  return s;
}

FamilySpec FamilySpec::so_cone(int m, double c) {
  require(m >= 2, "so-cone: m >= 2");
  require(c != 0.0, "so-cone: c = 0 is the singular union of planes");
  FamilySpec s;
  s.kind = FamilyKind::SO_CONE;
  s.m = m;
  s.phase = Phase::one();
  s.c = c;
  return s;
}

FamilySpec FamilySpec::product(double a, double b, double c) {
  FamilySpec s;
  s.kind = FamilyKind::PRODUCT;
  s.m = 3;
  s.phase = Phase::one();
  s.levels = {a, b, c};
  return s;
}

FamilySpec FamilySpec::marshall(double d) {
  FamilySpec s;
  s.kind = FamilyKind::MARSHALL;
  s.m = 4;
  s.phase = Phase::one();
  s.d = d;
  return s;
}

FamilySpec FamilySpec::case_a(const CoeffVector& a, int sign_first, int sign_last) {
  FamilySpec s;
  s.kind = FamilyKind::CASE_A_CONE;
  s.m = a.m();
  s.phase = Phase::i_pow(a.m() - 2);
  s.weights = a.values();
  s.sign_first = sign_first;
  s.sign_last = sign_last;
  return s;
}

FamilySpec FamilySpec::case_b(int m) {
  require(m >= 2, "case-b: m >= 2");
  FamilySpec s;
  s.kind = FamilyKind::CASE_B;
  s.m = m;
  s.phase = Phase::i_pow(m - 2);
  return s;
}

FamilySpec FamilySpec::torus_cone(const CoeffVector& a, const TorusSolution& sol) {
  FamilySpec s;
  s.kind = FamilyKind::TORUS_CONE;
  s.m = a.m();
  s.phase = Phase::i_pow(a.m() - 2);
  s.weights = a.values();
  s.torus = sol;
  return s;
}

FamilySpec FamilySpec::explicit_m3(long b1, long b2, long b3) {
  explicit_m3_data(b1, b2, b3);  // validates
  FamilySpec s;
  s.kind = FamilyKind::EXPLICIT_M3;
  s.m = 3;
  s.phase = Phase::i();
  s.bvec = {b1, b2, b3};
  return s;
}

FamilySpec FamilySpec::special_pm1(int m, cplx B, cplx C) {
  require(m >= 2, "special-pm1: m >= 2");
  require(std::abs(std::norm(B) + std::norm(C) - 1.0) < 1e-12,
          "special-pm1: need |B|^2 + |C|^2 = 1");
  FamilySpec s;
  s.kind = FamilyKind::SPECIAL_PM1;
  s.m = m;
  s.phase = Phase::i_pow(m - 2);
  s.B = B;
  s.C = C;
  return s;
}

FamilySpec FamilySpec::ac_from_cone(ConeLink link, double c) {
  require(c > 0, "ac-cone: c must be positive");
  FamilySpec s;
  s.kind = FamilyKind::AC_FROM_CONE;
  s.m = link.m;
  s.phase = link.phase;
  s.c = c;
  s.link = std::move(link);
  return s;
}

FamilySpec FamilySpec::quadric(const CoeffVector& a, double c, int solve_index) {
  require(solve_index >= 0 && solve_index < a.m(), "quadric: solve index out of range");
  FamilySpec s;
  s.kind = FamilyKind::QUADRIC;
  s.m = a.m();
  s.phase = Phase::i();
  s.weights = a.values();
  s.c = c;
  s.solve_index = solve_index;
  return s;
}

FamilySpec FamilySpec::helicoid() {
  FamilySpec s;
  s.kind = FamilyKind::HELICOID;
  s.m = 3;
  s.phase = Phase::i();
  return s;
}

FamilySpec FamilySpec::perp4(ConeLink link3, double c) {
  require(link3.m == 3, "perp4: link must be in C^3");
  FamilySpec s;
  s.kind = FamilyKind::PERP4;
  s.m = 4;
  s.phase = Phase::i() * link3.phase;
  s.c = c;
  s.link = std::move(link3);
  return s;
}

namespace {

std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

}  // namespace

std::string FamilySpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << kind_name(kind) << " m=" << m;
  switch (kind) {
    case FamilyKind::HL_TORUS: os << " levels=" << join(levels) << " b=" << b; break;
    case FamilyKind::SO_CONE: os << " c=" << c; break;
    case FamilyKind::PRODUCT: os << " a,b,c=" << join(levels); break;
    case FamilyKind::MARSHALL: os << " d=" << d; break;
    case FamilyKind::CASE_A_CONE:
      os << " a=" << join(weights) << " signs=" << sign_first << "," << sign_last;
      break;
    case FamilyKind::CASE_B: break;
    case FamilyKind::TORUS_CONE:
      os << " a=" << join(weights);
      if (torus) os << " q=" << torus->q.to_string() << " A=" << torus->A;
      break;
    case FamilyKind::EXPLICIT_M3:
      os << " b=" << bvec[0] << "," << bvec[1] << "," << bvec[2];
      break;
    case FamilyKind::SPECIAL_PM1:
      os << " B=" << B.real() << (B.imag() < 0 ? "" : "+") << B.imag() << "i C=" << C.real()
         << (C.imag() < 0 ? "" : "+") << C.imag() << "i";
      break;
    case FamilyKind::AC_FROM_CONE:
    case FamilyKind::PERP4:
      os << " c=" << c << " link=" << (link ? link->name : "?");
      break;
    case FamilyKind::QUADRIC:
      os << " a=" << join(weights) << " c=" << c << " solve=" << solve_index;
      break;
    case FamilyKind::HELICOID: break;
  }
  os << " phase=" << phase.theta();
  return os.str();
}

// ---------------------------------------------------------------------------

SamplePoint Family::sample(std::span<const double> params) const {
  require(static_cast<int>(params.size()) == param_dim,
          name + ": expected " + std::to_string(param_dim) + " parameters");
  if (frame) {
    // Analytic families build point and frame together through `frame`.
    SamplePoint sp;
    sp.params.assign(params.begin(), params.end());
    sp.point = map(params);
    sp.frame = frame(params);
    sp.analytic_frame = true;
    return sp;
  }
  SamplePoint sp;
  sp.params.assign(params.begin(), params.end());
  sp.point = map(params);
  if (null_space_frame) {
    const FamilySpec s = spec;
    sp.frame = slgeo::null_space_frame(
        [s](const ComplexPoint& z) { return implicit_residual(s, z); }, sp.point, param_dim);
  } else {
    sp.frame = finite_diff_frame(map, params);
  }
  return sp;
}

Family make_family(const FamilySpec& spec, int grid_n) {
  require(grid_n >= 0, "grid size must be non-negative");
  Family f;
  f.spec = spec;
  f.name = kind_name(spec.kind);
  f.has_implicit = has_implicit_form(spec.kind);
  const int m = spec.m;
  std::vector<Axis> axes;
  auto diag_level = [&](std::vector<Generator> gens, std::vector<double> level) {
    f.moment.generators = std::move(gens);
    f.level_factors.assign(f.moment.generators.size(), -2.0);
    f.moment_level = std::move(level);
  };

  switch (spec.kind) {
    case FamilyKind::HL_TORUS: {
      const auto levels = spec.levels;
      const double b = spec.b;
      f.param_dim = m;
      f.map = [m, levels, b](std::span<const double> p) { return hl_point(m, levels, b, p); };
      const double lo = hl_rho_lo(levels, b);
      axes.push_back({lo, lo + 1.0, false});
      for (int j = 0; j + 1 < m; ++j) axes.push_back({0.0, 2 * kPi, true});
      std::vector<Generator> gens;
      std::vector<double> lev;
      for (int k = 0; k + 1 < m; ++k) {
        std::vector<double> d(static_cast<std::size_t>(m), 0.0);
        d[static_cast<std::size_t>(k)] = 1.0;
        d[static_cast<std::size_t>(m - 1)] = -1.0;
        gens.push_back(diagonal_generator(d));
        lev.push_back(-0.5 * levels[static_cast<std::size_t>(k)]);
      }
      diag_level(std::move(gens), std::move(lev));
      break;
    }
    case FamilyKind::SO_CONE: {
      const double c = spec.c;
      f.param_dim = m;
      f.map = [m, c](std::span<const double> p) {
        return so_cone_sample(m, c, p[0], hyperspherical(p.subspan(1)));
      };
      const double w = kPi / m;
      const double base = c > 0 ? 0.0 : w;
      axes.push_back({base + 0.15 * w, base + 0.85 * w, false});
      const auto sph = sphere_axes(m);
      axes.insert(axes.end(), sph.begin(), sph.end());
      f.moment.generators = so_generators(m);
      f.moment.require_abelian = false;
      f.moment_level.assign(f.moment.generators.size(), 0.0);
      f.level_factors.assign(f.moment.generators.size(), 1.0);
      break;
    }
    case FamilyKind::PRODUCT: {
      const double a = spec.levels[0], b = spec.levels[1], c = spec.levels[2];
      f.param_dim = 3;
      f.map = [a, b, c](std::span<const double> p) { return product_point(a, b, c, p); };
      double lo = 0.3;
      while (lo * lo + a < 0.05 || std::sqrt(lo * lo + a) * lo < 1.5 * std::abs(b)) lo += 0.05;
      axes = {{lo, lo + 1.0, false}, {0.0, 2 * kPi, true}, {-1.0, 1.0, false}};
      CVector e3 = CVector::Zero(3);
      e3(2) = 1.0;
      f.moment.generators = {diagonal_generator({1.0, -1.0, 0.0}), translation_generator(e3)};
      f.moment_level = {-0.5 * a, c};
      f.level_factors = {-2.0, 1.0};
      break;
    }
    case FamilyKind::MARSHALL: {
      const double d = spec.d;
      const auto gens = marshall_gens_impl();
      f.param_dim = 4;
      f.null_space_frame = true;
      f.map = [d, gens](std::span<const double> p) {
        require(p.size() == 4, "marshall: parameters are (rho, s1, s2, s3)");
        CMatrix X = CMatrix::Zero(4, 4);
        for (int k = 0; k < 3; ++k) X += p[1 + static_cast<std::size_t>(k)] * gens[static_cast<std::size_t>(k)].X;
        const ComplexPoint z = expm_skew(X) * marshall_seed(d, p[0]);
        const ResidualFn res = [d](const ComplexPoint& y) { return marshall_residual(d, y); };
        if (res(z).cwiseAbs().maxCoeff() < 1e-13) return z;
        return newton_project(res, z, 1e-12).point;
      };
      const double lo = std::max(0.7, 1.1 * std::pow(2 * std::abs(d) / 9, 0.25));
      axes = {{lo, lo + 0.7, false}, {-0.8, 0.8, false}, {-0.8, 0.8, false}, {-0.8, 0.8, false}};
      f.moment.generators = gens;
      f.moment.require_abelian = false;
      f.moment_level = {0.0, 0.0, 0.0};
      f.level_factors = {-2.0, 1.0, -1.0};
      break;
    }
    case FamilyKind::CASE_A_CONE: {
      const CoeffVector a(spec.weights);
      const Eigen::MatrixXd N = orbit_basis(a.values());
      const int sf = spec.sign_first, sl = spec.sign_last;
      const auto vals = a.values();
      const auto first = std::min_element(vals.begin(), vals.end()) - vals.begin();
      const auto last = vals.rend() - 1 - std::max_element(vals.rbegin(), vals.rend());
      f.param_dim = m;
      auto alpha_of = [N, m](std::span<const double> p) {
        Eigen::VectorXd sig(m - 2);
        for (int k = 0; k < m - 2; ++k) sig(k) = p[2 + static_cast<std::size_t>(k)];
        return Eigen::VectorXd(N * sig);
      };
      f.map = [a, alpha_of, sf, sl, m](std::span<const double> p) {
        const Eigen::VectorXd al = alpha_of(p);
        return case_a_sample(a, p[1], std::vector<double>(al.data(), al.data() + m), p[0], sf, sl);
      };
      f.frame = [a, alpha_of, N, m, sf, sl, first, last](std::span<const double> p) {
        const double r = p[0], u = p[1];
        const Eigen::VectorXd al = alpha_of(p);
        CMatrix F(m, m);
        for (int j = 0; j < m; ++j) {
          const double aj = a[static_cast<std::size_t>(j)];
          const double q = aj * u + 1.0;
          require(q > 0, "case-a: frame is singular where a coordinate vanishes");
          double sign = 1.0;
          if (j == first) sign *= sf;
          if (j == last) sign *= sl;
          const cplx unit = sign * std::polar(std::sqrt(q), al(j));
          F(j, 0) = unit;
          F(j, 1) = r * unit * aj / (2 * q);
          for (int k = 0; k < m - 2; ++k) F(j, 2 + k) = kI * N(j, k) * r * unit;
        }
        return TangentFrame{F};
      };
      const double lo = -1.0 / a.amax(), hi = -1.0 / a.amin();
      const double pad = 0.05 * (hi - lo);
      axes.push_back({1.0, 1.0, false});
      axes.push_back({lo + pad, hi - pad, false});
      for (int k = 0; k < m - 2; ++k) axes.push_back({0.0, 2 * kPi, true});
      diag_level(diagonal_generators(N), std::vector<double>(static_cast<std::size_t>(m - 2), 0.0));
      break;
    }
    case FamilyKind::CASE_B: {
      Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(1, m);
      const Eigen::MatrixXd N = kernel_basis(ones);
      f.param_dim = m;
      auto alpha_of = [N, m](std::span<const double> p) {
        Eigen::VectorXd sig(m - 1);
        for (int k = 0; k < m - 1; ++k) sig(k) = p[1 + static_cast<std::size_t>(k)];
        return Eigen::VectorXd(Eigen::VectorXd::Constant(m, kPi / (2 * m)) + N * sig);
      };
      f.map = [alpha_of, m](std::span<const double> p) {
        const Eigen::VectorXd al = alpha_of(p);
        return case_b_sample(m, p[0], std::vector<double>(al.data(), al.data() + m));
      };
      f.frame = [alpha_of, N, m](std::span<const double> p) {
        const Eigen::VectorXd al = alpha_of(p);
        CMatrix F(m, m);
        for (int j = 0; j < m; ++j) {
          const cplx unit = std::polar(1.0, al(j));
          F(j, 0) = unit;
          for (int k = 0; k < m - 1; ++k) F(j, 1 + k) = kI * N(j, k) * p[0] * unit;
        }
        return TangentFrame{F};
      };
      axes.push_back({1.0, 1.0, false});
      for (int k = 0; k < m - 1; ++k) axes.push_back({0.0, 2 * kPi, true});
      diag_level(diagonal_generators(N), std::vector<double>(static_cast<std::size_t>(m - 1), 0.0));
      break;
    }
    case FamilyKind::TORUS_CONE: {
      require(spec.torus.has_value(), "torus-cone: spec has no solution");
      const CoeffVector a(spec.weights);
      auto track = std::make_shared<const TorusTrack>(a, *spec.torus, 129);
      f.param_dim = m;
      auto build = [track, a, m](std::span<const double> p) {
        require(static_cast<int>(p.size()) == m, "torus-cone: parameters are (r, t, sigma)");
        return torus_point(a, track->at(p[1]), p[0], p.subspan(2),
                           std::vector<double>(p.begin(), p.end()));
      };
      f.map = [build](std::span<const double> p) { return build(p).point; };
      f.frame = [build](std::span<const double> p) { return build(p).frame; };
      axes.push_back({1.0, 1.0, false});
      axes.push_back({0.0, track->span(), true});
      for (int k = 0; k < m - 2; ++k) axes.push_back({0.0, 2 * kPi, true});
      diag_level(diagonal_generators(orbit_basis(a.values())),
                 std::vector<double>(static_cast<std::size_t>(m - 2), 0.0));
      break;
    }
    case FamilyKind::EXPLICIT_M3: {
      const ExplicitM3 d = explicit_m3_data(spec.bvec[0], spec.bvec[1], spec.bvec[2]);
      f.param_dim = 3;
      f.map = [d](std::span<const double> p) {
        require(p.size() == 3, "explicit-m3: parameters are (r, s, t)");
        return explicit_point(d, p[0], p[1], p[2]).point;
      };
      f.frame = [d](std::span<const double> p) { return explicit_point(d, p[0], p[1], p[2]).frame; };
      axes = {{1.0, 1.0, false}, {0.0, 2 * kPi, true}, {0.0, 4 * complete_K(d.k) / d.a_ell, true}};
      diag_level({diagonal_generator({static_cast<double>(d.b1), static_cast<double>(d.b2),
                                      static_cast<double>(d.b3)})},
                 {0.0});
      break;
    }
    case FamilyKind::SPECIAL_PM1: {
      const Eigen::MatrixXd N = pm1_basis(m);
      const cplx B = spec.B, C = spec.C;
      f.param_dim = m;
      auto build = [N, B, C, m](std::span<const double> p) {
        require(static_cast<int>(p.size()) == m, "special-pm1: parameters are (r, t, sigma)");
        Eigen::VectorXd sig(m - 2);
        for (int k = 0; k < m - 2; ++k) sig(k) = p[2 + static_cast<std::size_t>(k)];
        return special_pm1_point(B, C, m, p[0], p[1], N * sig,
                                 std::vector<double>(p.begin(), p.end()), &N);
      };
      f.map = [build](std::span<const double> p) { return build(p).point; };
      f.frame = [build](std::span<const double> p) { return build(p).frame; };
      axes.push_back({1.0, 1.0, false});
      axes.push_back({0.0, 2 * kPi, true});
      for (int k = 0; k < m - 2; ++k) axes.push_back({0.0, 2 * kPi, true});
      diag_level(diagonal_generators(N), std::vector<double>(static_cast<std::size_t>(m - 2), 0.0));
      break;
    }
    case FamilyKind::AC_FROM_CONE: {
      require(spec.link.has_value(), "ac-cone: spec has no link");
      const ConeLink link = *spec.link;
      const double c = spec.c;
      f.param_dim = m;
      f.map = [link, c](std::span<const double> p) {
        return ac_from_cone(link, c, p[0], p.subspan(1));
      };
      const double w = kPi / m;
      axes.push_back({0.15 * w, 0.85 * w, false});
      axes.insert(axes.end(), link.axes.begin(), link.axes.end());
      f.moment = link.moment;
      f.moment_level.assign(f.moment.generators.size(), 0.0);
      f.level_factors.assign(f.moment.generators.size(), 1.0);
      break;
    }
    case FamilyKind::QUADRIC: {
      const CoeffVector a(spec.weights);
      const double c = spec.c;
      const int solve = spec.solve_index;
      f.param_dim = m;
      f.map = [a, c, solve](std::span<const double> p) {
        return quadric_point(a, c, solve, p[0], p.subspan(1));
      };
      axes.push_back({0.0, 2 * kPi, true});
      for (int k = 0; k + 1 < m; ++k) axes.push_back({-0.6, 0.6, false});
      diag_level({diagonal_generator(a.values())}, {-0.5 * c});
      break;
    }
    case FamilyKind::HELICOID: {
      f.param_dim = 3;
      f.map = [](std::span<const double> p) {
        require(p.size() == 3, "helicoid: parameters are (t, x1, x2)");
        return helicoid_sample(p[0], p[1], p[2]);
      };
      f.frame = [](std::span<const double> p) {
        const double t = p[0], x1 = p[1], x2 = p[2];
        const cplx e = std::polar(1.0, t);
        CMatrix F(3, 3);
        F.col(0) << kI * e * x1, -kI * std::conj(e) * x2, kI;
        F.col(1) << e, 0.0, -x1;
        F.col(2) << 0.0, std::conj(e), x2;
        return TangentFrame{F};
      };
      axes = {{-kPi, kPi, false}, {-1.0, 1.0, false}, {-1.0, 1.0, false}};
      CVector v = CVector::Zero(3);
      v(2) = kI;
      f.moment.generators = {Generator{diagonal_generator({1.0, -1.0, 0.0}).X, v}};
      f.moment_level = {0.0};
      f.level_factors = {-2.0};
      break;
    }
    case FamilyKind::PERP4: {
      require(spec.link.has_value(), "perp4: spec has no link");
      const ConeLink link = *spec.link;
      const double c = spec.c;
      f.param_dim = 4;
      f.map = [link, c](std::span<const double> p) {
        require(p.size() == 4, "perp4: parameters are (theta, x4, link params)");
        return perp4_sample(link, p[0], p[1], c, p.subspan(2));
      };
      double x4 = 1.0;
      if (c <= 0) x4 = std::sqrt(-c / 3) + 0.3;
      axes.push_back({0.0, 2 * kPi, true});
      if (c > 0) {
        axes.push_back({-1.0, 1.0, false});
      } else {
        axes.push_back({x4, x4 + 1.0, false});
      }
      axes.insert(axes.end(), link.axes.begin(), link.axes.end());
      diag_level({diagonal_generator({1.0, 1.0, 1.0, -3.0})}, {-0.5 * c});
      break;
    }
  }

  const int n = grid_n > 0 ? grid_n : default_n(varying_axes(axes));
  f.grid = product_grid(axes, n);
  f.axes = axes;
  if (spec.kind == FamilyKind::QUADRIC) {
    // Keep points where the solved coordinate stays away from zero.
    const CoeffVector a(spec.weights);
    const int solve = spec.solve_index;
    std::erase_if(f.grid, [&](const std::vector<double>& p) {
      double rest = 0.0;
      for (int j = 0, k = 1; j < m; ++j) {
        if (j == solve) continue;
        rest += a[static_cast<std::size_t>(j)] * p[static_cast<std::size_t>(k)] * p[static_cast<std::size_t>(k)];
        ++k;
      }
      return (spec.c - rest) / a[static_cast<std::size_t>(solve)] < 0.05;
    });
  }
  f.moment.validate();
  return f;
}

std::vector<FamilySpec> catalog() {
  std::vector<FamilySpec> out;
  out.push_back(FamilySpec::hl_torus(3, {1.0, 0.5}, 0.3));
  out.push_back(FamilySpec::hl_torus(4, {1.0, 1.0, 0.0}, 0.5));
  out.push_back(FamilySpec::so_cone(3, 1.0));
  out.push_back(FamilySpec::so_cone(4, 1.0));
  out.push_back(FamilySpec::product(0.5, 0.3, 0.2));
  out.push_back(FamilySpec::marshall(0.5));
  out.push_back(FamilySpec::case_a(CoeffVector({-3, 1, 2})));
  out.push_back(FamilySpec::case_a(CoeffVector({-3, -1, 1, 3}), -1, 1));
  out.push_back(FamilySpec::case_b(3));
  out.push_back(FamilySpec::case_b(4));
  {
    const CoeffVector a({-3, 1, 2});
    const auto found = find_rational_A(a, Rational(13, 5));
    out.push_back(FamilySpec::torus_cone(a, found.solutions.front()));
  }
  out.push_back(FamilySpec::explicit_m3(-3, 2, 1));
  out.push_back(FamilySpec::special_pm1(3, std::cos(0.4), cplx(0.0, std::sin(0.4))));
  out.push_back(FamilySpec::ac_from_cone(sphere_link(3), 1.0));
  out.push_back(FamilySpec::ac_from_cone(case_a_link(CoeffVector({-2, 1, 1})), 1.0));
  out.push_back(FamilySpec::quadric(CoeffVector({1, 2, -3}), 1.0, 1));
  out.push_back(FamilySpec::helicoid());
  out.push_back(FamilySpec::perp4(sphere_link(3), 1.0));
  return out;
}

}  // namespace slgeo
