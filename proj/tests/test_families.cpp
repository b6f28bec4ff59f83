#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "slgeo/error.hpp"
#include "slgeo/families.hpp"
#include "slgeo/verify.hpp"

using namespace slgeo;
using std::numbers::pi;

namespace {

constexpr cplx I(0.0, 1.0);

// Worst sl_check residual of a family over its default grid.
double worst_calibration(const Family& f) {
  double worst = 0.0;
  for (const auto& p : f.grid) worst = std::max(worst, sl_check(f.sample(p).frame, f.spec.phase).worst());
  return worst;
}

double worst_moment(const Family& f) {
  double worst = 0.0;
  for (const auto& p : f.grid) {
    const auto mu = moment_value(f.moment, f.map(p));
    for (std::size_t k = 0; k < mu.size(); ++k) worst = std::max(worst, std::abs(mu[k] - f.moment_level[k]));
  }
  return worst;
}

std::vector<double> as_vec(const ComplexPoint& z) {
  std::vector<double> x;
  for (Eigen::Index j = 0; j < z.size(); ++j) x.push_back(z(j).real());
  return x;
}

}  // namespace

TEST_CASE("kind names round trip") {
  for (FamilyKind k : all_kinds()) {
    CHECK(parse_kind(kind_name(k)) == k);
    CHECK(!kind_summary(k).empty());
  }
  CHECK(all_kinds().size() == 13);
  CHECK_THROWS_AS(parse_kind("bogus"), DomainError);
}

TEST_CASE("grids") {
  const std::vector<Axis> axes{{0.0, 1.0, false}, {0.0, 2 * pi, true}, {0.5, 0.5, false}};
  const auto g = product_grid(axes, 4);
  CHECK(g.size() == 16);
  for (const auto& p : g) {
    CHECK(p[1] < 2 * pi - 1.0);  // periodic axes leave out the end point
    CHECK(p[2] == 0.5);
  }
  CHECK(g.front()[0] == 0.0);
  CHECK(g.back()[0] == 1.0);

  const auto r1 = random_grid(axes, 10, 42), r2 = random_grid(axes, 10, 42), r3 = random_grid(axes, 10, 43);
  CHECK(r1 == r2);
  CHECK(r1 != r3);
  for (const auto& p : r1) {
    CHECK(p[0] >= 0.0);
    CHECK(p[0] <= 1.0);
  }
}

TEST_CASE("Harvey-Lawson tori") {
  const SamplePoint s0 = hl_sample(3, {0.0, 0.0}, 0.0, 1.0, {0.0, 0.0});
  CHECK(std::abs((s0.point(0) * s0.point(1) * s0.point(2)).imag()) < 1e-15);
  CHECK(std::abs(std::abs(s0.point(2)) - 1.0) < 1e-15);

  const FamilySpec spec = FamilySpec::hl_torus(3, {1.0, 1.0}, 1.0);
  const SamplePoint s1 = hl_sample(3, {1.0, 1.0}, 1.0, 1.0, {0.2, 0.9});
  CHECK(implicit_residual(spec, s1.point).cwiseAbs().maxCoeff() < 1e-12);

  // m = 4 uses Re of the product.
  const FamilySpec spec4 = FamilySpec::hl_torus(4, {1.0, 1.0, 0.0}, 0.5);
  const SamplePoint s4 = hl_sample(4, {1.0, 1.0, 0.0}, 0.5, 0.9, {0.1, 0.2, 0.3});
  CHECK(implicit_residual(spec4, s4.point).cwiseAbs().maxCoeff() < 1e-12);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ph(0.0, 2 * pi), rh(0.8, 2.0);
  for (int i = 0; i < 20; ++i) {
    const SamplePoint sp = hl_sample(3, {1.0, 0.5}, 0.3, rh(rng), {ph(rng), ph(rng)});
    CHECK(sl_check(sp.frame, Phase::one()).worst() < 1e-6);
  }
  CHECK_THROWS_AS(hl_sample(3, {1.0, 1.0}, 5.0, 0.5, {0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(hl_sample(3, {-2.0, 1.0}, 0.0, 1.0, {0.0, 0.0}), DomainError);

  // The defining quadratics are -2 times the diagonal moment values.
  const Family f = make_family(FamilySpec::hl_torus(3, {1.0, 0.5}, 0.3));
  const auto mu = moment_value(f.moment, s1.point);
  CHECK(std::abs(f.level_factors[0] * moment_value(f.moment, f.map(f.grid[0]))[0] - 1.0) < 1e-12);
  CHECK(mu.size() == 2);
}

TEST_CASE("SO(m) cones") {
  const ComplexPoint z = so_cone_sample(3, 1.0, pi / 6, {1.0, 0.0, 0.0});
  CHECK(std::abs(z(0) - std::polar(1.0, pi / 6)) < 1e-15);
  CHECK(std::abs(std::pow(z(0), 3).imag() - 1.0) < 1e-14);
  for (double c : {1e-2, 1e-4, 1e-8}) {
    CHECK(std::abs(so_cone_sample(3, c, 0.3, {0.0, 1.0, 0.0})(1)) < 2 * std::cbrt(c));
  }
  const std::vector<double> x{0.6, 0.0, 0.8};
  for (double th : {0.1, 0.4, 0.9}) {
    const cplx lam = so_cone_sample(3, 2.0, th, x)(0) / 0.6;
    CHECK(std::abs(std::pow(lam, 3).imag() - 2.0) < 1e-12);
  }
  CHECK_THROWS_AS(so_cone_sample(3, 1.0, 1.2, x), DomainError);
  CHECK_THROWS_AS(so_cone_sample(3, 1.0, 0.3, {1.0, 1.0, 0.0}), DomainError);

  // The curve lambda(theta) is an orbit of d lambda/dt = conj(lambda)^2.
  const auto lam = [](double th) { return std::polar(std::cbrt(1.0 / std::sin(3 * th)), th); };
  for (double th : {0.2, 0.5, 0.8}) {
    const cplx tangent(oracle::derivative([&](double s) { return lam(s).real(); }, th, 1e-4),
                       oracle::derivative([&](double s) { return lam(s).imag(); }, th, 1e-4));
    const cplx field = std::pow(std::conj(lam(th)), 2);
    CHECK(std::abs((tangent * std::conj(field)).imag()) < 1e-8 * std::abs(tangent) * std::abs(field));
  }
}

TEST_CASE("asymptotically conical from cones") {
  const ConeLink sphere = sphere_link(3);
  const std::vector<double> p{0.7, 1.9};
  const ComplexPoint x = sphere.map(p);
  CHECK(std::abs(x.norm() - 1.0) < 1e-14);
  for (double c : {0.5, 1.0, 2.0}) {
    const ComplexPoint z = ac_from_cone(sphere, c, 0.4, p);
    const ComplexPoint w = so_cone_sample(3, std::pow(c, 3), 0.4, as_vec(x));
    CHECK((z - w).norm() < 1e-13);
  }
  CHECK(ac_from_cone(sphere, 1.0, 1e-6, p).norm() > 50.0);
  CHECK_THROWS_AS(ac_from_cone(sphere, 1.0, pi / 3, p), DomainError);
  CHECK_THROWS_AS(ac_from_cone(sphere, -1.0, 0.3, p), DomainError);

  const Family f = make_family(FamilySpec::ac_from_cone(case_a_link(CoeffVector({-2, 1, 1})), 1.0));
  CHECK(worst_calibration(f) < 1e-6);
}

TEST_CASE("case A cones") {
  const CoeffVector a = CoeffVector::from_ints({-3, 1, 2});
  const ComplexPoint one = case_a_sample(a, 0.0, {0, 0, 0}, 1.0);
  CHECK((one - ComplexPoint::Ones(3)).norm() < 1e-15);
  CHECK(std::abs(case_a_sample(a, -0.5, {0, 0, 0}, 1.0)(2)) < 1e-15);
  CHECK(std::abs(case_a_sample(a, 1.0 / 3.0, {0, 0, 0}, 1.0)(0)) < 1e-7);
  CHECK_THROWS_AS(case_a_sample(a, 0.0, {0.1, 0, 0}, 1.0), DomainError);
  CHECK_THROWS_AS(case_a_sample(a, 0.5, {0, 0, 0}, 1.0), DomainError);

  const Eigen::MatrixXd N = orbit_basis(a.values());
  CHECK(N.cols() == 1);
  const Eigen::VectorXd al = N.col(0) * 0.7;
  const std::vector<double> angles(al.data(), al.data() + 3);
  const ComplexPoint z = case_a_sample(a, 0.1, angles, 1.3);
  const ComplexPoint flipped = case_a_sample(a, 0.1, angles, 1.3, -1, 1);
  CHECK(std::abs(flipped(0) + z(0)) < 1e-15);
  CHECK(std::abs(flipped(2) - z(2)) < 1e-15);

  for (const FamilySpec& spec : {FamilySpec::case_a(a), FamilySpec::case_a(CoeffVector({-3, -1, 1, 3}), -1, 1)}) {
    const Family f = make_family(spec);
    CHECK(std::abs(f.spec.phase.theta() - Phase::i_pow(spec.m - 2).theta()) < 1e-15);
    CHECK(worst_calibration(f) < 1e-6);
    CHECK(worst_moment(f) < 1e-9);
  }
}

TEST_CASE("case B") {
  const ComplexPoint z = case_b_sample(3, 2.0, {pi / 2, 0.0, 0.0});
  CHECK(std::abs(z(0) - 2.0 * I) < 1e-15);
  CHECK(std::abs(z(1) - 2.0) < 1e-15);
  CHECK(std::abs(z(2) - 2.0) < 1e-15);
  CHECK_THROWS_AS(case_b_sample(3, 1.0, {0.0, 0.0, 0.0}), DomainError);
  for (int m : {3, 4, 5}) {
    const Family f = make_family(FamilySpec::case_b(m));
    CHECK(worst_calibration(f) < 1e-8);
  }
}

TEST_CASE("torus cones") {
  const CoeffVector a = CoeffVector::from_ints({-3, 1, 2});
  const TorusSolution sol = find_rational_A(a, Rational(13, 5)).solutions.front();
  const double span = static_cast<double>(sol.b_mult) * sol.T;
  const SamplePoint p0 = torus_cone_sample(a, sol, 1.0, 0.0, {0.3});
  const SamplePoint p1 = torus_cone_sample(a, sol, 1.0, span, {0.3});
  // Same orbit: equal moduli and equal orbit invariants arg(prod z) and arg(prod z^a).
  for (int j = 0; j < 3; ++j) CHECK(std::abs(std::abs(p0.point(j)) - std::abs(p1.point(j))) < 1e-6);
  const auto invariants = [&](const ComplexPoint& z) {
    cplx p = 1.0, q = 1.0;
    for (int j = 0; j < 3; ++j) {
      p *= z(j);
      q *= a[j] > 0 ? std::pow(z(j), static_cast<int>(a[j])) : std::pow(std::conj(z(j)), static_cast<int>(-a[j]));
    }
    return std::pair{p / std::abs(p), q / std::abs(q)};
  };
  const auto [u0, v0] = invariants(p0.point);
  const auto [u1, v1] = invariants(p1.point);
  CHECK(std::abs(u0 - u1) < 1e-6);
  CHECK(std::abs(v0 - v1) < 1e-6);
  // Half-way round the orbit is elsewhere.
  const SamplePoint ph = torus_cone_sample(a, sol, 1.0, 0.5 * sol.T, {0.3});
  CHECK((ph.point - p0.point).norm() > 1e-2);

  const Family f = make_family(FamilySpec::torus_cone(a, sol));
  CHECK(std::abs(f.spec.phase.theta() - pi / 2) < 1e-15);
  CHECK(worst_calibration(f) < 1e-8);
  CHECK(worst_moment(f) < 1e-9);
}

TEST_CASE("explicit m = 3 torus cone") {
  const SamplePoint s0 = explicit_m3_sample(-3, 2, 1, 1.0, 0.4, 0.0);
  CHECK(std::abs(s0.point(2)) == 0.0);
  const Family f = make_family(FamilySpec::explicit_m3(-3, 2, 1));
  for (const auto& p : f.grid) CHECK(std::abs(f.map(p).norm() - p[0]) < 1e-12);
  CHECK(worst_calibration(f) < 1e-8);
  CHECK(worst_moment(f) < 1e-9);
  CHECK_THROWS_AS(explicit_m3_sample(1, 2, -3, 1.0, 0.0, 0.0), DomainError);

  // The analytic frame matches differencing the map.
  const PointMap map = [](std::span<const double> p) { return explicit_m3_sample(-3, 2, 1, p[0], p[1], p[2]).point; };
  const SamplePoint sp = explicit_m3_sample(-3, 2, 1, 1.2, 0.3, 0.8);
  CHECK((finite_diff_frame(map, sp.params).vectors - sp.frame.vectors).norm() < 1e-8);
}

TEST_CASE("cones are dilation invariant") {
  for (double t : {0.1, 0.9}) {
    const SamplePoint s1 = explicit_m3_sample(-5, 4, 1, 1.0, 0.7, t);
    const SamplePoint s2 = explicit_m3_sample(-5, 4, 1, 2.0, 0.7, t);
    CHECK((s2.point - 2.0 * s1.point).norm() < 1e-14);
    CHECK(std::abs(sl_check(s1.frame, Phase::i()).worst() - sl_check(s2.frame, Phase::i()).worst()) < 1e-12);
  }
  const CoeffVector a = CoeffVector::from_ints({-3, 1, 2});
  const TorusSolution sol = find_rational_A(a, Rational(13, 5)).solutions.front();
  const SamplePoint t1 = torus_cone_sample(a, sol, 1.0, 0.4, {0.2});
  const SamplePoint t2 = torus_cone_sample(a, sol, 2.0, 0.4, {0.2});
  CHECK((t2.point - 2.0 * t1.point).norm() < 1e-14);
  CHECK(sl_check(t2.frame, Phase::i()).worst() < 1e-8);
  const ComplexPoint c1 = case_a_sample(a, 0.1, {0, 0, 0}, 1.0), c2 = case_a_sample(a, 0.1, {0, 0, 0}, 2.0);
  CHECK((c2 - 2.0 * c1).norm() < 1e-15);
}

TEST_CASE("conformality of the explicit map") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-5.0, 5.0);
  for (int i = 0; i < 50; ++i) {
    const double s = U(rng), t = U(rng);
    const ConformalResidual r = conformal_residual(-3, 2, 1, s, t);
    CHECK(std::abs(r.inner) < 1e-10);
    CHECK(std::abs(r.norm_gap) < 1e-10);
    const ConformalResidual shifted = conformal_residual(-3, 2, 1, s + 1.7, t);
    CHECK(std::abs(shifted.inner - r.inner) < 1e-12);
    CHECK(std::abs(shifted.norm_gap - r.norm_gap) < 1e-12);
  }
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    worst = std::max(worst, std::abs(conformal_residual(-3, 2, 1, U(rng), U(rng), 1.1).norm_gap));
  }
  CHECK(worst > 1e-3);
}

TEST_CASE("special (-1, 0, ..., 0, 1) cones") {
  const std::vector<double> zeros{0.0, 0.0, 0.0};
  for (double t : {0.0, 0.5, 2.0}) {
    const ComplexPoint z = special_pm1_sample(1.0, 0.0, 3, 1.0, t, zeros);
    CHECK(std::abs(z(0) - std::polar(1.0, t)) < 1e-15);
    CHECK(std::abs(z(1) - 1.0) < 1e-15);
    CHECK(std::abs(z(2) - I * std::polar(1.0, -t)) < 1e-15);
  }
  // Im(w_1 w_m) is conserved; for these solutions it equals |B|^2 - |C|^2.
  const cplx B = std::polar(std::cos(0.4), 0.3), C = std::polar(std::sin(0.4), -1.1);
  for (double t = 0.0; t < 6.0; t += 0.25) {
    const ComplexPoint z = special_pm1_sample(B, C, 4, 1.0, t, {0.0, 0.0, 0.0, 0.0});
    CHECK(std::abs(std::norm(z(0)) + std::norm(z(3)) - 2.0) < 1e-14);
    CHECK(std::abs((z(0) * z(1) * z(2) * z(3)).imag() - (std::norm(B) - std::norm(C))) < 1e-14);
  }
  CHECK_THROWS_AS(special_pm1_sample(1.0, 1.0, 3, 1.0, 0.0, zeros), DomainError);
  CHECK_THROWS_AS(special_pm1_sample(1.0, 0.0, 3, 1.0, 0.0, {0.1, 0.0, 0.0}), DomainError);

  const Family f = make_family(FamilySpec::special_pm1(3, std::cos(0.4), cplx(0.0, std::sin(0.4))));
  CHECK(worst_calibration(f) < 1e-8);
  const Family f4 = make_family(FamilySpec::special_pm1(4, B, C));
  CHECK(std::abs(f4.spec.phase.unit() + 1.0) < 1e-15);
  CHECK(worst_calibration(f4) < 1e-8);
}

TEST_CASE("implicit residuals") {
  // Marshall seed (z1, 0, 0, z4), |z1| = |z4|, Im(9/2 z1^2 z4^2) = d.
  const double d = 0.5, rho = 0.8;
  const double phi = 0.5 * std::asin(2 * d / (9 * std::pow(rho, 4)));
  ComplexPoint seed = ComplexPoint::Zero(4);
  seed(0) = std::polar(rho, 0.3);
  seed(3) = std::polar(rho, phi - 0.3);
  CHECK(std::abs((4.5 * seed(0) * seed(0) * seed(3) * seed(3)).imag() - d) < 1e-14);
  CHECK(implicit_residual(FamilySpec::marshall(d), seed).cwiseAbs().maxCoeff() < 1e-12);

  const CoeffVector a({1, 2, -3});
  const FamilySpec q = FamilySpec::quadric(a, 1.0, 1);
  const double x1 = 0.4, x3 = 0.3;
  const double x2 = std::sqrt((1.0 - x1 * x1 + 3 * x3 * x3) / 2.0);
  CHECK(implicit_residual(q, quadric_sample(a, 1.0, 0.7, {x1, x2, x3})).cwiseAbs().maxCoeff() < 1e-14);

  std::mt19937_64 rng(2);
  for (const FamilySpec& spec : {FamilySpec::marshall(d), q, FamilySpec::helicoid(),
                                 FamilySpec::product(0.5, 0.3, 0.2), FamilySpec::hl_torus(3, {1.0, 0.5}, 0.3)}) {
    const ComplexPoint z = oracle::random_cvector(rng, spec.m);
    CHECK(implicit_residual(spec, z).cwiseAbs().maxCoeff() > 1e-3);
    CHECK(has_implicit_form(spec.kind));
  }
  CHECK(!has_implicit_form(FamilyKind::CASE_B));
  CHECK_THROWS_AS(implicit_residual(FamilySpec::case_b(3), ComplexPoint::Ones(3)), DomainError);
  CHECK_THROWS_AS(implicit_residual(q, ComplexPoint::Ones(4)), DomainError);

  // Sampled points of implicit families satisfy their equations.
  for (const FamilySpec& spec : catalog()) {
    if (!has_implicit_form(spec.kind)) continue;
    const Family f = make_family(spec);
    double worst = 0.0;
    for (const auto& p : f.grid) worst = std::max(worst, implicit_residual(spec, f.map(p)).cwiseAbs().maxCoeff());
    CHECK_MESSAGE(worst < 1e-10, f.name);
  }
}

TEST_CASE("quadric cones and their identification") {
  const CoeffVector a({1, 2, -3});
  const std::vector<double> x{0.4, std::sqrt((1.0 - 0.16 + 0.27) / 2.0), 0.3};
  const ComplexPoint z0 = quadric_sample(a, 1.0, 0.0, x);
  for (int j = 0; j < 3; ++j) {
    CHECK(z0(j).imag() == 0.0);
    CHECK(z0(j).real() == x[j]);
  }
  for (double th : {0.0, 0.3, 2.0}) CHECK(quadric_identification_gap(a, 1.0, th, x) < 1e-14);
  CHECK_THROWS_AS(quadric_sample(a, 1.0, 0.0, {1.0, 1.0, 1.0}), DomainError);
  const Family f = make_family(FamilySpec::quadric(a, 1.0, 1));
  CHECK(worst_calibration(f) < 1e-6);
  CHECK(worst_moment(f) < 1e-9);
}

TEST_CASE("helicoid") {
  const ComplexPoint axis = helicoid_sample(1.3, 0.0, 0.0);
  CHECK(std::abs(axis(0)) == 0.0);
  CHECK(std::abs(axis(1)) == 0.0);
  CHECK(axis(2) == cplx(0.0, 1.3));
  const ComplexPoint real = helicoid_sample(0.0, 0.5, 1.5);
  for (int j = 0; j < 3; ++j) CHECK(real(j).imag() == 0.0);
  CHECK(std::abs(real(0).real() * real(0).real() - real(1).real() * real(1).real() + 2 * real(2).real()) < 1e-15);
  CHECK(implicit_residual(FamilySpec::helicoid(), helicoid_sample(0.7, -0.4, 1.1)).cwiseAbs().maxCoeff() < 1e-14);
  const Family f = make_family(FamilySpec::helicoid());
  CHECK(worst_calibration(f) < 1e-6);
  CHECK(worst_moment(f) < 1e-9);
}

TEST_CASE("perpendicular C^4 family") {
  const ConeLink link = sphere_link(3);
  const std::vector<double> p{0.9, 0.4};
  const ComplexPoint z = perp4_sample(link, 0.0, 0.0, 1.0, p);
  CHECK((z.head(3) - link.map(p)).norm() < 1e-15);
  CHECK(z(3) == 0.0);
  for (double th : {0.1, 0.7}) {
    for (double x4 : {-0.5, 0.3, 1.2}) {
      const ComplexPoint w = perp4_sample(link, th, x4, 1.0, p);
      CHECK(std::abs(w.head(3).squaredNorm() - 3 * std::norm(w(3)) - 1.0) < 1e-13);
    }
  }
  CHECK_THROWS_AS(perp4_sample(link, 0.0, 0.1, -1.0, p), DomainError);
  CHECK_THROWS_AS(perp4_sample(sphere_link(4), 0.0, 0.1, 1.0, std::vector<double>{0.1, 0.2, 0.3}), DomainError);
  const Family f = make_family(FamilySpec::perp4(link, 1.0));
  CHECK(std::abs(f.spec.phase.theta() - pi / 2) < 1e-15);
  CHECK(worst_calibration(f) < 1e-6);
  CHECK(worst_moment(f) < 1e-9);
  const Family g = make_family(FamilySpec::perp4(explicit_m3_link(-3, 2, 1), 1.0));
  CHECK(std::abs(g.spec.phase.unit() + 1.0) < 1e-15);
  CHECK(worst_calibration(g) < 1e-6);
}

TEST_CASE("orbit coordinates") {
  const std::vector<double> a{-3, -1, 1, 3};
  const Eigen::MatrixXd N = orbit_basis(a);
  CHECK(N.rows() == 4);
  CHECK(N.cols() == 2);
  CHECK((N.transpose() * N - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-14);
  const Eigen::Map<const Eigen::VectorXd> av(a.data(), 4);
  CHECK((N.transpose() * Eigen::VectorXd::Ones(4)).norm() < 1e-14);
  CHECK((N.transpose() * av).norm() < 1e-14);
  const Eigen::VectorXd p = orbit_particular(a, 0.7, -1.3);
  CHECK(std::abs(p.sum() - 0.7) < 1e-14);
  CHECK(std::abs(av.dot(p) + 1.3) < 1e-14);
  CHECK((N.transpose() * p).norm() < 1e-14);
}

TEST_CASE("Marshall generators") {
  const auto gens = marshall_generators();
  REQUIRE(gens.size() == 3);
  for (const Generator& g : gens) {
    CHECK((g.X + g.X.adjoint()).norm() < 1e-15);
    CHECK(std::abs(g.X.trace()) < 1e-15);
  }
  // They span su(2): [X1, X2] is a multiple of X3 and so on.
  const CMatrix c12 = gens[0].X * gens[1].X - gens[1].X * gens[0].X;
  const cplx k = c12(0, 1) / gens[2].X(0, 1);
  CHECK((c12 - k * gens[2].X).norm() < 1e-12);

  // Each generator is tangent to the family: the residual does not change
  // to first order along z -> X z.
  const FamilySpec spec = FamilySpec::marshall(0.5);
  const Family f = make_family(spec);
  const auto res = [&](const ComplexPoint& z) { return implicit_residual(spec, z); };
  for (std::size_t i = 0; i < f.grid.size(); i += 7) {
    const ComplexPoint z = f.map(f.grid[i]);
    const Eigen::MatrixXd J = residual_jacobian(res, z);
    for (const Generator& g : gens) CHECK((J * to_real(g.X * z)).norm() < 1e-6);
  }
  CHECK(worst_calibration(f) < 1e-6);
  CHECK(worst_moment(f) < 1e-9);
}

TEST_CASE("product family") {
  const Family f = make_family(FamilySpec::product(0.5, 0.3, 0.2));
  CHECK(worst_calibration(f) < 1e-6);
  CHECK(worst_moment(f) < 1e-9);
}

TEST_CASE("null-space frames") {
  const FamilySpec spec = FamilySpec::hl_torus(3, {1.0, 0.5}, 0.3);
  const SamplePoint sp = hl_sample(3, {1.0, 0.5}, 0.3, 1.1, {0.4, 2.0});
  const TangentFrame F =
      null_space_frame([&](const ComplexPoint& z) { return implicit_residual(spec, z); }, sp.point, 3);
  CHECK(sl_check(F, Phase::one()).worst() < 1e-6);
  CHECK_THROWS_AS(null_space_frame([&](const ComplexPoint& z) { return implicit_residual(spec, z); },
                                   sp.point, 2),
                  NumericalError);
}
