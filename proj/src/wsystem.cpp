#include "slgeo/wsystem.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "slgeo/error.hpp"

namespace slgeo {

namespace {

bool is_integer(double x) { return std::isfinite(x) && x == std::nearbyint(x); }

long hcf_of(const std::vector<double>& a) {
  long g = 0;
  for (double v : a) g = std::gcd(g, std::labs(static_cast<long>(v)));
  return g;
}

ode::State pack(const WState& s) {
  const auto m = static_cast<std::size_t>(s.w.size());
  ode::State x(2 * m + 1);
  for (std::size_t j = 0; j < m; ++j) {
    x[2 * j] = s.w(static_cast<Eigen::Index>(j)).real();
    x[2 * j + 1] = s.w(static_cast<Eigen::Index>(j)).imag();
  }
  x[2 * m] = s.u;
  return x;
}

WState unpack(const ode::State& x) {
  const std::size_t m = (x.size() - 1) / 2;
  WState s;
  s.w.resize(static_cast<Eigen::Index>(m));
  for (std::size_t j = 0; j < m; ++j) s.w(static_cast<Eigen::Index>(j)) = cplx(x[2 * j], x[2 * j + 1]);
  s.u = x[2 * m];
  return s;
}

double constraint_residual(const CoeffVector& a, const WState& s) {
  double r = 0.0;
  for (int j = 0; j < a.m(); ++j) r = std::max(r, std::abs(std::norm(s.w(j)) - a[j] * s.u - 1.0));
  return r;
}

void require_dim(const CoeffVector& a, const CVector& w) {
  if (w.size() != a.m()) {
    throw DomainError("w has " + std::to_string(w.size()) + " entries, weights have " +
                      std::to_string(a.m()));
  }
}

}  // namespace

CoeffVector::CoeffVector(std::vector<double> a) : a_(std::move(a)) {
  if (a_.size() < 3) throw DomainError("need at least 3 weights");
  double scale = 0.0;
  double sum = 0.0;
  for (double v : a_) {
    if (!std::isfinite(v)) throw DomainError("weights must be finite");
    scale = std::max(scale, std::abs(v));
    sum += v;
  }
  if (scale == 0.0) throw DomainError("weights are all zero");
  if (std::abs(sum) > 1e-12 * std::max(1.0, scale)) {
    throw DomainError("weights must sum to zero, sum = " + std::to_string(sum));
  }
  integral_ = std::all_of(a_.begin(), a_.end(), is_integer) && hcf_of(a_) == 1;
}

CoeffVector CoeffVector::from_ints(const std::vector<long>& a) {
  std::vector<double> d(a.begin(), a.end());
  CoeffVector c(std::move(d));
  if (!c.integral_) throw DomainError("integer weights must have highest common factor 1");
  return c;
}

CoeffVector CoeffVector::parse(const std::string& text) {
  std::vector<double> a;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) throw DomainError("empty weight in '" + text + "'");
    const char* b = item.data() + first;
    const char* e = item.data() + last + 1;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e) throw DomainError("bad weight '" + item + "'");
    a.push_back(v);
  }
  return CoeffVector(std::move(a));
}

double CoeffVector::amin() const { return *std::min_element(a_.begin(), a_.end()); }
double CoeffVector::amax() const { return *std::max_element(a_.begin(), a_.end()); }

double CoeffVector::sum_squares() const {
  return std::inner_product(a_.begin(), a_.end(), a_.begin(), 0.0);
}

bool CoeffVector::is_degenerate_pm1() const {
  int neg = 0, pos = 0;
  for (double v : a_) {
    if (v == -1.0) ++neg;
    else if (v == 1.0) ++pos;
    else if (v != 0.0) return false;
  }
  return neg == 1 && pos == 1;
}

std::string CoeffVector::to_string() const {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t j = 0; j < a_.size(); ++j) os << (j ? "," : "") << a_[j];
  return os.str();
}

cplx product(const CVector& w) {
  cplx p(1.0, 0.0);
  for (Eigen::Index j = 0; j < w.size(); ++j) p *= w(j);
  return p;
}

CVector rhs_w(const CoeffVector& a, const CVector& w) {
  require_dim(a, w);
  const Eigen::Index m = w.size();
  CVector prefix(m + 1), suffix(m + 1);
  prefix(0) = 1.0;
  suffix(m) = 1.0;
  for (Eigen::Index j = 0; j < m; ++j) prefix(j + 1) = prefix(j) * w(j);
  for (Eigen::Index j = m; j > 0; --j) suffix(j - 1) = suffix(j) * w(j - 1);
  CVector out(m);
  for (Eigen::Index j = 0; j < m; ++j) out(j) = a[static_cast<int>(j)] * std::conj(prefix(j) * suffix(j + 1));
  return out;
}

WTrajectory integrate_w(const CoeffVector& a, const WState& w0, double t0, double t1,
                        const IntegrateOptions& opts) {
  require_dim(a, w0.w);
  const double r0 = constraint_residual(a, w0);
  if (r0 > 1e-10) {
    throw DomainError("initial state violates |w_j|^2 = a_j u + 1 by " + std::to_string(r0));
  }
  const int m = a.m();
  ode::Rhs f = [&a, m](const ode::State& x, ode::State& dx, double) {
    CVector w(m);
    for (int j = 0; j < m; ++j) w(j) = cplx(x[2 * j], x[2 * j + 1]);
    const CVector d = rhs_w(a, w);
    for (int j = 0; j < m; ++j) {
      dx[2 * j] = d(j).real();
      dx[2 * j + 1] = d(j).imag();
    }
    dx[2 * m] = 2.0 * product(w).real();
  };

  const std::vector<double> times =
      opts.times.empty() ? ode::linspace(t0, t1, opts.samples) : opts.times;
  WTrajectory traj;
  traj.times.reserve(times.size());
  traj.states.reserve(times.size());
  auto out = [&](double t, const ode::State& x) {
    traj.times.push_back(t);
    traj.states.push_back(unpack(x));
  };
  const double limit = opts.drift_factor * opts.tol;
  auto monitor = [&](const ode::StepView& step) {
    const double r = constraint_residual(a, unpack(step.x_new()));
    if (r > limit) {
      throw NumericalError("integrate_w: constraint drift " + std::to_string(r) + " at t = " +
                           std::to_string(step.t_new()));
    }
  };
  ode::Options o;
  o.atol = opts.tol;
  o.rtol = opts.tol;
  traj.step_stats = ode::integrate(f, pack(w0), t0, t1, times, out, o, monitor);
  return traj;
}

InvariantReport invariants_w(const CoeffVector& a, const WState& s, std::optional<double> A) {
  require_dim(a, s.w);
  const int m = a.m();
  InvariantReport rep;
  const double am = a[m - 1];
  const double wm2 = std::norm(s.w(m - 1));
  for (int j = 0; j + 1 < m; ++j) rep.conserved.pj.push_back(am * std::norm(s.w(j)) - a[j] * wm2);
  rep.conserved.pm = product(s.w).imag();
  rep.conserved.H = 2.0 * rep.conserved.pm;
  rep.constraint_residual = constraint_residual(a, s);
  if (A) rep.A_residual = std::abs(rep.conserved.pm - *A);
  return rep;
}

WState lift(const CoeffVector& a, double u, const std::vector<double>& thetas) {
  if (static_cast<int>(thetas.size()) != a.m()) throw DomainError("lift: need one angle per weight");
  WState s;
  s.u = u;
  s.w.resize(a.m());
  for (int j = 0; j < a.m(); ++j) {
    const double r2 = a[j] * u + 1.0;
    if (!(r2 > 0.0)) {
      throw DomainError("lift: a_j u + 1 = " + std::to_string(r2) + " is not positive at j = " +
                        std::to_string(j + 1));
    }
    s.w(j) = std::polar(std::sqrt(r2), thetas[static_cast<std::size_t>(j)]);
  }
  return s;
}

Projected project(const CoeffVector& a, const CVector& w, double tol) {
  require_dim(a, w);
  Projected p;
  double sum = 0.0;
  int count = 0;
  for (int j = 0; j < a.m(); ++j) {
    if (w(j) == cplx(0.0, 0.0)) throw DomainError("project: w_" + std::to_string(j + 1) + " = 0");
    if (a[j] != 0.0) {
      sum += (std::norm(w(j)) - 1.0) / a[j];
      ++count;
    }
    p.thetas.push_back(std::arg(w(j)));
  }
  p.u = sum / count;
  const double r = constraint_residual(a, WState{w, p.u});
  if (r > tol) {
    throw DomainError("project: moduli inconsistent with a single u (residual " +
                      std::to_string(r) + ")");
  }
  return p;
}

void unwrap(std::vector<double>& angles) {
  constexpr double two_pi = 2 * std::numbers::pi;
  for (std::size_t i = 1; i < angles.size(); ++i) {
    const double d = angles[i] - angles[i - 1];
    angles[i] -= two_pi * std::nearbyint(d / two_pi);
  }
}

double poisson_bracket(const CoeffVector& a, const PhaseFn& f, const PhaseFn& g,
                       const CVector& z, double h) {
  require_dim(a, z);
  double total = 0.0;
  CVector zz = z;
  auto partial = [&](const PhaseFn& fn, int j, cplx dir) {
    const cplx z0 = zz(j);
    zz(j) = z0 + h * dir;
    const double plus = fn(zz);
    zz(j) = z0 - h * dir;
    const double minus = fn(zz);
    zz(j) = z0;
    return (plus - minus) / (2 * h);
  };
  for (int j = 0; j < a.m(); ++j) {
    if (a[j] == 0.0) continue;
    const double fx = partial(f, j, 1.0), fy = partial(f, j, cplx(0, 1));
    const double gx = partial(g, j, 1.0), gy = partial(g, j, cplx(0, 1));
    total += a[j] * (fx * gy - fy * gx);
  }
  return total;
}

std::vector<PhaseFn> conserved_functions(const CoeffVector& a) {
  const int m = a.m();
  std::vector<PhaseFn> fns;
  for (int j = 0; j + 1 < m; ++j) {
    fns.push_back([a, j, m](const CVector& w) {
      return a[m - 1] * std::norm(w(j)) - a[j] * std::norm(w(m - 1));
    });
  }
  fns.push_back([](const CVector& w) { return product(w).imag(); });
  fns.push_back([](const CVector& w) { return 2.0 * product(w).imag(); });
  return fns;
}

Eigen::MatrixXd poisson_check(const CoeffVector& a, const CVector& z, double h,
                              const std::vector<int>& active) {
  require_dim(a, z);
  for (int j : active) {
    if (j < 0 || j >= a.m()) throw DomainError("poisson_check: active index out of range");
    if (a[j] == 0.0) {
      throw DomainError("poisson_check: zero weight at active coordinate " + std::to_string(j + 1));
    }
  }
  const auto fns = conserved_functions(a);
  const auto n = static_cast<Eigen::Index>(fns.size());
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      B(i, j) = poisson_bracket(a, fns[static_cast<std::size_t>(i)], fns[static_cast<std::size_t>(j)], z, h);
      B(j, i) = -B(i, j);
    }
  }
  return B;
}

}  // namespace slgeo
