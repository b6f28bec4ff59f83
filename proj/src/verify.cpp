#include "slgeo/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "slgeo/error.hpp"
#include "slgeo/parallel.hpp"

namespace slgeo {

Eigen::MatrixXd residual_jacobian(const ResidualFn& f, const ComplexPoint& z, double h) {
  const Eigen::VectorXd x0 = to_real(z);
  const Eigen::Index n = x0.size();
  Eigen::MatrixXd J;
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::VectorXd xp = x0, xm = x0;
    xp(k) += h;
    xm(k) -= h;
    const Eigen::VectorXd col = (f(from_real(xp)) - f(from_real(xm))) / (2 * h);
    if (k == 0) J.resize(col.size(), n);
    J.col(k) = col;
  }
  return J;
}

NewtonResult newton_project(const ResidualFn& f, const ComplexPoint& seed, double tol,
                            int max_iter) {
  NewtonResult res;
  res.point = seed;
  Eigen::VectorXd r = f(seed);
  const double start = r.cwiseAbs().maxCoeff();
  for (int it = 0;; ++it) {
    res.residual = r.cwiseAbs().maxCoeff();
    res.iterations = it;
    if (!std::isfinite(res.residual) || res.residual > 1e6 * std::max(1.0, start)) {
      throw NumericalError("newton_project: diverged after " + std::to_string(it) +
                           " iterations");
    }
    if (res.residual < tol) break;
    if (it == max_iter) {
      throw NumericalError("newton_project: residual " + std::to_string(res.residual) +
                           " after " + std::to_string(max_iter) + " iterations");
    }
    const Eigen::MatrixXd J = residual_jacobian(f, res.point);
    const Eigen::VectorXd dx = J.completeOrthogonalDecomposition().solve(-r);
    res.point += from_real(dx);
    r = f(res.point);
  }
  res.moved = (res.point - seed).norm();
  return res;
}

namespace {

struct PointResult {
  bool skipped = false;
  std::vector<double> params;
  ComplexPoint z;
  CalibrationReport calib;
  double moment = 0.0;
  double implicit = 0.0;
};

nlohmann::json point_json(const ComplexPoint& z) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index j = 0; j < z.size(); ++j) arr.push_back({z(j).real(), z(j).imag()});
  return arr;
}

}  // namespace

nlohmann::json VerifyReport::to_json() const {
  nlohmann::json j;
  j["job"] = {{"id", job.id},
              {"family", family},
              {"spec", job.spec.describe()},
              {"m", job.spec.m},
              {"phase", job.phase ? job.phase->theta() : job.spec.phase.theta()},
              {"grid_n", job.grid_n},
              {"random", job.random},
              {"seed", job.seed},
              {"calib_tol", calib_tol},
              {"moment_tol", job.moment_tol},
              {"implicit_tol", job.implicit_tol}};
  j["residuals"] = {{"omega", calibration.max_omega_residual},
                    {"imag_omega", calibration.max_imag_residual},
                    {"calibration_defect", calibration.calibration_defect},
                    {"moment", moment_deviation}};
  if (has_implicit) j["residuals"]["implicit"] = implicit_residual;
  j["frames"] = analytic_frames ? "analytic" : "finite-difference";
  j["samples"] = samples;
  j["skipped"] = skipped;
  if (!skipped_params.empty()) j["skipped_params"] = skipped_params;
  j["pass"] = pass;
  j["worst_point"] = {{"params", worst_params}, {"z", point_json(worst_point)}};
  return j;
}

VerifyReport verify_family(const VerifyJob& job) {
  Family fam = make_family(job.spec, job.grid_n);
  if (job.random > 0) fam.grid = random_grid(fam.axes, job.random, job.seed);
  const Phase phase = job.phase.value_or(job.spec.phase);
  VerifyReport rep;
  rep.job = job;
  rep.family = fam.name;
  rep.calib_tol = job.calib_tol.value_or(fam.tolerance());
  rep.has_implicit = fam.has_implicit;
  rep.analytic_frames = static_cast<bool>(fam.frame);

  std::vector<PointResult> results(fam.grid.size());
  parallel_for(fam.grid.size(), [&](std::size_t i) {
    PointResult& pr = results[i];
    pr.params = fam.grid[i];
    SamplePoint sp;
    try {
      sp = fam.sample(pr.params);
    } catch (const DomainError&) {
      pr.skipped = true;
      return;
    }
    pr.z = sp.point;
    pr.calib = sl_check(sp.frame, phase);
    const auto mu = moment_value(fam.moment, sp.point);
    for (std::size_t k = 0; k < mu.size(); ++k) {
      pr.moment = std::max(pr.moment, std::abs(mu[k] - fam.moment_level[k]));
    }
    if (fam.has_implicit) {
      pr.implicit = implicit_residual(fam.spec, sp.point).cwiseAbs().maxCoeff();
    }
  });

  double worst_score = -1.0;
  for (const PointResult& pr : results) {
    if (pr.skipped) {
      ++rep.skipped;
      if (rep.skipped_params.size() < 8) rep.skipped_params.push_back(pr.params);
      continue;
    }
    rep.calibration.merge(pr.calib);
    rep.moment_deviation = std::max(rep.moment_deviation, pr.moment);
    rep.implicit_residual = std::max(rep.implicit_residual, pr.implicit);
    const double score = std::max({pr.calib.worst() / rep.calib_tol, pr.moment / job.moment_tol,
                                   pr.implicit / job.implicit_tol});
    if (score > worst_score) {
      worst_score = score;
      rep.worst_params = pr.params;
      rep.worst_point = pr.z;
    }
    ++rep.samples;
  }
  rep.pass = rep.samples > 0 && rep.calibration.passes(rep.calib_tol) &&
             rep.moment_deviation < job.moment_tol &&
             (!rep.has_implicit || rep.implicit_residual < job.implicit_tol);
  return rep;
}

std::vector<VerifyReport> verify_all(const std::vector<VerifyJob>& jobs) {
  // Jobs run one after another; each parallelizes over its own grid.
  std::vector<VerifyReport> out;
  out.reserve(jobs.size());
  for (const VerifyJob& j : jobs) out.push_back(verify_family(j));
  return out;
}

double ClosureReport::worst() const { return std::max({u_gap, theta_gap, psi_gap}); }

nlohmann::json ClosureReport::to_json() const {
  return {{"t0", t0},           {"period", period},
          {"u_gap", u_gap},     {"theta_gap", theta_gap},
          {"psi_gap", psi_gap}, {"tol", tol},
          {"pass", pass}};
}

ClosureReport closure_check(const CoeffVector& a, const TorusSolution& sol, double tol,
                            double t0) {
  if (!(sol.A > 0 && sol.A < 1) || sol.T <= 0 || sol.b_mult < 1) {
    throw DomainError("closure_check: invalid torus solution");
  }
  if (t0 < 0) throw DomainError("closure_check: t0 must be non-negative");
  ClosureReport rep;
  rep.t0 = t0;
  rep.tol = tol;
  rep.period = static_cast<double>(sol.b_mult) * sol.T;
  ReducedOptions o;
  o.tol = 1e-12;
  ReducedState s0{sol.alpha, std::numbers::pi / 2, 0.0};
  if (t0 > 0) {
    o.times = {0.0, t0};
    s0 = integrate_reduced(a, s0, 0.0, t0, o).traj.states.back();
  }
  o.times = {t0, t0 + rep.period};
  const ReducedState s1 = integrate_reduced(a, s0, t0, t0 + rep.period, o).traj.states.back();
  auto circ = [](double x, double y) { return std::abs(std::polar(1.0, x) - std::polar(1.0, y)); };
  rep.u_gap = std::abs(s1.u - s0.u);
  rep.theta_gap = circ(s1.theta, s0.theta);
  rep.psi_gap = circ(s1.psi, s0.psi);
  rep.pass = rep.worst() < tol;
  return rep;
}

}  // namespace slgeo
