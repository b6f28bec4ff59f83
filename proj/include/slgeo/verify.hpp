#pragma once

// Batch checks over sampled families and trajectories: calibration residuals,
// moment-map constancy, defining-equation residuals, orbit closure, and a
// Gauss-Newton projection onto implicitly defined families.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "slgeo/calibration.hpp"
#include "slgeo/families.hpp"
#include "slgeo/reduced.hpp"

namespace slgeo {

using ResidualFn = std::function<Eigen::VectorXd(const ComplexPoint&)>;

/// Real Jacobian (rows = equations, columns = interleaved real coordinates)
/// by central differences.
Eigen::MatrixXd residual_jacobian(const ResidualFn& f, const ComplexPoint& z, double h = 1e-6);

struct NewtonResult {
  ComplexPoint point;
  double residual = 0.0;  // max-norm at the returned point
  double moved = 0.0;     // |point - seed|
  int iterations = 0;
};

/// Gauss-Newton with least-norm steps.  Throws NumericalError when the
/// residual is not below `tol` after `max_iter` iterations.
NewtonResult newton_project(const ResidualFn& f, const ComplexPoint& seed, double tol = 1e-12,
                            int max_iter = 50);

struct VerifyJob {
  std::string id;
  FamilySpec spec;
  int grid_n = 0;                  // 0: family default
  int random = 0;                  // > 0: this many random points instead of the grid
  std::uint64_t seed = 1;
  std::optional<Phase> phase;      // override the family's declared phase
  std::optional<double> calib_tol; // default: by frame type
  double moment_tol = 1e-9;
  double implicit_tol = 1e-10;
};

struct VerifyReport {
  VerifyJob job;
  std::string family;
  CalibrationReport calibration;
  double calib_tol = 0.0;
  double moment_deviation = 0.0;   // max |mu - level| over the grid
  double implicit_residual = 0.0;  // max over the grid, when defined
  bool has_implicit = false;
  bool analytic_frames = false;
  int samples = 0;
  int skipped = 0;                 // singular or infeasible grid points
  std::vector<std::vector<double>> skipped_params;  // first few
  std::vector<double> worst_params;
  ComplexPoint worst_point;
  bool pass = false;

  nlohmann::json to_json() const;
};

VerifyReport verify_family(const VerifyJob& job);

/// Runs independent jobs in parallel; reports come back in job order.
std::vector<VerifyReport> verify_all(const std::vector<VerifyJob>& jobs);

struct ClosureReport {
  double t0 = 0.0;
  double period = 0.0;  // b_mult * T
  double u_gap = 0.0;
  double theta_gap = 0.0;  // |e^{i theta(t0 + bT)} - e^{i theta(t0)}|
  double psi_gap = 0.0;
  double tol = 0.0;
  bool pass = false;

  double worst() const;
  nlohmann::json to_json() const;
};

/// Starts the reduced system at the lower turning point (u = alpha, theta =
/// pi/2, psi = 0), runs to t0, then over b_mult periods, and compares the
/// orbit data.
ClosureReport closure_check(const CoeffVector& a, const TorusSolution& sol, double tol = 1e-6,
                            double t0 = 0.0);

}  // namespace slgeo
