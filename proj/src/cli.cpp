#include "slgeo/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "slgeo/elliptic.hpp"
#include "slgeo/error.hpp"
#include "slgeo/families.hpp"
#include "slgeo/io.hpp"
#include "slgeo/parallel.hpp"
#include "slgeo/reduced.hpp"
#include "slgeo/verify.hpp"
#include "slgeo/wsystem.hpp"

namespace slgeo::cli {
namespace {

using nlohmann::json;

struct OptDef {
  std::string name;
  std::string help;
  bool flag = false;
};

struct CommandDef {
  std::string help;
  std::vector<OptDef> opts;
};

std::vector<OptDef> family_opts() {
  return {
      {"family", "family kind (see `catalog`), or `all` for every catalog entry"},
      {"m", "ambient dimension"},
      {"levels", "hl: a_1..a_{m-1}; product: a,b,c"},
      {"b", "hl: level of Im/Re(z_1...z_m)"},
      {"c", "level constant (so-cone, ac-cone, quadric, perp4)"},
      {"d", "marshall: level of the quartic"},
      {"a", "weights for case-a, torus-cone, quadric"},
      {"q", "torus-cone: rotation number p/q"},
      {"bvec", "explicit-m3: integers b1,b2,b3 with b2 > b3 > 0 > b1"},
      {"B", "special-pm1: complex B as re,im"},
      {"C", "special-pm1: complex C as re,im"},
      {"link", "ac-cone/perp4 link: sphere, case-a or explicit-m3"},
      {"link-a", "weights of a case-a link"},
      {"link-b", "b1,b2,b3 of an explicit-m3 link"},
      {"signs", "case-a: signs of the first and last coordinate, e.g. -1,1"},
      {"solve", "quadric: index of the coordinate solved from the others"},
      {"grid", "points per grid axis (default depends on the family)"},
      {"random", "use this many random parameter points instead of the grid"},
      {"seed", "seed for --random (default 1)"},
  };
}

const std::map<std::string, CommandDef>& command_table() {
  static const std::map<std::string, CommandDef> table = [] {
    std::map<std::string, CommandDef> t;
    t["psi"] = {"scan Psi(A) and T(A) on an equally spaced A grid (CSV or JSON)",
                {{"a", "weights, e.g. -3,1,2"},
                 {"grid", "number of A values (default 64)"},
                 {"A-lo", "smallest A (default 1e-3)"},
                 {"A-hi", "largest A (default 0.999)"}}};
    t["psi-limits"] = {"limits of Psi as A -> 0 and A -> 1", {{"a", "weights"}}};
    t["period"] = {"period T, rotation Psi and turning points at one A",
                   {{"a", "weights"}, {"A", "first integral in (0, 1)"}}};
    t["find-torus"] = {"solve Psi(A) = 2 pi q for A",
                       {{"a", "weights"},
                        {"q", "rational p/q"},
                        {"grid", "scan points (default 256)"},
                        {"tol", "root tolerance (default 1e-10)"},
                        {"closure", "also integrate over b periods and report the gap", true},
                        {"closure-tol", "closure tolerance (default 1e-6)"}}};
    t["integrate"] = {"integrate the reduced (u, theta, psi) or full w-system (CSV)",
                      {{"a", "weights"},
                       {"system", "reduced (default) or full"},
                       {"u0", "initial u (default 0)"},
                       {"theta0", "reduced: initial theta (default pi/2)"},
                       {"psi0", "reduced: initial psi (default 0)"},
                       {"A", "reduced: start at the lower turning point of this A"},
                       {"thetas", "full: initial arguments of w_1..w_m (default 0)"},
                       {"t1", "final time"},
                       {"samples", "output samples (default 101)"},
                       {"tol", "integrator tolerance (default 1e-10)"}}};
    t["closed-form"] = {"m = 3 closed forms: u(t) in sn^2 form, or the A = 0 dn/cn/sn solution",
                        {{"a", "weights (with --A)"},
                         {"A", "first integral in [0, 1)"},
                         {"bvec", "b1,b2,b3 for the A = 0 solution"},
                         {"shift", "argument shift c (default: u(0) = alpha)"},
                         {"t1", "final time (default one period)"},
                         {"samples", "output samples (default 101)"}}};
    auto verify_opts = family_opts();
    verify_opts.push_back({"phase", "override the phase angle (radians)"});
    verify_opts.push_back({"tol", "calibration tolerance (default by frame type)"});
    t["verify"] = {"check calibration, moment map and defining equations on a family grid",
                   verify_opts};
    t["sample"] = {"sample points of a family (CSV, JSON, or OBJ for 2-parameter C^3 links)",
                   family_opts()};
    t["catalog"] = {"list the family kinds", {}};
    for (auto& [name, def] : t) {
      def.opts.push_back({"out", "output file (default stdout)"});
      def.opts.push_back({"format", "csv, json or obj where supported"});
      def.opts.push_back({"threads", "worker threads (default: SLGEO_THREADS or all cores)"});
    }
    return t;
  }();
  return table;
}

std::string json_to_token(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return io::format_double(v.get<double>());
  if (v.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + json_to_token(v[i]);
    return s;
  }
  throw DomainError("config: unsupported value " + v.dump());
}

class Opts {
 public:
  explicit Opts(const json& j) : j_(j) {}

  bool has(const std::string& k) const { return j_.contains(k); }
  std::string str(const std::string& k) const {
    if (!has(k)) throw DomainError("missing option --" + k);
    return j_.at(k).get<std::string>();
  }
  std::string str(const std::string& k, const std::string& def) const {
    return has(k) ? str(k) : def;
  }
  double num(const std::string& k) const { return to_double(k, str(k)); }
  double num(const std::string& k, double def) const { return has(k) ? num(k) : def; }
  long integer(const std::string& k, long def) const {
    if (!has(k)) return def;
    const double x = num(k);
    if (x != std::floor(x)) throw DomainError("option --" + k + " must be an integer");
    return static_cast<long>(x);
  }
  std::vector<double> list(const std::string& k) const {
    std::vector<double> out;
    std::stringstream ss(str(k));
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(to_double(k, cell));
    return out;
  }
  bool flag(const std::string& k) const { return has(k) && str(k) == "true"; }

 private:
  static double to_double(const std::string& k, const std::string& s) {
    std::size_t pos = 0;
    double x = 0.0;
    try {
      x = std::stod(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != s.size()) {
      throw DomainError("option --" + k + ": '" + s + "' is not a number");
    }
    return x;
  }

  const json& j_;
};

cplx complex_opt(const Opts& o, const std::string& k, cplx def) {
  if (!o.has(k)) return def;
  const auto v = o.list(k);
  if (v.size() == 1) return {v[0], 0.0};
  if (v.size() == 2) return {v[0], v[1]};
  throw DomainError("option --" + k + " takes re or re,im");
}

std::vector<long> int_list(const Opts& o, const std::string& k) {
  std::vector<long> out;
  for (double x : o.list(k)) {
    if (x != std::floor(x)) throw DomainError("option --" + k + " needs integers");
    out.push_back(static_cast<long>(x));
  }
  return out;
}

ConeLink link_from(const Opts& o, int m_default) {
  const std::string name = o.str("link", "sphere");
  if (name == "sphere") return sphere_link(static_cast<int>(o.integer("m", m_default)));
  if (name == "case-a") return case_a_link(CoeffVector::parse(o.str("link-a")));
  if (name == "explicit-m3") {
    const auto b = int_list(o, "link-b");
    if (b.size() != 3) throw DomainError("--link-b needs three integers");
    return explicit_m3_link(b[0], b[1], b[2]);
  }
  throw DomainError("unknown link '" + name + "'");
}

FamilySpec spec_from(const Opts& o) {
  const FamilyKind kind = parse_kind(o.str("family"));
  auto m_opt = [&](int def) { return static_cast<int>(o.integer("m", def)); };
  switch (kind) {
    case FamilyKind::HL_TORUS: {
      const auto levels = o.list("levels");
      return FamilySpec::hl_torus(m_opt(static_cast<int>(levels.size()) + 1), levels, o.num("b"));
    }
    case FamilyKind::SO_CONE: return FamilySpec::so_cone(m_opt(3), o.num("c", 1.0));
    case FamilyKind::PRODUCT: {
      const auto l = o.list("levels");
      if (l.size() != 3) throw DomainError("product: --levels takes a,b,c");
      return FamilySpec::product(l[0], l[1], l[2]);
    }
    case FamilyKind::MARSHALL: return FamilySpec::marshall(o.num("d", 0.5));
    case FamilyKind::CASE_A_CONE: {
      std::vector<double> s{1, 1};
      if (o.has("signs")) s = o.list("signs");
      if (s.size() != 2) throw DomainError("--signs takes two entries");
      return FamilySpec::case_a(CoeffVector::parse(o.str("a")), static_cast<int>(s[0]),
                                static_cast<int>(s[1]));
    }
    case FamilyKind::CASE_B: return FamilySpec::case_b(m_opt(3));
    case FamilyKind::TORUS_CONE: {
      const CoeffVector a = CoeffVector::parse(o.str("a"));
      const auto found = find_rational_A(a, Rational::parse(o.str("q")));
      if (found.constant_psi) {
        throw DomainError("torus-cone: Psi is constant for these weights; use special-pm1");
      }
      return FamilySpec::torus_cone(a, found.solutions.front());
    }
    case FamilyKind::EXPLICIT_M3: {
      const auto b = int_list(o, "bvec");
      if (b.size() != 3) throw DomainError("--bvec needs three integers");
      return FamilySpec::explicit_m3(b[0], b[1], b[2]);
    }
    case FamilyKind::SPECIAL_PM1:
      return FamilySpec::special_pm1(m_opt(3), complex_opt(o, "B", 1.0), complex_opt(o, "C", 0.0));
    case FamilyKind::AC_FROM_CONE: return FamilySpec::ac_from_cone(link_from(o, 3), o.num("c", 1.0));
    case FamilyKind::QUADRIC: {
      const CoeffVector a = CoeffVector::parse(o.str("a"));
      const double c = o.num("c", 1.0);
      const auto& v = a.values();
      long solve = c >= 0 ? std::max_element(v.begin(), v.end()) - v.begin()
                          : std::min_element(v.begin(), v.end()) - v.begin();
      solve = o.integer("solve", solve);
      return FamilySpec::quadric(a, c, static_cast<int>(solve));
    }
    case FamilyKind::HELICOID: return FamilySpec::helicoid();
    case FamilyKind::PERP4: return FamilySpec::perp4(link_from(o, 3), o.num("c", 1.0));
  }
  throw DomainError("unhandled family");
}

json torus_json(const TorusSolution& s) {
  return {{"A", s.A},         {"T", s.T},         {"Psi", s.Psi},
          {"q", s.q.to_string()}, {"b_mult", s.b_mult}, {"alpha", s.alpha},
          {"beta", s.beta},   {"residual", s.residual}};
}

std::string header_line(const RunConfig& cfg) {
  json j = cfg.options;
  j.erase("out");
  j.erase("threads");
  return "slgeo " + cfg.command + " " + j.dump();
}

int cmd_psi(const RunConfig& cfg, const Opts& o, std::ostream& os) {
  const CoeffVector a = CoeffVector::parse(o.str("a"));
  ScanOptions so;
  so.grid = static_cast<int>(o.integer("grid", 64));
  so.A_lo = o.num("A-lo", so.A_lo);
  so.A_hi = o.num("A-hi", so.A_hi);
  const auto samples = psi_scan(a, so);
  const auto [l0, l1] = psi_limits(a);
  const std::string fmt = o.str("format", "csv");
  if (fmt == "json") {
    json rows = json::array();
    for (const auto& s : samples) {
      rows.push_back({{"A", s.A}, {"Psi", s.Psi}, {"T", s.T}, {"alpha", s.alpha}, {"beta", s.beta}});
    }
    os << json{{"a", a.values()}, {"limit_A0", l0}, {"limit_A1", l1}, {"samples", rows}}.dump(2)
       << '\n';
    return kExitOk;
  }
  if (fmt != "csv") throw DomainError("psi: format must be csv or json");
  io::Table t;
  t.comments = {header_line(cfg), "psi_limit_A0 " + io::format_double(l0),
                "psi_limit_A1 " + io::format_double(l1)};
  t.columns = {"A", "Psi", "T", "alpha", "beta"};
  for (const auto& s : samples) t.rows.push_back({s.A, s.Psi, s.T, s.alpha, s.beta});
  io::write_csv(os, t);
  return kExitOk;
}

int cmd_psi_limits(const Opts& o, std::ostream& os) {
  const CoeffVector a = CoeffVector::parse(o.str("a"));
  const auto [l0, l1] = psi_limits(a);
  os << json{{"a", a.values()}, {"limit_A0", l0}, {"limit_A1", l1}}.dump(2) << '\n';
  return kExitOk;
}

int cmd_period(const Opts& o, std::ostream& os) {
  const CoeffVector a = CoeffVector::parse(o.str("a"));
  const double A = o.num("A");
  const TurningData td = turning_points(a, A);
  os << json{{"a", a.values()},          {"A", A},
             {"T", period_T(a, A)},      {"Psi", rotation_Psi(a, A)},
             {"alpha", td.alpha},        {"beta", td.beta}}
            .dump(2)
     << '\n';
  return kExitOk;
}

int cmd_find_torus(const Opts& o, std::ostream& os) {
  const CoeffVector a = CoeffVector::parse(o.str("a"));
  const Rational q = Rational::parse(o.str("q"));
  ScanOptions so;
  so.grid = static_cast<int>(o.integer("grid", so.grid));
  so.tol = o.num("tol", so.tol);
  const RationalSearch rs = find_rational_A(a, q, so);
  json j{{"a", a.values()}, {"q", q.to_string()}, {"constant_psi", rs.constant_psi}};
  json sols = json::array();
  bool ok = true;
  for (const auto& s : rs.solutions) {
    json js = torus_json(s);
    if (o.flag("closure") && !rs.constant_psi) {
      const ClosureReport cr = closure_check(a, s, o.num("closure-tol", 1e-6));
      js["closure"] = cr.to_json();
      ok = ok && cr.pass;
    }
    sols.push_back(js);
  }
  j["solutions"] = sols;
  os << j.dump(2) << '\n';
  return ok ? kExitOk : kExitVerifyFail;
}

int cmd_integrate(const RunConfig& cfg, const Opts& o, std::ostream& os) {
  const CoeffVector a = CoeffVector::parse(o.str("a"));
  const double t1 = o.num("t1");
  const int samples = static_cast<int>(o.integer("samples", 101));
  const double tol = o.num("tol", 1e-10);
  const std::string system = o.str("system", "reduced");
  io::Table t;
  t.comments.push_back(header_line(cfg));
  if (system == "reduced") {
    ReducedState s0{o.num("u0", 0.0), o.num("theta0", std::numbers::pi / 2), o.num("psi0", 0.0)};
    if (o.has("A")) s0 = {turning_points(a, o.num("A")).alpha, std::numbers::pi / 2, s0.psi};
    ReducedOptions ro;
    ro.tol = tol;
    ro.samples = samples;
    const ReducedResult r = integrate_reduced(a, s0, 0.0, t1, ro);
    t.comments.push_back("A " + io::format_double(compute_A(a, s0.u, s0.theta)));
    t.comments.push_back("max_A_drift " + io::format_double(r.max_A_drift));
    t.columns = {"t", "u", "theta", "psi"};
    for (std::size_t i = 0; i < r.traj.times.size(); ++i) {
      const auto& s = r.traj.states[i];
      t.rows.push_back({r.traj.times[i], s.u, s.theta, s.psi});
    }
  } else if (system == "full") {
    std::vector<double> thetas(static_cast<std::size_t>(a.m()), 0.0);
    if (o.has("thetas")) thetas = o.list("thetas");
    const WState w0 = lift(a, o.num("u0", 0.0), thetas);
    IntegrateOptions io_;
    io_.tol = tol;
    io_.samples = samples;
    const WTrajectory tr = integrate_w(a, w0, 0.0, t1, io_);
    double drift = 0.0;
    for (const auto& s : tr.states) drift = std::max(drift, invariants_w(a, s).constraint_residual);
    t.comments.push_back("max_constraint_residual " + io::format_double(drift));
    t.columns = {"t", "u"};
    for (int j = 1; j <= a.m(); ++j) {
      t.columns.push_back("re_w" + std::to_string(j));
      t.columns.push_back("im_w" + std::to_string(j));
    }
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      std::vector<double> row{tr.times[i], tr.states[i].u};
      for (int j = 0; j < a.m(); ++j) {
        row.push_back(tr.states[i].w(j).real());
        row.push_back(tr.states[i].w(j).imag());
      }
      t.rows.push_back(std::move(row));
    }
  } else {
    throw DomainError("integrate: --system must be reduced or full");
  }
  io::write_csv(os, t);
  return kExitOk;
}

int cmd_closed_form(const RunConfig& cfg, const Opts& o, std::ostream& os) {
  const int samples = static_cast<int>(o.integer("samples", 101));
  io::Table t;
  t.comments.push_back(header_line(cfg));
  if (o.has("bvec")) {
    const auto b = int_list(o, "bvec");
    if (b.size() != 3) throw DomainError("--bvec needs three integers");
    const ExplicitM3 d = explicit_m3_data(b[0], b[1], b[2]);
    const double t1 = o.num("t1", 4 * complete_K(d.k) / d.a_ell);
    t.comments.push_back("a_ell " + io::format_double(d.a_ell) + " k " + io::format_double(d.k));
    t.columns = {"t", "re_w1", "im_w1", "re_w2", "im_w2", "re_w3", "im_w3"};
    for (double s : ode::linspace(0.0, t1, samples)) {
      const CVector w = explicit_A0_m3(d, s);
      t.rows.push_back({s, w(0).real(), w(0).imag(), w(1).real(), w(1).imag(), w(2).real(),
                        w(2).imag()});
    }
  } else {
    const CoeffVector a = CoeffVector::parse(o.str("a"));
    const M3Data d = closed_form_m3_data(a, o.num("A"));
    const double c = o.num("shift", d.c_at_alpha);
    const double t1 = o.num("t1", d.period);
    t.comments.push_back("period " + io::format_double(d.period) + " k " +
                         io::format_double(d.k) + " a_ell " + io::format_double(d.a_ell));
    t.columns = {"t", "u"};
    for (double s : ode::linspace(0.0, t1, samples)) {
      t.rows.push_back({s, closed_form_u_m3(d, c, s)});
    }
  }
  io::write_csv(os, t);
  return kExitOk;
}

VerifyJob job_from(const Opts& o, FamilySpec spec) {
  VerifyJob job;
  job.spec = std::move(spec);
  job.id = job.spec.describe();
  job.grid_n = static_cast<int>(o.integer("grid", 0));
  job.random = static_cast<int>(o.integer("random", 0));
  job.seed = static_cast<std::uint64_t>(o.integer("seed", 1));
  if (o.has("phase")) job.phase = Phase(o.num("phase"));
  if (o.has("tol")) job.calib_tol = o.num("tol");
  return job;
}

int cmd_verify(const Opts& o, std::ostream& os) {
  std::vector<VerifyJob> jobs;
  if (o.str("family") == "all") {
    for (auto& s : catalog()) jobs.push_back(job_from(o, s));
  } else {
    jobs.push_back(job_from(o, spec_from(o)));
  }
  const auto reports = verify_all(jobs);
  bool ok = true;
  for (const auto& r : reports) ok = ok && r.pass;
  if (reports.size() == 1) {
    os << reports.front().to_json().dump(2) << '\n';
  } else {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(r.to_json());
    os << json{{"pass", ok}, {"reports", arr}}.dump(2) << '\n';
  }
  return ok ? kExitOk : kExitVerifyFail;
}

int cmd_sample(const RunConfig& cfg, const Opts& o, std::ostream& os) {
  const FamilySpec spec = spec_from(o);
  Family fam = make_family(spec, static_cast<int>(o.integer("grid", 0)));
  const long random = o.integer("random", 0);
  const auto seed = static_cast<std::uint64_t>(o.integer("seed", 1));
  if (random > 0) fam.grid = random_grid(fam.axes, static_cast<int>(random), seed);
  std::vector<ComplexPoint> pts(fam.grid.size());
  parallel_for(fam.grid.size(), [&](std::size_t i) { pts[i] = fam.map(fam.grid[i]); });
  std::vector<std::string> comments{header_line(cfg), "family " + spec.describe()};
  if (random > 0) comments.push_back("random " + std::to_string(random) + " seed " + std::to_string(seed));
  const std::string fmt = o.str("format", "csv");
  if (fmt == "csv") {
    io::Table t = io::point_table(fam.grid, pts);
    t.comments = comments;
    io::write_csv(os, t);
  } else if (fmt == "json") {
    json arr = json::array();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      json z = json::array();
      for (Eigen::Index j = 0; j < pts[i].size(); ++j) z.push_back({pts[i](j).real(), pts[i](j).imag()});
      arr.push_back({{"params", fam.grid[i]}, {"z", z}});
    }
    os << json{{"family", spec.describe()}, {"seed", seed}, {"points", arr}}.dump(2) << '\n';
  } else if (fmt == "obj") {
    int varying = 0;
    for (const auto& ax : fam.axes) varying += ax.lo != ax.hi;
    if (spec.m != 3 || varying != 2 || random > 0) {
      throw DomainError("obj output needs a C^3 family with two varying grid parameters");
    }
    io::Mesh mesh;
    const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(pts.size()))));
    mesh.nu = mesh.nv = n;
    mesh.points = pts;
    mesh.comments = comments;
    io::write_obj(os, mesh);
  } else {
    throw DomainError("sample: format must be csv, json or obj");
  }
  return kExitOk;
}

int cmd_catalog(const Opts& o, std::ostream& os) {
  const std::string fmt = o.str("format", "text");
  const auto specs = catalog();
  if (fmt == "json") {
    json kinds = json::array();
    for (FamilyKind k : all_kinds()) {
      kinds.push_back({{"kind", kind_name(k)}, {"summary", kind_summary(k)}});
    }
    json ex = json::array();
    for (const auto& s : specs) ex.push_back(s.describe());
    os << json{{"kinds", kinds}, {"examples", ex}}.dump(2) << '\n';
  } else {
    for (FamilyKind k : all_kinds()) os << kind_name(k) << "\t" << kind_summary(k) << '\n';
    os << "\nverified by `verify --family all`:\n";
    for (const auto& s : specs) os << "  " << s.describe() << '\n';
  }
  return kExitOk;
}

void error_record(std::ostream& err, const std::string& kind, const std::string& msg) {
  err << json{{"error", {{"kind", kind}, {"message", msg}}}}.dump() << '\n';
}

}  // namespace

std::vector<std::string> commands() {
  std::vector<std::string> out;
  for (const auto& [name, def] : command_table()) out.push_back(name);
  return out;
}

bool parse_args(int argc, const char* const* argv, RunConfig& cfg, std::ostream& out) {
  std::vector<std::string> args;
  std::string config_path;
  for (int i = 1; i < argc; ++i) {
    const std::string s = argv[i];
    if (s == "--config") {
      if (i + 1 >= argc) throw DomainError("--config needs a file name");
      config_path = argv[++i];
    } else if (s.rfind("--config=", 0) == 0) {
      config_path = s.substr(9);
    } else {
      args.push_back(s);
    }
  }
  json file = json::object();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw DomainError("cannot open config file '" + config_path + "'");
    try {
      file = json::parse(in);
    } catch (const json::exception& e) {
      throw DomainError("config file is not valid JSON: " + std::string(e.what()));
    }
    if (!file.is_object()) throw DomainError("config file must hold a JSON object");
  }
  const auto& table = command_table();
  const bool has_cmd = std::any_of(args.begin(), args.end(),
                                   [&](const std::string& s) { return table.count(s) > 0; });
  if (!has_cmd && file.contains("command")) {
    args.insert(args.begin(), json_to_token(file["command"]));
  }

  CLI::App app{"Special Lagrangian cones and families in C^m: construction and verification",
               "slgeo"};
  app.require_subcommand(1);
  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::map<std::string, bool>> flags;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, def] : table) {
    CLI::App* sub = app.add_subcommand(name, def.help);
    subs[name] = sub;
    for (const auto& opt : def.opts) {
      if (opt.flag) {
        sub->add_flag("--" + opt.name, flags[name][opt.name], opt.help);
      } else {
        sub->add_option("--" + opt.name, values[name][opt.name], opt.help);
      }
    }
  }
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, out);
    return false;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, out);
    return false;
  } catch (const CLI::ParseError& e) {
    throw DomainError(e.what());
  }

  cfg = RunConfig{};
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) cfg.command = name;
  }
  const CommandDef& def = table.at(cfg.command);
  auto known = [&](const std::string& k) {
    return std::any_of(def.opts.begin(), def.opts.end(),
                       [&](const OptDef& d) { return d.name == k; });
  };
  for (const auto& [k, v] : file.items()) {
    if (k == "command") {
      if (json_to_token(v) != cfg.command) {
        throw DomainError("config command '" + json_to_token(v) + "' conflicts with '" +
                          cfg.command + "'");
      }
      continue;
    }
    if (!known(k)) throw DomainError("unknown key '" + k + "' for command " + cfg.command);
    cfg.options[k] = json_to_token(v);
  }
  CLI::App* sub = subs.at(cfg.command);
  for (const auto& opt : def.opts) {
    if (sub->get_option("--" + opt.name)->count() == 0) continue;
    cfg.options[opt.name] = opt.flag ? std::string("true") : values[cfg.command][opt.name];
  }
  return true;
}

int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto& table = command_table();
  const auto it = table.find(cfg.command);
  if (it == table.end()) throw DomainError("unknown command '" + cfg.command + "'");
  for (const auto& [k, v] : cfg.options.items()) {
    const bool known = std::any_of(it->second.opts.begin(), it->second.opts.end(),
                                   [&](const OptDef& d) { return d.name == k; });
    if (!known) throw DomainError("unknown option '" + k + "' for command " + cfg.command);
    if (!v.is_string()) throw DomainError("option '" + k + "' must hold a string");
  }
  const Opts o(cfg.options);
  if (o.has("threads")) {
    const long n = o.integer("threads", 0);
    if (n < 1) throw DomainError("--threads must be positive");
    set_thread_count(static_cast<int>(n));
  }
  std::ofstream file;
  std::ostream* os = &out;
  if (o.has("out")) {
    file.open(o.str("out"));
    if (!file) throw DomainError("cannot open output file '" + o.str("out") + "'");
    os = &file;
  }
  (void)err;
  const std::string& c = cfg.command;
  if (c == "psi") return cmd_psi(cfg, o, *os);
  if (c == "psi-limits") return cmd_psi_limits(o, *os);
  if (c == "period") return cmd_period(o, *os);
  if (c == "find-torus") return cmd_find_torus(o, *os);
  if (c == "integrate") return cmd_integrate(cfg, o, *os);
  if (c == "closed-form") return cmd_closed_form(cfg, o, *os);
  if (c == "verify") return cmd_verify(o, *os);
  if (c == "sample") return cmd_sample(cfg, o, *os);
  if (c == "catalog") return cmd_catalog(o, *os);
  throw DomainError("unhandled command '" + c + "'");
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    if (!parse_args(argc, argv, cfg, out)) return kExitOk;
  } catch (const DomainError& e) {
    error_record(err, "usage", e.what());
    return kExitUsage;
  }
  try {
    return dispatch(cfg, out, err);
  } catch (const DomainError& e) {
    error_record(err, "domain", e.what());
    return kExitUsage;
  } catch (const NumericalError& e) {
    error_record(err, "numerical", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    error_record(err, "internal", e.what());
    return kExitNumerical;
  }
}

}  // namespace slgeo::cli
