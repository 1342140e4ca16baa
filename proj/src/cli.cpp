#include "trunclap/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "trunclap/analytic.hpp"
#include "trunclap/eigen.hpp"
#include "trunclap/errors.hpp"
#include "trunclap/parallel.hpp"
#include "trunclap/solver.hpp"

namespace trunclap::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void bad(const std::string& msg) { throw ConfigurationError("config: " + msg); }

void allow(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) bad(where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; }))
      bad("unknown key '" + k + "' in " + where);
  }
}

double num(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) bad(where + " needs '" + key + "'");
  if (!j.at(key).is_number()) bad(where + "." + key + " must be a number");
  return j.at(key).get<double>();
}

double num_or(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? num(j, key, where) : fallback;
}

long int_or(const json& j, const char* key, long fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) bad(where + "." + key + " must be an integer");
  return j.at(key).get<long>();
}

std::string str(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_string()) bad(where + " needs string '" + key + "'");
  return j.at(key).get<std::string>();
}

Point vec(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_array()) bad(where + " needs array '" + key + "'");
  Point p;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) bad(where + "." + key + " must hold numbers");
    p.push_back(v.get<double>());
  }
  return p;
}

std::vector<double> num_list(const json& j, const char* key, const std::string& where) {
  return j.contains(key) ? vec(j, key, where) : std::vector<double>{};
}

json point_json(const Point& p) {
  json a = json::array();
  for (double v : p) a.push_back(v);
  return a;
}

json envelope(const std::string& command, const json& cfg, std::uint64_t seed) {
  json r;
  r["command"] = command;
  r["version"] = kVersion;
  r["config_hash"] = config_hash(cfg);
  r["seed"] = seed;
  return r;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

void write_grid_csv(const fs::path& path, const GridField& u) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  const Grid& g = *u.grid;
  const int n = g.dim();
  static const char* idx[] = {"i", "j", "k"};
  static const char* crd[] = {"x", "y", "z"};
  for (int i = 0; i < n; ++i) os << idx[i] << ',';
  for (int i = 0; i < n; ++i) os << crd[i] << ',';
  os << "class,u\n";
  for (std::size_t a = 0; a < g.active_count(); ++a) {
    const auto node = static_cast<std::size_t>(g.active_node(a));
    for (int m : g.multi_index(node)) os << m << ',';
    for (double x : g.position(node)) os << format_double(x) << ',';
    os << to_string(g.node_class(node)) << ',' << format_double(u.values[a]) << '\n';
  }
}

struct Problem {
  ProblemSpec spec;
  SolveOptions solve;
};

SolveOptions parse_solver(const json& j) {
  allow(j, {"tol", "max_iter", "blowup_norm", "method", "max_policy_iter"}, "solver");
  SolveOptions o;
  o.tol = num_or(j, "tol", o.tol, "solver");
  o.max_iter = int_or(j, "max_iter", o.max_iter, "solver");
  o.blowup_norm = num_or(j, "blowup_norm", o.blowup_norm, "solver");
  o.max_policy_iter = static_cast<int>(int_or(j, "max_policy_iter", o.max_policy_iter, "solver"));
  if (j.contains("method")) {
    const auto m = str(j, "method", "solver");
    if (m == "auto") o.method = SolveMethod::Auto;
    else if (m == "explicit") o.method = SolveMethod::Explicit;
    else if (m == "policy") o.method = SolveMethod::Policy;
    else bad("solver.method must be auto, explicit or policy");
  }
  return o;
}

Problem parse_problem(const json& j, bool with_mu_and_f) {
  if (!j.contains("domain")) bad("missing 'domain'");
  Problem p{ProblemSpec{parse_domain(j.at("domain")), {}, {}, 0.0, ScalarField::constant(0.0), 1.0 / 32.0}, {}};
  if (j.contains("scheme")) p.spec.scheme = parse_scheme(j.at("scheme"));
  if (j.contains("hamiltonian")) p.spec.H = parse_hamiltonian(j.at("hamiltonian"));
  if (with_mu_and_f) {
    p.spec.mu = num_or(j, "mu", 0.0, "config");
    if (j.contains("f")) p.spec.f = parse_field(j.at("f"));
  }
  p.spec.h = num(j, "h", "config");
  if (j.contains("solver")) p.solve = parse_solver(j.at("solver"));
  p.spec.validate();
  return p;
}

int status_exit(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged:
      return kOk;
    case SolveStatus::Diverged:
      return kDiverged;
    case SolveStatus::MaxIter:
      return kMaxIter;
  }
  return kMaxIter;
}

int cmd_solve(const json& cfg, const fs::path& out, std::uint64_t seed, std::ostream& os) {
  allow(cfg, {"domain", "scheme", "hamiltonian", "mu", "f", "h", "solver", "seed"}, "config");
  const auto p = parse_problem(cfg, true);
  const auto res = solve_dirichlet(p.spec, p.solve);
  const Grid& g = *res.u.grid;
  write_grid_csv(out / "solution.csv", res.u);
  json r = envelope("solve", cfg, seed);
  r["status"] = to_string(res.status);
  r["method"] = to_string(res.method);
  r["iterations"] = res.iterations;
  r["residual"] = res.residual;
  r["sup_norm"] = res.sup_norm;
  r["lipschitz"] = res.lipschitz;
  r["boundary_ratio"] = res.boundary_ratio;
  r["detail"] = res.detail;
  r["nodes"] = {{"active", g.active_count()}, {"interior", g.interior_count()}, {"cut", g.cut_count()}};
  r["solution_csv_path"] = "solution.csv";
  write_json(out / "solve_result.json", r);
  os << "solve: " << to_string(res.status) << " after " << res.iterations << " iterations, residual "
     << format_double(res.residual) << '\n';
  return status_exit(res.status);
}

json probe_json(const std::vector<ProbeRow>& rows) {
  json a = json::array();
  for (const auto& r : rows)
    a.push_back({{"mu", r.mu},
                 {"forcing", r.forcing},
                 {"status", to_string(r.status)},
                 {"max", r.max_value},
                 {"min", r.min_value},
                 {"sign_ok", r.sign_ok},
                 {"classification", to_string(r.cls)}});
  return a;
}

int cmd_eigen(const json& cfg, const fs::path& out, std::uint64_t seed, std::ostream& os) {
  allow(cfg, {"domain", "scheme", "hamiltonian", "h", "solver", "tol_mu", "max_steps", "reference", "probe", "seed"},
        "config");
  const auto p = parse_problem(cfg, false);
  EigenOptions eo;
  eo.solve = p.solve;
  eo.tol_mu = num_or(cfg, "tol_mu", eo.tol_mu, "config");
  eo.max_steps = static_cast<int>(int_or(cfg, "max_steps", eo.max_steps, "config"));
  if (!(eo.tol_mu > 0.0)) bad("tol_mu must be positive");

  std::optional<ClosedForm> ref;
  if (cfg.contains("reference")) {
    const auto name = cfg.at("reference").is_string() ? cfg.at("reference").get<std::string>() : "";
    const auto* ball = std::get_if<DomainSpec::Ball>(&p.spec.domain.shape());
    if (name != "eigen_cos") bad("reference must be \"eigen_cos\"");
    if (!ball) bad("reference eigen_cos needs a ball domain");
    const double c = std::acos(-1.0) / (2.0 * ball->radius);
    ref = make_radial("eigen_cos", ball->center,
                      {[=](double r) { return -std::cos(c * r); }, [=](double r) { return c * std::sin(c * r); },
                       [=](double r) { return c * c * std::cos(c * r); }},
                      "center", [ctr = ball->center](std::span<const double> x) { return distance_between(x, ctr); });
  }
  std::vector<double> mus, dual;
  if (cfg.contains("probe")) {
    allow(cfg.at("probe"), {"mu_list", "dual_mu_list"}, "probe");
    mus = num_list(cfg.at("probe"), "mu_list", "probe");
    dual = num_list(cfg.at("probe"), "dual_mu_list", "probe");
  }

  json r = envelope("eigen", cfg, seed);
  EigenEstimate est;
  try {
    est = estimate_mu_minus(p.spec, eo);
  } catch (const BracketFailure& e) {
    r["error"] = "bracket_failure";
    r["message"] = e.what();
    r["lo"] = e.lo();
    r["hi"] = e.hi();
    r["lo_below"] = e.lo_below();
    r["hi_below"] = e.hi_below();
    write_json(out / "eigen.json", r);
    os << "eigen: " << e.what() << '\n';
    return kBracketFailure;
  }
  write_grid_csv(out / "eigenfunction.csv", est.eigenfunction);
  const auto chk = eigenfunction_check(est, ref ? &*ref : nullptr);

  r["mu_lo"] = est.mu_lo;
  r["mu_hi"] = est.mu_hi;
  r["mu_mid"] = est.mu_mid;
  r["bound_lo"] = est.bound_lo_finite ? json(est.bound_lo) : json(nullptr);
  r["bound_lo_finite"] = est.bound_lo_finite;
  r["bound_hi"] = est.bound_hi;
  r["domain_outside_C_R"] = est.domain_outside_C_R;
  r["experimental"] = est.experimental;
  json h = json::array();
  for (const auto& s : est.history)
    h.push_back({{"mu", s.mu},
                 {"status", to_string(s.status)},
                 {"classification", to_string(s.cls)},
                 {"sup_norm", s.sup_norm},
                 {"iterations", s.iterations}});
  r["history"] = h;
  r["eigenfunction_csv_path"] = "eigenfunction.csv";
  json c = {{"nonpositive", chk.nonpositive},        {"max", chk.max_value},
            {"min", chk.min_value},                  {"strictly_negative", chk.strictly_negative},
            {"deep_max", chk.deep_max},              {"deep_nodes", chk.deep_nodes},
            {"normalized", chk.normalized},          {"pass", chk.pass}};
  if (chk.reference_error) c["reference_error"] = *chk.reference_error;
  r["eigenfunction_check"] = c;
  if (!mus.empty() || !dual.empty()) r["probe"] = probe_json(max_principle_probe(p.spec, mus, dual, p.solve));
  write_json(out / "eigen.json", r);
  os << "eigen: mu in [" << format_double(est.mu_lo) << ", " << format_double(est.mu_hi) << "]\n";
  return kOk;
}

int cmd_verify(const json& cfg, const fs::path& out, std::uint64_t seed, std::ostream& os) {
  allow(cfg, {"entries", "samples", "tol", "overrides", "seed"}, "config");
  std::vector<std::string> names;
  if (cfg.contains("entries")) {
    if (!cfg.at("entries").is_array()) bad("entries must be an array of names");
    for (const auto& e : cfg.at("entries")) {
      if (!e.is_string()) bad("entries must be an array of names");
      names.push_back(e.get<std::string>());
    }
  } else {
    names = catalog_names();
  }
  const auto known = catalog_names();
  for (const auto& n : names)
    if (std::find(known.begin(), known.end(), n) == known.end()) bad("unknown catalog entry '" + n + "'");
  const int samples = static_cast<int>(int_or(cfg, "samples", 1000, "config"));
  const double tol = num_or(cfg, "tol", 1e-8, "config");
  if (samples < 1) bad("samples must be >= 1");
  std::map<std::string, CaseOverrides> ov;
  if (cfg.contains("overrides")) {
    if (!cfg.at("overrides").is_object()) bad("overrides must be an object");
    for (const auto& [name, o] : cfg.at("overrides").items()) {
      if (std::find(known.begin(), known.end(), name) == known.end()) bad("unknown catalog entry '" + name + "'");
      allow(o, {"b", "mu"}, "overrides." + name);
      if (o.contains("b")) ov[name].b = num(o, "b", "overrides." + name);
      if (o.contains("mu")) ov[name].mu = num(o, "mu", "overrides." + name);
    }
  }

  json r = envelope("verify", cfg, seed);
  json entries = json::array();
  bool all = true;
  for (const auto& n : names) {
    const auto c = make_case(n, ov.count(n) ? ov.at(n) : CaseOverrides{});
    const auto cert = run_case(c, samples, seed, tol);
    all = all && cert.pass;
    entries.push_back({{"name", n},
                       {"sense", to_string(cert.sense)},
                       {"pass", cert.pass},
                       {"worst_residual", cert.worst},
                       {"worst_point", point_json(cert.worst_point)},
                       {"samples", cert.samples},
                       {"skipped", cert.skipped},
                       {"region", c.region}});
    os << (cert.pass ? "PASS " : "FAIL ") << n << " worst " << format_double(cert.worst) << '\n';
  }
  r["entries"] = entries;
  r["tol"] = tol;
  r["all_pass"] = all;
  write_json(out / "verify.json", r);
  return all ? kOk : kVerificationFail;
}

int cmd_domain(const json& cfg, const fs::path& out, std::uint64_t seed, std::ostream& os) {
  allow(cfg, {"domain", "R", "n_boundary", "n_interior", "curvature_samples", "seed"}, "config");
  if (!cfg.contains("domain")) bad("missing 'domain'");
  const auto dom = parse_domain(cfg.at("domain"));
  const double R = num(cfg, "R", "config");
  if (!(R > 0.0)) bad("R must be positive");
  const int nb = static_cast<int>(int_or(cfg, "n_boundary", 400, "config"));
  const int ni = static_cast<int>(int_or(cfg, "n_interior", 400, "config"));
  const int nc = static_cast<int>(int_or(cfg, "curvature_samples", 720, "config"));
  if (nb < 1 || ni < 0 || nc < 1) bad("sample counts must be positive");

  json r = envelope("domain", cfg, seed);
  r["domain"] = dom.describe();
  r["kind"] = to_string(dom.kind());
  r["hula_hoop_candidate"] = dom.is_hula_hoop_candidate();
  const auto rad = dom.radii();
  r["radii"] = {{"inscribed", rad.inscribed},
                {"circumscribed", rad.circumscribed},
                {"inscribed_center", point_json(rad.inscribed_center)}};
  bool pass = false;
  if (dom.has_normals()) {
    const auto hh = hula_hoop_check(dom, R, nb, ni, seed);
    pass = hh.pass;
    r["hula_hoop"] = {{"R", R},
                      {"pass", hh.pass},
                      {"worst_margin", hh.worst_margin},
                      {"witness_boundary", point_json(hh.witness_boundary)},
                      {"witness_point", point_json(hh.witness_point)},
                      {"pairs", hh.pairs}};
    const auto cs = curvature_scan(dom, nc);
    r["curvature"] = {{"kappa_min", cs.kappa_min},
                      {"R_star", cs.R_star ? json(*cs.R_star) : json(nullptr)},
                      {"nonconvex", cs.nonconvex},
                      {"witness", point_json(cs.witness)}};
    os << "domain: hula-hoop R=" << format_double(R) << (hh.pass ? " pass" : " FAIL") << ", worst margin "
       << format_double(hh.worst_margin) << '\n';
    if (!hh.pass)
      os << "  witness z=" << point_json(hh.witness_boundary).dump() << " x=" << point_json(hh.witness_point).dump()
         << '\n';
  } else {
    r["hula_hoop"] = {{"R", R}, {"pass", false}, {"error", "domain has no boundary normals"}};
    os << "domain: no boundary normals, hula-hoop test unavailable\n";
  }
  r["pass"] = pass;
  write_json(out / "domain.json", r);
  return pass ? kOk : kVerificationFail;
}

int cmd_props(const json& cfg, const fs::path& out, std::uint64_t seed, std::ostream& os) {
  allow(cfg, {"trials", "max_dim", "seed"}, "config");
  const int trials = static_cast<int>(int_or(cfg, "trials", 1000, "config"));
  const int max_dim = static_cast<int>(int_or(cfg, "max_dim", 6, "config"));
  if (trials < 1 || max_dim < 1) bad("trials and max_dim must be positive");
  const auto s = random_matrix_suite(trials, max_dim, seed);
  json r = envelope("props", cfg, seed);
  r["trials"] = s.trials;
  r["checks"] = s.checks;
  r["failures"] = s.failures;
  r["worst_slack"] = s.worst;
  r["pass"] = s.pass();
  write_json(out / "props.json", r);
  os << "props: " << s.checks << " checks, " << (s.pass() ? "all pass" : "FAILURES") << '\n';
  return s.pass() ? kOk : kVerificationFail;
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream is(path, std::ios::binary);
  if (!is) bad("cannot read " + path);
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    bad(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

DomainSpec parse_domain(const json& j) {
  if (!j.is_object()) bad("domain must be an object");
  const auto kind = str(j, "kind", "domain");
  if (kind == "ball") {
    allow(j, {"kind", "center", "radius"}, "domain");
    return DomainSpec::ball(vec(j, "center", "domain"), num(j, "radius", "domain"));
  }
  if (kind == "ball_intersection") {
    allow(j, {"kind", "centers", "radius"}, "domain");
    if (!j.contains("centers") || !j.at("centers").is_array()) bad("domain needs array 'centers'");
    std::vector<Point> cs;
    for (const auto& c : j.at("centers")) cs.push_back(vec(json{{"c", c}}, "c", "domain.centers"));
    return DomainSpec::ball_intersection(std::move(cs), num(j, "radius", "domain"));
  }
  if (kind == "annulus") {
    allow(j, {"kind", "center", "r_in", "r_out"}, "domain");
    return DomainSpec::annulus(vec(j, "center", "domain"), num(j, "r_in", "domain"), num(j, "r_out", "domain"));
  }
  if (kind == "ellipse") {
    allow(j, {"kind", "center", "semi_axes"}, "domain");
    return DomainSpec::ellipse(vec(j, "center", "domain"), vec(j, "semi_axes", "domain"));
  }
  if (kind == "halfspace_box") {
    allow(j, {"kind", "dim", "half_width"}, "domain");
    return DomainSpec::halfspace_box(static_cast<int>(int_or(j, "dim", 2, "domain")), num(j, "half_width", "domain"));
  }
  bad("unknown domain kind '" + kind + "'");
}

ScalarField parse_field(const json& j) {
  if (j.is_number()) return ScalarField::constant(j.get<double>());
  const auto kind = str(j, "kind", "field");
  if (kind == "constant") {
    allow(j, {"kind", "value"}, "field");
    return ScalarField::constant(num(j, "value", "field"));
  }
  if (kind == "affine") {
    allow(j, {"kind", "c0", "gradient"}, "field");
    return ScalarField::affine(num(j, "c0", "field"), vec(j, "gradient", "field"));
  }
  if (kind == "trig") {
    allow(j, {"kind", "c0", "amplitude", "axis", "frequency", "phase"}, "field");
    return ScalarField::trig(num_or(j, "c0", 0.0, "field"), num(j, "amplitude", "field"),
                             static_cast<int>(int_or(j, "axis", 0, "field")), num_or(j, "frequency", 1.0, "field"),
                             num_or(j, "phase", 0.0, "field"));
  }
  bad("unknown field kind '" + kind + "'");
}

HamiltonianSpec parse_hamiltonian(const json& j) {
  const auto kind = str(j, "kind", "hamiltonian");
  if (kind == "zero") {
    allow(j, {"kind"}, "hamiltonian");
    return HamiltonianSpec::zero();
  }
  if (kind == "norm" || kind == "neg_norm") {
    allow(j, {"kind", "b", "bound"}, "hamiltonian");
    if (!j.contains("b")) bad("hamiltonian needs 'b'");
    auto b = parse_field(j.at("b"));
    double bound = 0.0;
    if (j.contains("bound")) bound = num(j, "bound", "hamiltonian");
    else if (b.is_constant()) bound = std::abs(b.c0);
    else bad("hamiltonian with a variable b needs 'bound'");
    return kind == "norm" ? HamiltonianSpec::norm(std::move(b), bound) : HamiltonianSpec::neg_norm(std::move(b), bound);
  }
  if (kind == "drift") {
    allow(j, {"kind", "drift", "bound"}, "hamiltonian");
    if (!j.contains("drift") || !j.at("drift").is_array()) bad("hamiltonian needs array 'drift'");
    std::vector<ScalarField> d;
    for (const auto& c : j.at("drift")) d.push_back(parse_field(c));
    return HamiltonianSpec::drift_field(std::move(d), num(j, "bound", "hamiltonian"));
  }
  bad("unknown hamiltonian kind '" + kind + "'");
}

SchemeConfig parse_scheme(const json& j) {
  allow(j, {"width", "sign", "k", "gradient"}, "scheme");
  SchemeConfig s;
  s.width = static_cast<int>(int_or(j, "width", s.width, "scheme"));
  s.k = static_cast<int>(int_or(j, "k", s.k, "scheme"));
  if (j.contains("sign")) {
    const auto v = str(j, "sign", "scheme");
    if (v == "minus") s.sign = OperatorSign::Minus;
    else if (v == "plus") s.sign = OperatorSign::Plus;
    else bad("scheme.sign must be minus or plus");
  }
  if (j.contains("gradient")) {
    const auto v = str(j, "gradient", "scheme");
    if (v == "upwind") s.gradient = GradientScheme::Upwind;
    else if (v == "central_regularized") s.gradient = GradientScheme::CentralRegularized;
    else bad("scheme.gradient must be upwind or central_regularized");
  }
  return s;
}

std::string config_hash(const json& j) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

bool PropsSummary::pass() const {
  for (const auto& [k, n] : failures)
    if (n > 0) return false;
  return checks > 0;
}

PropsSummary random_matrix_suite(int trials, int max_dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> scale_dist(-2.0, 2.0);
  PropsSummary s;
  s.trials = trials;
  for (const char* p : {"lower_minus", "upper_minus", "lower_plus", "upper_plus", "duality", "trace", "loewner",
                        "homogeneity"}) {
    s.failures[p] = 0;
    s.worst[p] = 0.0;
  }
  auto note = [&](const char* name, const InequalityCheck& c) {
    ++s.checks;
    if (!c.pass) ++s.failures[name];
    s.worst[name] = std::min(s.worst[name], c.slack);
  };
  auto random_sym = [&](int n) {
    const double amp = std::pow(10.0, scale_dist(rng));
    SymMatrix m(n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) m.set(i, j, amp * g(rng));
    return m;
  };
  for (int t = 0; t < trials; ++t) {
    const int n = 1 + t % max_dim;
    const SymMatrix x = random_sym(n);
    SymMatrix y = random_sym(n);
    if (t % 2 == 1) {
      // y = x + B B^T, so x <= y in the Loewner order
      SymMatrix bbt(n);
      std::vector<double> col(n);
      for (int c = 0; c < n; ++c) {
        for (auto& v : col) v = g(rng);
        bbt += SymMatrix::outer(col);
      }
      y = x + bbt;
    }
    for (int k = 1; k <= n; ++k) {
      const auto r = check_inequalities(x, y, k);
      note("lower_minus", r.lower_minus);
      note("upper_minus", r.upper_minus);
      note("lower_plus", r.lower_plus);
      note("upper_plus", r.upper_plus);
      note("duality", r.duality);
      note("homogeneity", r.homogeneity);
      if (r.loewner_applicable) note("loewner", r.loewner);
      if (k == n) {
        const double sc = 1.0 + x.max_abs();
        InequalityCheck tr;
        tr.slack = -std::max(std::abs(pk_minus(x, n) - x.trace()), std::abs(pk_plus(x, n) - x.trace()));
        tr.pass = -tr.slack <= 1e-10 * sc;
        note("trace", tr);
      }
    }
  }
  return s;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Truncated Laplacian Dirichlet solver and eigenvalue estimator", "trunclap"};
  app.require_subcommand(1, 1);
  std::string config, outdir = ".";
  int threads = 1;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config, "JSON configuration file");
  app.add_option("--out", outdir, "Output directory");
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Sampling seed");
  app.set_version_flag("--version", kVersion);
  for (const char* name : {"solve", "eigen", "verify", "domain", "props"}) {
    auto* sub = app.add_subcommand(name);
    sub->fallthrough();
  }
  app.get_subcommand("solve")->description("Solve the Dirichlet problem and write solution.csv");
  app.get_subcommand("eigen")->description("Estimate the principal eigenvalue by bisection");
  app.get_subcommand("verify")->description("Certify closed-form barriers and eigenfunctions");
  app.get_subcommand("domain")->description("Hula-hoop and curvature checks for a domain");
  app.get_subcommand("props")->description("Random-matrix operator identity suite");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();

  try {
    set_thread_count(threads);
    json cfg = load_config(config);
    if (!cfg.is_object()) bad("top level must be an object");
    std::uint64_t s = 1;
    if (cfg.contains("seed")) {
      if (!cfg.at("seed").is_number_unsigned()) bad("seed must be a nonnegative integer");
      s = cfg.at("seed").get<std::uint64_t>();
    }
    if (seed) s = *seed;
    if (config.empty() && cmd != "props" && cmd != "verify") bad(cmd + " needs --config");
    const fs::path out_dir(outdir);
    fs::create_directories(out_dir);
    if (cmd == "solve") return cmd_solve(cfg, out_dir, s, out);
    if (cmd == "eigen") return cmd_eigen(cfg, out_dir, s, out);
    if (cmd == "verify") return cmd_verify(cfg, out_dir, s, out);
    if (cmd == "domain") return cmd_domain(cfg, out_dir, s, out);
    return cmd_props(cfg, out_dir, s, out);
  } catch (const ConfigurationError& e) {
    err << e.what() << '\n';
    return kUsage;
  } catch (const InvalidInput& e) {
    err << "config: " << e.what() << '\n';
    return kUsage;
  } catch (const UnsupportedDomain& e) {
    err << "config: " << e.what() << '\n';
    return kUsage;
  } catch (const json::exception& e) {
    err << "config: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kVerificationFail;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace trunclap::cli
