#include "warpcheck/scenario.hpp"

#include "warpcheck/catalog.hpp"
#include "warpcheck/reduction.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#ifndef WARPCHECK_VERSION
#define WARPCHECK_VERSION "unknown"
#endif

namespace warpcheck {

using nlohmann::json;
using nlohmann::ordered_json;

const char* library_version() { return WARPCHECK_VERSION; }

DerivativeMode parse_mode(std::string_view text) {
  if (text == "analytic") return DerivativeMode::analytic;
  if (text == "fd" || text == "finite-difference") return DerivativeMode::finite_difference;
  throw ScenarioError("unknown mode '" + std::string(text) + "' (expected analytic or fd)");
}

double parse_number(const json& value, std::string_view field) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    const auto& s = value.get_ref<const std::string&>();
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == s.size() && used > 0) return v;
  }
  throw ScenarioError("field '" + std::string(field) + "' must be a number or decimal string");
}

void write_atomically(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw ScenarioError("cannot write " + tmp.string());
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw ScenarioError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

namespace {

// ---------------------------------------------------------------------------
// Field access

double number_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? parse_number(j.at(key), key) : fallback;
}

int int_or(const json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  const double v = parse_number(j.at(key), key);
  if (v != std::floor(v)) throw ScenarioError(std::string("field '") + key + "' must be an integer");
  return static_cast<int>(v);
}

double required_number(const json& j, const char* key) {
  if (!j.contains(key)) throw ScenarioError(std::string("missing field '") + key + "'");
  return parse_number(j.at(key), key);
}

template <class T>
std::optional<std::vector<T>> list_or_none(const json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  const json& v = j.at(key);
  if (!v.is_array()) throw ScenarioError(std::string("field '") + key + "' must be an array");
  std::vector<T> out;
  for (const auto& e : v) out.push_back(static_cast<T>(parse_number(e, key)));
  return out;
}

std::vector<double> number_list(const json& j, const char* key, std::vector<double> fallback) {
  auto v = list_or_none<double>(j, key);
  return v ? *v : fallback;
}

std::string string_or(const json& j, const char* key, std::string fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) throw ScenarioError(std::string("field '") + key + "' must be a string");
  return j.at(key).get<std::string>();
}

CatalogParams catalog_params(const json& j) {
  CatalogParams p;
  p.n = int_or(j, "n", p.n);
  p.m = int_or(j, "m", p.m);
  p.theta = number_or(j, "Theta", p.theta);
  p.A = number_or(j, "A", p.A);
  p.G = number_or(j, "G", p.G);
  p.C = number_or(j, "C", p.C);
  p.kappa = int_or(j, "kappa", p.kappa);
  p.signature = list_or_none<int>(j, "signature");
  p.alpha = list_or_none<double>(j, "alpha");
  return p;
}

struct Settings {
  DerivativeMode mode = DerivativeMode::analytic;
  double tolerance = kAnalyticTolerance;
  std::uint64_t seed = 0;
  int count = SampleGrid::kDefaultCount;
  double margin = SampleGrid::kDefaultMargin;
  std::optional<Box> box;
};

Settings settings(const json& j, const RunOptions& options) {
  Settings s;
  s.mode = options.mode ? *options.mode : parse_mode(string_or(j, "mode", "analytic"));
  s.tolerance = options.tolerance ? *options.tolerance
                                  : number_or(j, "tolerance", default_tolerance(s.mode));
  if (!(s.tolerance > 0.0)) throw ScenarioError("tolerance must be positive");
  const json grid = j.value("grid", json::object());
  const int seed = int_or(grid, "seed", int_or(j, "seed", 0));
  s.seed = options.seed ? *options.seed : static_cast<std::uint64_t>(seed);
  s.count = int_or(grid, "count", s.count);
  if (s.count < 1) throw ScenarioError("grid count must be at least 1");
  s.margin = number_or(grid, "margin", s.margin);
  auto lo = list_or_none<double>(grid, "lo");
  auto hi = list_or_none<double>(grid, "hi");
  if (lo.has_value() != hi.has_value()) throw ScenarioError("grid needs both lo and hi");
  if (lo) {
    if (lo->size() != hi->size()) throw ScenarioError("grid lo/hi sizes differ");
    Box b{Eigen::Map<Vec>(lo->data(), static_cast<Eigen::Index>(lo->size())),
          Eigen::Map<Vec>(hi->data(), static_cast<Eigen::Index>(hi->size()))};
    s.box = b;
  }
  return s;
}

SampleGrid make_grid(const WarpedProductSpec& spec, const Settings& s) {
  Box box = s.box ? *s.box : spec.product_box();
  if (box.dim() != spec.n() + spec.m())
    throw ScenarioError("grid box must have n + m coordinates");
  return SampleGrid::quasi_random(box, spec.product_domain(), s.count, s.margin, s.seed);
}

ProfileFunction profile_from(const json& j, const char* key) {
  if (!j.contains(key)) throw ScenarioError(std::string("missing profile '") + key + "'");
  const json& p = j.at(key);
  if (p.is_number() || p.is_string()) return ProfileFunction::constant(parse_number(p, key));
  const std::string type = string_or(p, "type", "");
  if (type == "constant") return ProfileFunction::constant(required_number(p, "value"));
  if (type == "affine")
    return ProfileFunction::affine(required_number(p, "slope"), required_number(p, "offset"));
  if (type == "exponential")
    return ProfileFunction::exponential(number_or(p, "scale", 1.0), required_number(p, "rate"));
  if (type == "reciprocal_affine")
    return ProfileFunction::reciprocal_affine(number_or(p, "theta", 1.0), required_number(p, "G"),
                                              required_number(p, "C"));
  throw ScenarioError(std::string("profile '") + key + "' has unknown type '" + type + "'");
}

ReducedParams reduced_params(const json& j) {
  ReducedParams p;
  p.n = int_or(j, "n", p.n);
  p.m = int_or(j, "m", p.m);
  p.lambda = number_or(j, "lambda", p.lambda);
  p.kappa = int_or(j, "kappa", p.kappa);
  p.g_sign = int_or(j, "g_sign", p.g_sign);
  return p;
}

// ---------------------------------------------------------------------------
// Report pieces

ordered_json check_json(const std::string& name, std::optional<double> lambda,
                        const ResidualReport& r) {
  ordered_json c;
  c["name"] = name;
  if (lambda) c["lambda"] = *lambda;
  ordered_json sup = ordered_json::object();
  double tol = 0.0;
  for (const auto& e : r.equations) {
    sup[e.label] = e.sup;
    tol = std::max(tol, e.tolerance);
  }
  c["sup"] = sup;
  c["tolerance"] = tol;
  if (r.best_fit_lambda) c["best_fit_lambda"] = *r.best_fit_lambda;
  if (!r.applicable) c["applicable"] = false;
  if (!r.note.empty()) c["note"] = r.note;
  c["verdict"] = r.pass() ? "pass" : (r.applicable ? "fail" : "not-applicable");
  return c;
}

struct ReportBuilder {
  ordered_json checks = ordered_json::array();
  ordered_json comparisons = ordered_json::array();
  ordered_json notes = ordered_json::array();
  ordered_json extra = ordered_json::object();
  bool pass = true;
  int status_override = -1;

  void check(const std::string& name, std::optional<double> lambda, const ResidualReport& r) {
    checks.push_back(check_json(name, lambda, r));
    pass = pass && r.pass();
  }
  void scalar_check(const std::string& name, double value, double tolerance) {
    ordered_json c;
    c["name"] = name;
    c["sup"] = {{name, value}};
    c["tolerance"] = tolerance;
    const bool ok = std::abs(value) <= tolerance;
    c["verdict"] = ok ? "pass" : "fail";
    checks.push_back(c);
    pass = pass && ok;
  }
};

std::optional<double> default_lambda(const CatalogEntry& e) {
  if (e.derived_lambda) return e.derived_lambda;
  return e.claimed_lambda;
}

ordered_json entry_json(const CatalogEntry& e) {
  ordered_json j;
  j["name"] = e.name;
  ordered_json params = ordered_json::object();
  for (const auto& [k, v] : e.params) params[k] = v;
  j["params"] = params;
  j["claimed_lambda"] = e.claimed_lambda ? json(*e.claimed_lambda) : json(nullptr);
  j["derived_lambda"] = e.derived_lambda ? json(*e.derived_lambda) : json(nullptr);
  j["domain_constraints"] = e.domain_constraints;
  j["fiber"] = e.spec.fiber.name;
  return j;
}

std::string describe(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// Kinds

void run_catalog(const json& j, const Settings& s, Execution exec, ReportBuilder& b) {
  const std::string name = string_or(j, "name", string_or(j, "family", ""));
  if (name.empty()) throw ScenarioError("catalog scenario needs 'name'");
  CatalogEntry entry = make_entry(name, catalog_params(j));
  entry.spec = entry.spec.with_mode(s.mode);
  const SampleGrid grid = make_grid(entry.spec, s);
  b.extra["entry"] = entry_json(entry);

  const auto claims = verify_catalog_entry(entry, grid, s.tolerance, exec);
  const bool has_derived = entry.derived_lambda.has_value();
  for (const auto& c : claims) {
    const bool gating = !has_derived || c.label != "claimed";
    ordered_json direct = check_json("einstein@" + c.label, c.lambda, c.einstein);
    ordered_json block = check_json("oneill@" + c.label, c.lambda, c.oneill);
    if (gating) {
      b.check("einstein@" + c.label, c.lambda, c.einstein);
      b.check("oneill@" + c.label, c.lambda, c.oneill);
    } else {
      b.comparisons.push_back(direct);
      b.comparisons.push_back(block);
    }
    std::string blocks;
    for (const auto& e : c.einstein.equations) {
      if (e.label == "einstein") continue;
      blocks += (blocks.empty() ? "" : ", ") + e.label + " " + describe(e.sup);
    }
    b.notes.push_back("lambda " + c.label + " = " + describe(c.lambda) +
                      ": sup |Ric - lambda g| = " + describe(c.einstein.sup()) + " (" + blocks +
                      "; " + (c.einstein.pass() ? "pass" : "fail") + ")");
  }
  for (const auto& note : entry.notes) b.notes.push_back(note);
}

void run_verify(const json& j, const Settings& s, Execution exec, ReportBuilder& b) {
  const std::string name = string_or(j, "family", string_or(j, "name", ""));
  if (name.empty()) throw ScenarioError("verify scenario needs 'family'");
  CatalogEntry entry = make_entry(name, catalog_params(j));
  entry.spec = entry.spec.with_mode(s.mode);
  const std::optional<double> fallback = default_lambda(entry);
  if (!j.contains("lambda") && !fallback) throw ScenarioError("verify scenario needs 'lambda'");
  const double lambda = j.contains("lambda") ? parse_number(j.at("lambda"), "lambda") : *fallback;
  const SampleGrid grid = make_grid(entry.spec, s);
  b.extra["entry"] = entry_json(entry);
  b.check("einstein", lambda, einstein_residual(assemble_warped_metric(entry.spec), lambda, grid,
                                                s.tolerance, exec));
  if (j.value("oneill", false)) {
    const double mu = number_or(j, "mu", entry.spec.fiber.mu_claim);
    b.check("oneill", lambda, oneill_residuals(entry.spec, lambda, mu, grid, s.tolerance, exec));
  }
}

void run_oneill(const json& j, const Settings& s, Execution exec, ReportBuilder& b) {
  const std::string name = string_or(j, "family", string_or(j, "name", ""));
  if (name.empty()) throw ScenarioError("oneill scenario needs 'family'");
  CatalogEntry entry = make_entry(name, catalog_params(j));
  entry.spec = entry.spec.with_mode(s.mode);
  const std::optional<double> fallback = default_lambda(entry);
  if (!j.contains("lambda") && !fallback) throw ScenarioError("oneill scenario needs 'lambda'");
  const double lambda = j.contains("lambda") ? parse_number(j.at("lambda"), "lambda") : *fallback;
  const double mu = number_or(j, "mu", entry.spec.fiber.mu_claim);
  const SampleGrid grid = make_grid(entry.spec, s);
  b.extra["entry"] = entry_json(entry);

  b.check("oneill", lambda, oneill_residuals(entry.spec, lambda, mu, grid, s.tolerance, exec));
  b.check("scalar_identities", lambda,
          scalar_identities(entry.spec, lambda, mu, grid, s.tolerance, exec));

  WarpedProductSpec spec = entry.spec;
  spec.lambda_claim = lambda;
  b.comparisons.push_back(check_json("bochner", lambda, bochner_identities(spec, grid, s.tolerance, exec)));

  const Vec x0 = grid.points().front().head(spec.n());
  const double r = scalar_curvature(spec.base, x0);
  const ObstructionMargin om = obstruction_margin(r, lambda, spec.n(), spec.m());
  ordered_json o;
  o["name"] = "obstruction_margin";
  o["R"] = r;
  o["lambda"] = lambda;
  o["margin"] = om.margin;
  o["verdict"] = to_string(om.verdict);
  b.comparisons.push_back(o);
}

void run_reduce(const json& j, const Settings& s, ReportBuilder& b) {
  ReducedParams p = reduced_params(j);
  p.validate();
  const auto xis = number_list(j, "xi", {0.0});

  if (j.contains("phi") && (j.contains("G") || j.contains("f"))) {
    const ProfileFunction phi = profile_from(j, "phi");
    auto table = [&](const std::string& name, auto&& residuals) {
      std::array<std::vector<double>, 3> cols;
      for (double xi : xis) {
        const Residuals3 r = residuals(xi);
        for (std::size_t k = 0; k < 3; ++k) cols[k].push_back(r[k]);
      }
      ResidualReport rep;
      for (std::size_t k = 0; k < 3; ++k)
        rep.equations.push_back(make_equation("eq" + std::to_string(k + 1), cols[k], s.tolerance));
      b.check(name, p.lambda, rep);
    };
    if (j.contains("G")) {
      const ProfileFunction G = profile_from(j, "G");
      table("reduced", [&](double xi) { return ode_residuals_reduced(phi, G, p, xi); });
      if (j.value("constant_R", false))
        table("constant_R", [&](double xi) {
          return ode_residuals_constantR(phi, G(xi), p, xi);
        });
    }
    if (j.contains("f")) {
      const ProfileFunction f = profile_from(j, "f");
      table("general", [&](double xi) { return ode_residuals_general(phi, f, p, xi); });
    }
  }

  if (j.contains("Rbar")) {
    ordered_json o;
    o["name"] = "G_of";
    o["Rbar"] = required_number(j, "Rbar");
    try {
      o["G"] = G_of(p.lambda, required_number(j, "Rbar"), p.kappa, p.n, p.m, p.g_sign);
    } catch (const NegativeRadicand& e) {
      o["G"] = nullptr;
      o["error"] = std::string("NegativeRadicand: ") + e.what();
    }
    b.comparisons.push_back(o);
  }
  if (j.contains("dphi0")) {
    const double phi0 = number_or(j, "phi0", 1.0);
    const double dphi0 = required_number(j, "dphi0");
    ordered_json o;
    o["name"] = "admissible_initial_data";
    o["phi0"] = phi0;
    o["dphi0"] = dphi0;
    o["roots"] = admissible_initial_data(phi0, dphi0, p);
    b.comparisons.push_back(o);
  }
}

Direction integration_direction(const json& j, const ReducedParams& p) {
  std::vector<int> eps;
  if (auto sig = list_or_none<int>(j, "signature")) {
    eps = *sig;
  } else {
    eps.assign(static_cast<std::size_t>(p.n), 1);
    if (p.kappa == -1) eps.front() = -1;
  }
  const Signature sig(eps);
  if (auto alpha = list_or_none<double>(j, "alpha"))
    return Direction::normalized(Eigen::Map<Vec>(alpha->data(), static_cast<Eigen::Index>(alpha->size())), sig);
  for (int k = sig.dim() - 1; k >= 0; --k)
    if (sig[k] == p.kappa) return Direction::axis(sig, k);
  throw ScenarioError("no axis direction with the requested kappa");
}

std::string run_integrate(const json& j, const Settings& s, Execution exec, ReportBuilder& b) {
  const ReducedParams p = reduced_params(j);
  ReducedState init;
  init.phi = required_number(j, "phi0");
  init.dphi = required_number(j, "dphi0");
  init.G = required_number(j, "G0");
  double xi_end = 0.0;
  if (auto span = list_or_none<double>(j, "span")) {
    if (span->size() != 2) throw ScenarioError("span must have two entries");
    init.xi = (*span)[0];
    xi_end = (*span)[1];
  } else {
    init.xi = number_or(j, "xi0", 0.0);
    xi_end = required_number(j, "xi_end");
  }
  IntegrationOptions io;
  io.monitor_bound = number_or(j, "monitor_bound", io.monitor_bound);
  const double step = required_number(j, "step");

  const Trajectory t = integrate_reduced(init, p, step, xi_end, io);
  std::ostringstream csv;
  write_trajectory_csv(csv, t);

  ordered_json traj;
  traj["states"] = t.states.size();
  traj["step"] = t.step;
  traj["final"] = {{"xi", t.states.back().xi},
                   {"phi", t.states.back().phi},
                   {"dphi", t.states.back().dphi},
                   {"G", t.states.back().G}};
  double monitor = 0.0;
  for (double v : t.monitor) monitor = std::max(monitor, std::abs(v));
  traj["max_monitor"] = monitor;
  if (t.error_estimate) traj["error_estimate"] = *t.error_estimate;
  traj["halt"] = to_string(t.halt);
  if (t.halt_xi) traj["halt_xi"] = *t.halt_xi;
  if (!t.diagnostic.empty()) traj["diagnostic"] = t.diagnostic;
  b.extra["trajectory"] = traj;

  b.scalar_check("constraint_monitor", monitor, io.monitor_bound);
  if (t.halt == HaltReason::singularity || t.halt == HaltReason::non_finite) {
    b.notes.push_back(t.diagnostic);
    b.pass = false;
    b.status_override = kExitError;
    return csv.str();
  }
  if (t.halted()) {
    b.notes.push_back(t.diagnostic);
    b.pass = false;
  }

  if (j.value("lift", true) && t.states.size() >= 2) {
    const Direction dir = integration_direction(j, p);
    const double theta = number_or(j, "Theta", 1.0);
    const FiberDescriptor fiber = FiberDescriptor::flat(Signature::euclidean(p.m));
    WarpedProductSpec spec = lift_spec(t, theta, fiber, dir);
    const SampleGrid grid = make_grid(spec, s);
    const double lambda = number_or(j, "verify_lambda", p.lambda);
    // analytic derivatives of the interpolants; FD mode is not offered here
    b.check("lift_and_verify", lambda,
            lift_and_verify(t, theta, fiber, dir, grid, s.tolerance, lambda, exec));
  }
  return csv.str();
}

}  // namespace

std::string scan_csv(const json& r, double tolerance) {
  std::ostringstream os;
  os.precision(12);
  os << "n,m,kappa,lambda,phi0,dphi0,roots,constraint_residuals,G_consistency,verdict\n";
  const auto ns = number_list(r, "n", {3});
  const auto ms = number_list(r, "m", {2});
  const auto kappas = number_list(r, "kappa", {1});
  const auto lambdas = number_list(r, "lambda", {});
  const auto phi0s = number_list(r, "phi0", {1.0});
  const auto dphi0s = number_list(r, "dphi0", {0.0});
  for (double n : ns)
    for (double m : ms)
      for (double kappa : kappas)
        for (double lambda : lambdas)
          for (double phi0 : phi0s)
            for (double dphi0 : dphi0s) {
              ReducedParams p{static_cast<int>(n), static_cast<int>(m), lambda,
                              static_cast<int>(kappa), 1};
              os << p.n << ',' << p.m << ',' << p.kappa << ',' << lambda << ',' << phi0 << ','
                 << dphi0 << ',';
              std::vector<double> roots;
              try {
                roots = admissible_initial_data(phi0, dphi0, p);
              } catch (const GeometryError& e) {
                os << ",,,error: " << e.what() << '\n';
                continue;
              }
              if (roots.empty()) {
                os << "no real roots,,,no real roots\n";
                continue;
              }
              std::ostringstream rs, cs, gs;
              rs.precision(12);
              cs.precision(6);
              gs.precision(6);
              bool consistent = true;
              for (std::size_t k = 0; k < roots.size(); ++k) {
                const char* sep = k ? ";" : "";
                const ReducedState st{0.0, phi0, dphi0, roots[k]};
                const double monitor = constraint_monitor(st, p);
                const double ddphi = evolution(st, p).ddphi;
                const double rbar = (p.n - 1) * (2 * phi0 * ddphi - p.n * dphi0 * dphi0) * p.kappa;
                rs << sep << roots[k];
                cs << sep << monitor;
                consistent = consistent && std::abs(monitor) <= tolerance;
                try {
                  const double g = G_of(lambda, rbar, p.kappa, p.n, p.m, roots[k] < 0 ? -1 : 1);
                  gs << sep << std::abs(g - roots[k]);
                  consistent = consistent && std::abs(g - roots[k]) <= tolerance;
                } catch (const NegativeRadicand&) {
                  gs << sep << "NegativeRadicand";
                  consistent = false;
                }
              }
              os << rs.str() << ',' << cs.str() << ',' << gs.str() << ','
                 << (consistent ? "admissible" : "inconsistent") << '\n';
            }
  return os.str();
}

RunResult run_scenario(const json& scenario, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  ordered_json& report = result.report;
  report["tool"] = "warpcheck";
  report["version"] = library_version();
  ReportBuilder b;
  std::string error;
  try {
    if (!scenario.is_object()) throw ScenarioError("scenario must be a JSON object");
    std::string kind = string_or(scenario, "kind", "");
    if (options.kind) {
      if (kind.empty()) kind = *options.kind;
      else if (kind != *options.kind)
        throw ScenarioError("expected a " + *options.kind + " scenario, got '" + kind + "'");
    }
    report["kind"] = kind;
    report["scenario"] = scenario;
    const Settings s = settings(scenario, options);
    report["mode"] = to_string(s.mode);
    report["tolerance"] = s.tolerance;
    report["seed"] = s.seed;
    if (kind == "catalog") run_catalog(scenario, s, options.exec, b);
    else if (kind == "verify") run_verify(scenario, s, options.exec, b);
    else if (kind == "oneill") run_oneill(scenario, s, options.exec, b);
    else if (kind == "reduce") run_reduce(scenario, s, b);
    else if (kind == "integrate") result.csv = run_integrate(scenario, s, options.exec, b);
    else if (kind == "scan") result.csv = scan_csv(scenario, s.tolerance);
    else throw ScenarioError("unknown scenario kind '" + kind + "'");
  } catch (const ScenarioError& e) {
    error = e.what();
  } catch (const GeometryError& e) {
    error = e.what();
  } catch (const json::exception& e) {
    error = std::string("schema error: ") + e.what();
  }

  for (auto& [key, value] : b.extra.items()) report[key] = value;
  report["checks"] = b.checks;
  report["comparisons"] = b.comparisons;
  report["notes"] = b.notes;
  if (!error.empty()) {
    report["error"] = error;
    result.status = kExitError;
  } else if (b.status_override >= 0) {
    result.status = b.status_override;
  } else {
    result.status = b.pass ? kExitPass : kExitFail;
  }
  report["verdict"] = result.status == kExitPass ? "pass"
                      : result.status == kExitFail ? "fail"
                                                   : "error";
  report["exit_status"] = result.status;
  report["wall_time_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

RunResult run_scenario_text(std::string_view text, const RunOptions& options) {
  json scenario;
  try {
    scenario = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    RunResult r;
    r.status = kExitError;
    r.report["tool"] = "warpcheck";
    r.report["version"] = library_version();
    r.report["error"] = "parse error at line " + std::to_string(line) + ", column " +
                        std::to_string(column) + ": " + e.what();
    r.report["verdict"] = "error";
    r.report["exit_status"] = kExitError;
    return r;
  }
  return run_scenario(scenario, options);
}

namespace {

int write_outputs(const RunResult& r, const json* scenario, const RunOptions& options,
                  std::ostream& out) {
  std::optional<std::filesystem::path> output = options.output;
  std::optional<std::filesystem::path> csv = options.csv;
  if (scenario && scenario->is_object()) {
    if (!output && scenario->contains("output")) output = scenario->at("output").get<std::string>();
    if (!csv && scenario->contains("csv")) csv = scenario->at("csv").get<std::string>();
  }
  const bool is_scan = scenario && scenario->is_object() &&
                       scenario->value("kind", options.kind.value_or("")) == "scan";
  const std::string body = is_scan && r.status != kExitError ? r.csv : r.report.dump(2) + "\n";
  if (output) write_atomically(*output, body);
  else out << body;
  if (!is_scan && csv && !r.csv.empty()) write_atomically(*csv, r.csv);
  return r.status;
}

}  // namespace

int run_and_write(const json& scenario, const RunOptions& options, std::ostream& out) {
  return write_outputs(run_scenario(scenario, options), &scenario, options, out);
}

int run_file(const std::filesystem::path& path, const RunOptions& options, std::ostream& out) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    RunResult r;
    r.status = kExitError;
    r.report["tool"] = "warpcheck";
    r.report["error"] = "cannot open scenario file " + path.string();
    r.report["verdict"] = "error";
    r.report["exit_status"] = kExitError;
    return write_outputs(r, nullptr, options, out);
  }
  std::stringstream buffer;
  buffer << is.rdbuf();
  const std::string text = buffer.str();
  const RunResult r = run_scenario_text(text, options);
  json scenario = json::parse(text, nullptr, false);
  return write_outputs(r, scenario.is_discarded() ? nullptr : &scenario, options, out);
}

}  // namespace warpcheck
