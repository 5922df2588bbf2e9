// Acceptance run: one PASS/FAIL line per requirement, exit status 0 only if
// every line passes.

#include "oracles.hpp"
#include "property_checks.hpp"
#include "warpcheck/catalog.hpp"
#include "warpcheck/reduction.hpp"
#include "warpcheck/scenario.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace warpcheck;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void run(int id, const char* title, const std::function<void(Verdict&)>& body) {
  Verdict v;
  try {
    body(v);
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail << " [exception: " << e.what() << "]";
  }
  if (!v.pass) ++failures;
  std::printf("%s  %d  %s:%s\n", v.pass ? "PASS" : "FAIL", id, title, v.detail.str().c_str());
  std::fflush(stdout);
}

template <class J>
const J& named(const J& list, const std::string& name) {
  for (const auto& c : list)
    if (c.at("name") == name) return c;
  throw std::runtime_error("report has no entry " + name);
}

// Ratio of two residual maxima with values below tolerance treated as equal.
double agreement(double a, double b, double tol) {
  return std::max(a, tol) / std::max(b, tol);
}

}  // namespace

int main() {
#ifdef _OPENMP
  omp_set_num_threads(4);
#endif

  run(1, "affine family is Einstein at lambda = -(m+n-1) kappa G^2", [](Verdict& v) {
    for (auto [n, m] : {std::pair{3, 2}, {4, 2}, {3, 3}}) {
      const auto t0 = Clock::now();
      CatalogParams p;
      p.n = n;
      p.m = m;
      p.G = 1.0;
      p.C = 5.0;
      p.kappa = 1;
      const auto e = make_entry("affine_conformal", p);
      const double lambda = -(m + n - 1.0);
      const auto grid = product_grid(e.spec, 100, 0.1, 0);
      const auto r = einstein_residual(assemble_warped_metric(e.spec), lambda, grid, 1e-6);
      const double dt = seconds_since(t0);
      v.detail << " (" << n << "," << m << ") sup=" << r.sup() << " t=" << dt << "s;";
      v.require(grid.size() == 100, "grid size");
      v.require(r.sup() < 1e-6, "residual");
      v.require(dt < 5.0, "runtime");
    }
  });

  run(2, "hyperbolic family: derived and claimed constants in one report", [](Verdict& v) {
    const int n = 3, m = 2;
    const auto r = run_scenario(json{{"kind", "catalog"}, {"name", "hyperbolic_reciprocal"},
                                     {"n", n}, {"m", m}});
    const auto& derived = named(r.report.at("checks"), "einstein@derived");
    const auto& claimed = named(r.report.at("comparisons"), "einstein@claimed");
    const double sd = derived.at("sup").at("einstein").get<double>();
    const double sp = claimed.at("sup").at("einstein").get<double>();
    const double ld = derived.at("lambda").get<double>();
    const double lp = claimed.at("lambda").get<double>();
    v.detail << " lambda=" << ld << " sup=" << sd << "; lambda=" << lp << " sup=" << sp;
    v.require(ld == -(m + n - 1.0), "derived constant");
    v.require(std::abs(lp + (m + n - 1.0) / (n * (n - 1.0))) < 1e-15, "claimed constant");
    v.require(sd < 1e-6, "derived residual");
    v.require(sp > 0.1, "claimed residual");
  });

  run(3, "direct and block-system residuals agree within a factor of 10", [](Verdict& v) {
    std::vector<std::pair<std::string, WarpedProductSpec>> specs;
    std::vector<double> lambdas;
    for (const auto& name : catalog_names()) {
      const auto e = make_entry(name, {});
      for (const auto& l : {e.claimed_lambda, e.derived_lambda}) {
        if (!l) continue;
        specs.emplace_back(name, e.spec);
        lambdas.push_back(*l);
      }
    }
    for (int i = 0; i < 3; ++i) {
      const auto spec = props::random_spec();
      specs.emplace_back("random" + std::to_string(i), spec);
      lambdas.push_back(spec.lambda_claim);
    }
    double lo = 1e300, hi = 0.0;
    int cases = 0;
    for (std::size_t k = 0; k < specs.size(); ++k) {
      for (auto mode : {DerivativeMode::analytic, DerivativeMode::finite_difference}) {
        const double tol = default_tolerance(mode);
        const auto spec = specs[k].second.with_mode(mode);
        const auto grid = product_grid(spec, 30, 0.1, 0);
        const double a =
            einstein_residual(assemble_warped_metric(spec), lambdas[k], grid, tol).sup();
        const double b =
            oneill_residuals(spec, lambdas[k], spec.fiber.mu_claim, grid, tol).sup();
        const double ratio = agreement(a, b, tol);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        ++cases;
        if (!(ratio >= 0.1 && ratio <= 10.0)) {
          v.require(false, specs[k].first + " " + to_string(mode) + " ratio " +
                               std::to_string(ratio));
        }
      }
    }
    v.detail << " " << cases << " cases, ratio range [" << lo << ", " << hi << "]";
  });

  run(4, "scalar identities hold pointwise below 1e-8", [](Verdict& v) {
    std::vector<CatalogEntry> entries;
    for (auto [n, m] : {std::pair{3, 2}, {4, 2}, {3, 3}}) {
      CatalogParams p;
      p.n = n;
      p.m = m;
      entries.push_back(make_entry("affine_conformal", p));
      entries.push_back(make_entry("hyperbolic_reciprocal", p));
    }
    double worst = 0.0;
    for (const auto& e : entries) {
      const auto grid = product_grid(e.spec, 100, 0.1, 0);
      const auto r = scalar_identities(e.spec, *e.derived_lambda, 0.0, grid, 1e-8);
      for (const char* label : {"contracted_base", "gradient_identity"})
        for (double x : r.equation(label).values) worst = std::max(worst, std::abs(x));
      v.require(r.pass(), e.name);
    }
    v.detail << " max |residual| = " << worst << " over " << entries.size() << " specs";
    v.require(worst < 1e-8, "pointwise bound");
  });

  run(5, "reduced system integrates back to the affine profile", [](Verdict& v) {
    const auto t0 = Clock::now();
    ReducedParams p;
    p.n = 3;
    p.m = 2;
    p.kappa = 1;
    p.lambda = -4.0;
    const auto t = integrate_reduced({0.0, 5.0, -1.0, 1.0}, p, 1e-3, 4.0);
    double err = 0.0, mon = 0.0;
    for (std::size_t k = 0; k < t.states.size(); ++k) {
      err = std::max(err, std::abs(t.states[k].phi - (5.0 - t.states[k].xi)));
      mon = std::max(mon, std::abs(t.monitor[k]));
    }
    const Direction dir = Direction::axis(Signature::euclidean(3), 0);
    const auto fiber = FiberDescriptor::flat(Signature::euclidean(2));
    const auto grid = product_grid(lift_spec(t, 1.0, fiber, dir), 100, 0.1, 0);
    const double lift = lift_and_verify(t, 1.0, fiber, dir, grid, 1e-5).sup();
    const double dt = seconds_since(t0);
    v.detail << " phi error=" << err << " monitor=" << mon << " lift=" << lift << " t=" << dt
             << "s";
    v.require(!t.halted() && t.states.back().xi == 4.0, "full span");
    v.require(err < 1e-6, "profile error");
    v.require(mon < 1e-8, "monitor");
    v.require(lift < 1e-5, "lifted residual");
    v.require(dt < 1.0, "runtime");
  });

  run(6, "exponential family residual equals m A^2 (horizontal) and m A^2 f^2", [](Verdict& v) {
    const int m = 2;
    const double A = 1.0;
    CatalogParams p;
    p.n = 3;
    p.m = m;
    p.theta = 1.0;
    p.A = A;
    p.alpha = std::vector<double>{1.0, 0.0, 0.0};
    const auto e = make_entry("flat_exponential", p);
    const auto grid = product_grid(e.spec, 100, 0.1, 0);
    const auto direct = einstein_residual(assemble_warped_metric(e.spec), 0.0, grid, 1e-6);
    const auto blocks = oneill_residuals(e.spec, 0.0, 0.0, grid, 1e-6);
    const double horizontal = direct.equation("horizontal").sup;
    double scalar_err = 0.0;
    const auto& w = blocks.equation("warp_scalar").values;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double f = std::exp(A * grid.points()[i][0]);
      scalar_err = std::max(scalar_err, std::abs(w[i] - m * A * A * f * f));
    }
    const auto r = run_scenario(json{{"kind", "catalog"}, {"name", "flat_exponential"},
                                     {"alpha", {1, 0, 0}}});
    bool noted_claim = false, noted_measure = false;
    for (const auto& note : r.report.at("notes")) {
      const auto s = note.get<std::string>();
      noted_claim = noted_claim || s.find("Ricci-flat") != std::string::npos;
      noted_measure = noted_measure || s.find("horizontal 2") != std::string::npos;
    }
    v.detail << " horizontal sup=" << horizontal << " |scalar - m A^2 f^2| <= " << scalar_err
             << " exit=" << r.status;
    v.require(std::abs(horizontal - m * A * A) < 1e-6, "horizontal");
    v.require(scalar_err < 1e-6, "scalar equation");
    v.require(noted_claim && noted_measure, "notes");
    v.require(r.status == kExitFail, "exit status");
  });

  run(7, "closed-form conformal curvature matches the engine", [](Verdict& v) {
    const Signature e = Signature::euclidean(3);
    Vec a(3);
    a << 1, 2, 2;
    struct Case {
      std::string name;
      ProfileFunction phi;
      Direction dir;
    };
    const std::vector<Case> cases{
        {"x3", ProfileFunction::affine(1.0, 0.0), Direction::axis(e, 2)},
        {"-xi+C", ProfileFunction::affine(-1.0, 5.0), Direction::normalized(a, e)},
        {"exp", ProfileFunction::exponential(1.0, 1.0), Direction::axis(e, 0)}};
    double worst = 0.0;
    for (const auto& c : cases) {
      const auto field = ScalarField::from_profile(c.phi, c.dir);
      const auto g = MetricField::conformally_flat(e, field);
      const auto grid = SampleGrid::quasi_random(Box::unit(3).translated(Vec::Constant(3, 0.5)),
                                                 {}, 50, 0.0, 1);
      for (const auto& x : grid.points()) {
        const auto b = curvature(g, x);
        worst = std::max(worst, (conformal_ricci_closed(field, e, x) - b.ricci).cwiseAbs().maxCoeff());
        worst = std::max(worst, std::abs(conformal_scalar_closed(c.phi, c.dir,
                                                                 xi_coordinate(x, c.dir)) -
                                         b.scalar));
      }
    }
    const Direction up = Direction::axis(e, 2);
    const auto h3 = MetricField::conformally_flat(
        e, ScalarField::from_profile(ProfileFunction::affine(1.0, 0.0), up));
    Vec x(3);
    x << 0.3, -0.2, 0.8;
    const double r_engine = scalar_curvature(h3, x);
    const double r_closed = conformal_scalar_closed(ProfileFunction::affine(1.0, 0.0), up, 0.8);
    v.detail << " max mismatch=" << worst << " H3 scalar=" << r_engine << " / " << r_closed;
    v.require(worst < 1e-8, "closed forms");
    v.require(std::abs(r_engine + 6.0) < 1e-8 && std::abs(r_closed + 6.0) < 1e-8, "H3 scalar");
  });

  run(8, "admissible G roots confirmed by exhaustive search", [](Verdict& v) {
    const int n = 3, m = 2;
    const double kl = -4.0, dphi = -1.0, phi = 5.0;
    const auto brute = oracle::brute_force_roots(phi, dphi, n, m, kl, -10.0, 10.0, 1e-4);
    ReducedParams p;
    p.n = n;
    p.m = m;
    p.kappa = 1;
    p.lambda = kl;
    const auto roots = admissible_initial_data(phi, dphi, p);
    v.detail << " search:";
    for (double g : brute) v.detail << ' ' << g;
    v.detail << " closed form:";
    for (double g : roots) v.detail << ' ' << g;
    v.require(brute.size() == 2 && roots.size() == 2, "root count");
    if (brute.size() == 2 && roots.size() == 2) {
      v.require(std::abs(brute[0] + 5.0) <= 1e-4 && std::abs(brute[1] - 1.0) <= 1e-4,
                "search near {-5, 1}");
      v.require(std::abs(roots[0] - brute[0]) <= 1e-4 && std::abs(roots[1] - brute[1]) <= 1e-4,
                "closed form matches search");
      v.require(std::abs(roots[0] + 5.0) < 1e-12 && std::abs(roots[1] - 1.0) < 1e-12,
                "closed form exact");
    }
  });

  run(9, "randomized property suite", [](Verdict& v) {
    const int cases = 100;
    const std::pair<const char*, props::Outcome> results[] = {
        {"fiber scaling", props::fiber_scaling(cases)},
        {"ricci symmetry", props::ricci_symmetry(cases)},
        {"fd vs analytic", props::fd_vs_analytic(cases)},
        {"G consistency", props::g_consistency(cases)}};
    for (const auto& [name, o] : results) {
      v.detail << ' ' << name << ' ' << o.failures << '/' << o.cases << " (worst " << o.worst
               << ");";
      v.require(o.cases >= cases && o.failures == 0, name);
    }
  });

  std::printf("%d of 9 failed\n", failures);
  return failures == 0 ? 0 : 1;
}
