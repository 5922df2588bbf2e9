#pragma once

// Randomized property sweeps shared by the unit tests and the acceptance run.
// Each returns how many cases it ran and how many failed.

#include "oracles.hpp"
#include "warpcheck/catalog.hpp"
#include "warpcheck/reduction.hpp"

namespace props {

using namespace warpcheck;

struct Outcome {
  int cases = 0;
  int failures = 0;
  double worst = 0.0;
};

inline Direction random_direction(int n) {
  for (;;) {
    std::vector<int> eps(static_cast<std::size_t>(n), 1);
    for (int i = 1; i < n; ++i)
      if (oracle::uniform(0, 1) < 0.2) eps[static_cast<std::size_t>(i)] = -1;
    const Signature sig(eps);
    Vec a(n);
    for (int i = 0; i < n; ++i) a[i] = oracle::uniform(-1, 1);
    if (std::abs(kappa(a, sig)) > 0.1) return Direction::normalized(a, sig);
  }
}

inline FiberDescriptor random_fiber(int m) {
  switch (oracle::uniform_int(0, 2)) {
    case 0: return FiberDescriptor::flat(Signature::euclidean(m));
    case 1: return FiberDescriptor::sphere(m);
    default: return FiberDescriptor::hyperbolic(m);
  }
}

inline double random_G() {
  const double g = oracle::uniform(0.3, 2.0);
  return oracle::uniform(0, 1) < 0.5 ? -g : g;
}

// Affine-conformal base with a random direction and a random Einstein fiber.
inline WarpedProductSpec random_spec() {
  const int n = oracle::uniform_int(3, 4);
  const int m = oracle::uniform_int(2, 3);
  auto e = affine_conformal(m, random_G(), oracle::uniform(-3, 3), oracle::uniform(0.5, 3),
                            random_direction(n));
  e.spec.fiber = random_fiber(m);
  return e.spec;
}

inline Vec random_point(const WarpedProductSpec& spec) {
  return product_grid(spec, 1, 0.1, static_cast<std::uint64_t>(oracle::uniform_int(0, 1 << 20)))
      .points()
      .front();
}

inline double scale_of(const Mat& m) { return std::max(1.0, m.cwiseAbs().maxCoeff()); }

// Rescaling the fiber by c = 2^k and the warp by 1/c reproduces the assembled
// metric, its derivatives and its Ricci tensor exactly; other factors agree
// to rounding.
inline Outcome fiber_scaling(int cases) {
  Outcome o;
  for (int i = 0; i < cases; ++i, ++o.cases) {
    const auto spec = random_spec();
    const int k = oracle::uniform_int(1, 3) * (oracle::uniform(0, 1) < 0.5 ? -1 : 1);
    const double c = std::ldexp(1.0, k);
    const auto a = assemble_warped_metric(spec);
    const auto b = assemble_warped_metric(spec.with_fiber_rescaled(c));
    const Vec x = random_point(spec);
    bool same = a.components(x) == b.components(x);
    const auto da = a.d1(x), db = b.d1(x);
    const auto dda = a.d2(x), ddb = b.d2(x);
    for (std::size_t j = 0; j < da.size(); ++j) same = same && da[j] == db[j];
    for (std::size_t j = 0; j < dda.size(); ++j) same = same && dda[j] == ddb[j];
    same = same && ricci(a, x) == ricci(b, x);

    const double c2 = oracle::uniform(0.3, 3.0);
    const auto r = assemble_warped_metric(spec.with_fiber_rescaled(c2));
    const double rel = (r.components(x) - a.components(x)).cwiseAbs().maxCoeff() /
                       scale_of(a.components(x));
    o.worst = std::max(o.worst, rel);
    if (!same || rel > 1e-14) ++o.failures;
  }
  return o;
}

inline Outcome ricci_symmetry(int cases) {
  Outcome o;
  for (int i = 0; i < cases; ++i, ++o.cases) {
    const auto spec = random_spec();
    const auto g = assemble_warped_metric(spec);
    const Vec x = random_point(spec);
    const Mat ric = ricci(g, x);
    const Mat base = ricci(spec.base, x.head(spec.n()));
    const double asym =
        std::max((ric - ric.transpose()).cwiseAbs().maxCoeff() / scale_of(ric),
                 (base - base.transpose()).cwiseAbs().maxCoeff() / scale_of(base));
    o.worst = std::max(o.worst, asym);
    if (asym > 1e-12) ++o.failures;
  }
  return o;
}

// Relative disagreement of first and second metric derivatives and of the
// Ricci tensor between the analytic and finite-difference engines.
inline Outcome fd_vs_analytic(int cases) {
  Outcome o;
  for (int i = 0; i < cases; ++i, ++o.cases) {
    const auto spec = random_spec();
    const auto a = assemble_warped_metric(spec);
    const auto f = a.with_mode(DerivativeMode::finite_difference);
    const Vec x = random_point(spec);
    const auto d1a = a.d1(x), d1f = f.d1(x);
    const auto d2a = a.d2(x), d2f = f.d2(x);
    double err = 0.0;
    for (std::size_t j = 0; j < d1a.size(); ++j)
      err = std::max(err, (d1a[j] - d1f[j]).cwiseAbs().maxCoeff() / scale_of(d1a[j]));
    for (std::size_t j = 0; j < d2a.size(); ++j)
      err = std::max(err, (d2a[j] - d2f[j]).cwiseAbs().maxCoeff() / scale_of(d2a[j]));
    const Mat ra = ricci(a, x), rf = ricci(f, x);
    err = std::max(err, (ra - rf).cwiseAbs().maxCoeff() / scale_of(ra));
    o.worst = std::max(o.worst, err);
    if (err > 1e-4) ++o.failures;
  }
  return o;
}

// G from the scalar-curvature formula equals the integrated G along random
// affine-family trajectories (and the constant one), checked every 10 steps.
inline Outcome g_consistency(int cases) {
  Outcome o;
  for (int i = 0; i <= cases; ++i, ++o.cases) {
    ReducedParams p;
    ReducedState s0;
    if (i == cases) {
      s0 = {0.0, oracle::uniform(0.5, 3), 0.0, 0.0};
    } else {
      p.n = oracle::uniform_int(3, 5);
      p.m = oracle::uniform_int(2, 4);
      p.kappa = oracle::uniform(0, 1) < 0.5 ? -1 : 1;
      const double G = random_G();
      p.lambda = -(p.m + p.n - 1.0) * p.kappa * G * G;
      s0 = {oracle::uniform(-1, 1), oracle::uniform(1, 5), -G, G};
    }
    p.g_sign = s0.G < 0 ? -1 : 1;
    // move so that |phi| grows
    const double end = s0.xi + (s0.dphi > 0 ? 2.0 : -2.0);
    const auto t = integrate_reduced(s0, p, 1e-2, end);
    if (t.halted()) {
      ++o.failures;
      continue;
    }
    bool ok = true;
    for (std::size_t k = 0; k < t.states.size(); k += 10) {
      const auto& s = t.states[k];
      const double ddphi = evolution(s, p).ddphi;
      const double rbar = (p.n - 1) * (2 * s.phi * ddphi - p.n * s.dphi * s.dphi) * p.kappa;
      const double err = std::abs(G_of(p.lambda, rbar, p.kappa, p.n, p.m, p.g_sign) - s.G) /
                         std::max(1.0, std::abs(s.G));
      o.worst = std::max(o.worst, err);
      ok = ok && err <= 1e-8;
    }
    if (!ok) ++o.failures;
  }
  return o;
}

}  // namespace props
