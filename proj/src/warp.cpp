#include "warpcheck/warp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace warpcheck {

double default_tolerance(DerivativeMode mode) {
  return mode == DerivativeMode::analytic ? kAnalyticTolerance : kFiniteDifferenceTolerance;
}

EquationResidual make_equation(std::string label, std::vector<double> values,
                               double tolerance) {
  EquationResidual e{std::move(label), std::move(values), 0.0, tolerance};
  for (double v : e.values) {
    const double a = std::abs(v);
    if (std::isnan(a) || std::isnan(e.sup)) e.sup = std::numeric_limits<double>::quiet_NaN();
    else e.sup = std::max(e.sup, a);
  }
  return e;
}

bool ResidualReport::pass() const {
  if (!applicable) return false;
  return std::all_of(equations.begin(), equations.end(),
                     [](const EquationResidual& e) { return e.pass(); });
}

double ResidualReport::sup() const {
  double s = 0.0;
  for (const auto& e : equations) {
    if (std::isnan(e.sup)) return e.sup;
    s = std::max(s, e.sup);
  }
  return s;
}

const EquationResidual& ResidualReport::equation(std::string_view label) const {
  for (const auto& e : equations)
    if (e.label == label) return e;
  throw std::out_of_range("no equation labelled " + std::string(label));
}

bool ResidualReport::has_equation(std::string_view label) const {
  return std::any_of(equations.begin(), equations.end(),
                     [&](const EquationResidual& e) { return e.label == label; });
}

// ---------------------------------------------------------------------------
// Fibers

namespace {

MetricField scaled_metric(const MetricField& g, double factor) {
  auto comps = [g](const Vec& y) { return g.components(y); };
  auto scale = [factor](std::vector<Mat> v) {
    for (auto& m : v) m *= factor;
    return v;
  };
  if (g.mode() == DerivativeMode::finite_difference) {
    return MetricField(g.dim(), [comps, factor](const Vec& y) -> Mat { return factor * comps(y); },
                       g.domain());
  }
  return MetricField(
      g.dim(), [comps, factor](const Vec& y) -> Mat { return factor * comps(y); },
      [g, scale](const Vec& y) { return scale(g.d1(y)); },
      [g, scale](const Vec& y) { return scale(g.d2(y)); }, g.domain());
}

// Product over j < k of factors[j], with up to two indices replaced.
double angular_product(const std::vector<double>& s, int k, int p = -1, double sp = 0.0,
                       int q = -1, double sq = 0.0) {
  double out = 1.0;
  for (int j = 0; j < k; ++j) {
    if (j == p) out *= sp;
    else if (j == q) out *= sq;
    else out *= s[static_cast<std::size_t>(j)];
  }
  return out;
}

Constraint lift(const Constraint& c, int offset, int size) {
  return {c.label, [d = c.distance, offset, size](const Vec& x) {
            return d(x.segment(offset, size));
          }};
}

}  // namespace

FiberDescriptor FiberDescriptor::flat(const Signature& sig) {
  return {"flat", MetricField::flat(sig), 0.0, Box::unit(sig.dim())};
}

FiberDescriptor FiberDescriptor::sphere(int m) {
  if (m < 1) throw GeometryError("sphere fiber needs m >= 1");
  // g = diag(1, s_0, s_0 s_1, ...), s_j = sin^2(theta_j)
  struct Trig {
    std::vector<double> s, ds, dds;
  };
  auto trig = [m](const Vec& y) {
    Trig t;
    for (int j = 0; j < m; ++j) {
      t.s.push_back(std::sin(y[j]) * std::sin(y[j]));
      t.ds.push_back(std::sin(2.0 * y[j]));
      t.dds.push_back(2.0 * std::cos(2.0 * y[j]));
    }
    return t;
  };
  auto comps = [m, trig](const Vec& y) -> Mat {
    const Trig t = trig(y);
    Mat g = Mat::Zero(m, m);
    for (int k = 0; k < m; ++k) g(k, k) = angular_product(t.s, k);
    return g;
  };
  auto d1 = [m, trig](const Vec& y) {
    const Trig t = trig(y);
    std::vector<Mat> out(static_cast<std::size_t>(m), Mat::Zero(m, m));
    for (int p = 0; p < m; ++p)
      for (int k = p + 1; k < m; ++k)
        out[static_cast<std::size_t>(p)](k, k) =
            angular_product(t.s, k, p, t.ds[static_cast<std::size_t>(p)]);
    return out;
  };
  auto d2 = [m, trig](const Vec& y) {
    const Trig t = trig(y);
    std::vector<Mat> out(static_cast<std::size_t>(m * m), Mat::Zero(m, m));
    for (int p = 0; p < m; ++p) {
      for (int q = 0; q < m; ++q) {
        Mat& h = out[static_cast<std::size_t>(p * m + q)];
        for (int k = std::max(p, q) + 1; k < m; ++k) {
          h(k, k) = p == q ? angular_product(t.s, k, p, t.dds[static_cast<std::size_t>(p)])
                           : angular_product(t.s, k, p, t.ds[static_cast<std::size_t>(p)], q,
                                             t.ds[static_cast<std::size_t>(q)]);
        }
      }
    }
    return out;
  };
  Domain domain;
  for (int j = 0; j + 1 < m; ++j) {
    domain.push_back({"theta > 0", [j](const Vec& y) { return y[j]; }});
    domain.push_back({"theta < pi", [j](const Vec& y) { return M_PI - y[j]; }});
  }
  Box box{Vec::Constant(m, 1.0), Vec::Constant(m, 2.0)};
  return {"sphere", MetricField(m, comps, d1, d2, std::move(domain)),
          static_cast<double>(m - 1), box};
}

FiberDescriptor FiberDescriptor::hyperbolic(int m) {
  if (m < 1) throw GeometryError("hyperbolic fiber needs m >= 1");
  const Signature sig = Signature::euclidean(m);
  const Direction up = Direction::axis(sig, m - 1);
  Domain domain{half_space("y_m > 0", up, 0.0, -1.0)};
  MetricField metric = MetricField::conformally_flat(
      sig, ScalarField::from_profile(ProfileFunction::affine(1.0, 0.0), up), domain);
  Box box = Box::unit(m);
  box.lo[m - 1] = 0.5;
  box.hi[m - 1] = 1.5;
  return {"hyperbolic", std::move(metric), -static_cast<double>(m - 1), box};
}

FiberDescriptor FiberDescriptor::scaled(double c) const {
  if (!(c > 0.0)) throw GeometryError("fiber scale must be positive");
  return {name, scaled_metric(metric, c * c), mu_claim, box};
}

// ---------------------------------------------------------------------------
// Specs

void WarpedProductSpec::validate() const {
  if (n() < 3) throw GeometryError("warped product base needs n >= 3");
  if (m() < 2) throw GeometryError("warped product fiber needs m >= 2");
  if (base_box.dim() != n()) throw DimensionMismatch("base box dimension");
}

Domain WarpedProductSpec::base_domain() const {
  Domain d = base.domain();
  d.push_back({"f > 0", warp.value});
  return d;
}

Domain WarpedProductSpec::product_domain() const {
  Domain d;
  for (const auto& c : base_domain()) d.push_back(lift(c, 0, n()));
  for (const auto& c : fiber.metric.domain()) d.push_back(lift(c, n(), m()));
  return d;
}

WarpedProductSpec WarpedProductSpec::with_fiber_rescaled(double c) const {
  WarpedProductSpec s = *this;
  s.fiber = fiber.scaled(c);
  s.warp = warp.scaled(1.0 / c);
  return s;
}

WarpedProductSpec WarpedProductSpec::with_mode(DerivativeMode mode) const {
  if (mode == DerivativeMode::analytic) {
    if (base.mode() != mode || fiber.metric.mode() != mode)
      throw GeometryError("spec has no analytic derivative oracles");
    return *this;
  }
  WarpedProductSpec s = *this;
  s.base = base.with_mode(mode);
  s.fiber.metric = fiber.metric.with_mode(mode);
  s.warp = ScalarField::numeric(warp.value, base_domain());
  return s;
}

MetricField assemble_warped_metric(const WarpedProductSpec& spec) {
  spec.validate();
  const int n = spec.n();
  const int m = spec.m();
  const int dim = n + m;
  const MetricField base = spec.base;
  const MetricField fiber = spec.fiber.metric;
  const ScalarField f = spec.warp;

  auto warp_value = [f](const Vec& xb) {
    const double v = f.value(xb);
    if (!(v > 0.0)) {
      std::ostringstream os;
      os << "warping function not positive (f = " << v << ") at x = (" << xb.transpose() << ")";
      throw DomainError(os.str());
    }
    return v;
  };

  auto comps = [=](const Vec& x) -> Mat {
    const Vec xb = x.head(n);
    const double fv = warp_value(xb);
    Mat g = Mat::Zero(dim, dim);
    g.topLeftCorner(n, n) = base.components(xb);
    g.bottomRightCorner(m, m) = (fv * fv) * fiber.components(x.tail(m));
    return g;
  };

  Domain domain = spec.product_domain();
  if (base.mode() != DerivativeMode::analytic || fiber.mode() != DerivativeMode::analytic)
    return MetricField(dim, comps, std::move(domain)).with_product_split(n);

  auto d1 = [=](const Vec& x) {
    const Vec xb = x.head(n);
    const Vec y = x.tail(m);
    const double fv = warp_value(xb);
    const Vec df = f.gradient(xb);
    const Mat gt = fiber.components(y);
    const auto dgb = base.d1(xb);
    const auto dgt = fiber.d1(y);
    std::vector<Mat> out(static_cast<std::size_t>(dim), Mat::Zero(dim, dim));
    for (int k = 0; k < n; ++k) {
      Mat& o = out[static_cast<std::size_t>(k)];
      o.topLeftCorner(n, n) = dgb[static_cast<std::size_t>(k)];
      o.bottomRightCorner(m, m) = (2.0 * fv * df[k]) * gt;
    }
    for (int k = 0; k < m; ++k)
      out[static_cast<std::size_t>(n + k)].bottomRightCorner(m, m) =
          (fv * fv) * dgt[static_cast<std::size_t>(k)];
    return out;
  };

  auto d2 = [=](const Vec& x) {
    const Vec xb = x.head(n);
    const Vec y = x.tail(m);
    const double fv = warp_value(xb);
    const Vec df = f.gradient(xb);
    const Mat ddf = f.hessian(xb);
    const Mat gt = fiber.components(y);
    const auto dgt = fiber.d1(y);
    const auto ddgb = base.d2(xb);
    const auto ddgt = fiber.d2(y);
    std::vector<Mat> out(static_cast<std::size_t>(dim * dim), Mat::Zero(dim, dim));
    auto at = [&](int p, int q) -> Mat& { return out[static_cast<std::size_t>(p * dim + q)]; };
    for (int p = 0; p < n; ++p) {
      for (int q = 0; q < n; ++q) {
        at(p, q).topLeftCorner(n, n) = ddgb[static_cast<std::size_t>(p * n + q)];
        at(p, q).bottomRightCorner(m, m) = (2.0 * (df[p] * df[q] + fv * ddf(p, q))) * gt;
      }
      for (int q = 0; q < m; ++q) {
        const Mat mixed = (2.0 * fv * df[p]) * dgt[static_cast<std::size_t>(q)];
        at(p, n + q).bottomRightCorner(m, m) = mixed;
        at(n + q, p).bottomRightCorner(m, m) = mixed;
      }
    }
    for (int p = 0; p < m; ++p)
      for (int q = 0; q < m; ++q)
        at(n + p, n + q).bottomRightCorner(m, m) =
            (fv * fv) * ddgt[static_cast<std::size_t>(p * m + q)];
    return out;
  };

  return MetricField(dim, comps, d1, d2, std::move(domain)).with_product_split(n);
}

SampleGrid product_grid(const WarpedProductSpec& spec, int count, double margin,
                        std::uint64_t seed) {
  return SampleGrid::quasi_random(spec.product_box(), spec.product_domain(), count, margin,
                                  seed);
}

// ---------------------------------------------------------------------------
// Residuals

namespace {

struct EinsteinPoint {
  double all = 0.0;
  double horizontal = 0.0;
  double mixed = 0.0;
  double vertical = 0.0;
  double rg = 0.0;  // sum R_ij g_ij
  double gg = 0.0;  // sum g_ij g_ij
};

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

Vec base_part(const Vec& x, int n) { return x.size() == n ? x : Vec(x.head(n)); }

// Covariant Hessian of f: d_i d_j f - Gamma^k_ij d_k f.
Mat covariant_hessian(const Mat& partials, const Tensor3& gamma, const Vec& df) {
  const int n = static_cast<int>(df.size());
  Mat h = partials;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) h(i, j) -= gamma(k, i, j) * df[k];
  return h;
}

struct WarpAtPoint {
  CurvatureBundle base;
  double f;
  Vec df;       // partials
  Mat hessian;  // covariant
  double laplacian;
  double grad2;
};

WarpAtPoint warp_at(const WarpedProductSpec& spec, const Vec& xb) {
  WarpAtPoint w;
  w.base = curvature(spec.base, xb);
  w.f = spec.warp.value(xb);
  w.df = spec.warp.gradient(xb);
  w.hessian = covariant_hessian(spec.warp.hessian(xb), w.base.christoffel, w.df);
  w.laplacian = (w.base.inverse.array() * w.hessian.array()).sum();
  w.grad2 = w.df.dot(w.base.inverse * w.df);
  return w;
}

}  // namespace

ResidualReport einstein_residual(const MetricField& metric, double lambda,
                                 const SampleGrid& grid, double tolerance, Execution exec) {
  const auto split = metric.product_split();
  const auto& pts = grid.points();
  const auto per_point = evaluate_points<EinsteinPoint>(pts.size(), exec, [&](std::size_t i) {
    const Vec& x = pts[i];
    const CurvatureBundle b = curvature(metric, x);
    const Mat res = b.ricci - lambda * b.metric;
    EinsteinPoint p;
    p.all = max_abs(res);
    p.rg = (b.ricci.array() * b.metric.array()).sum();
    p.gg = b.metric.squaredNorm();
    if (split) {
      const int n = *split;
      const int m = metric.dim() - n;
      p.horizontal = max_abs(res.topLeftCorner(n, n));
      p.mixed = max_abs(res.topRightCorner(n, m));
      p.vertical = max_abs(res.bottomRightCorner(m, m));
    }
    return p;
  });

  ResidualReport report;
  auto column = [&](auto member) {
    std::vector<double> v;
    v.reserve(per_point.size());
    for (const auto& p : per_point) v.push_back(p.*member);
    return v;
  };
  report.equations.push_back(make_equation("einstein", column(&EinsteinPoint::all), tolerance));
  if (split) {
    report.equations.push_back(
        make_equation("horizontal", column(&EinsteinPoint::horizontal), tolerance));
    report.equations.push_back(make_equation("mixed", column(&EinsteinPoint::mixed), tolerance));
    report.equations.push_back(
        make_equation("vertical", column(&EinsteinPoint::vertical), tolerance));
  }
  double rg = 0.0;
  double gg = 0.0;
  for (const auto& p : per_point) {
    rg += p.rg;
    gg += p.gg;
  }
  if (gg > 0.0) report.best_fit_lambda = rg / gg;
  return report;
}

ResidualReport oneill_residuals(const WarpedProductSpec& spec, double lambda, double mu,
                                const SampleGrid& grid, double tolerance, Execution exec) {
  spec.validate();
  const int n = spec.n();
  const int m = spec.m();
  if (grid.dim() != n + m) throw DimensionMismatch("oneill_residuals needs product-chart points");
  struct Point {
    double base, fiber, scalar;
  };
  const auto& pts = grid.points();
  const auto per_point = evaluate_points<Point>(pts.size(), exec, [&](std::size_t i) {
    const Vec xb = pts[i].head(n);
    const Vec y = pts[i].tail(m);
    const WarpAtPoint w = warp_at(spec, xb);
    const Mat base_res = w.base.ricci - (m / w.f) * w.hessian - lambda * w.base.metric;
    const CurvatureBundle fb = curvature(spec.fiber.metric, y);
    const Mat fiber_res = fb.ricci - mu * fb.metric;
    const double scalar =
        w.f * w.laplacian + (m - 1) * w.grad2 + lambda * w.f * w.f - mu;
    return Point{max_abs(base_res), max_abs(fiber_res), scalar};
  });
  std::vector<double> b, f, s;
  for (const auto& p : per_point) {
    b.push_back(p.base);
    f.push_back(p.fiber);
    s.push_back(p.scalar);
  }
  ResidualReport report;
  report.equations.push_back(make_equation("base_block", std::move(b), tolerance));
  report.equations.push_back(make_equation("fiber_block", std::move(f), tolerance));
  report.equations.push_back(make_equation("warp_scalar", std::move(s), tolerance));
  return report;
}

ResidualReport scalar_identities(const WarpedProductSpec& spec, double lambda, double mu,
                                 const SampleGrid& grid, double tolerance, Execution exec) {
  spec.validate();
  const int n = spec.n();
  const int m = spec.m();
  struct Point {
    double contracted, gradient, divergence;
  };
  const auto& pts = grid.points();
  const auto per_point = evaluate_points<Point>(pts.size(), exec, [&](std::size_t i) {
    const Vec xb = base_part(pts[i], n);
    const WarpAtPoint w = warp_at(spec, xb);
    const double r = w.base.scalar;
    const double f = w.f;
    Point p;
    p.contracted = r * f * f - m * f * w.laplacian - n * f * f * lambda;
    p.gradient = w.grad2 + (lambda * (m - n) + r) / (m * (m - 1.0)) * f * f - mu / (m - 1.0);

    // div X for X^i = f g^ij f_j, through raw partials and Gamma^i_ik.
    const auto dg = spec.base.d1(xb);
    const Mat& ginv = w.base.inverse;
    const Vec up = ginv * w.df;
    const Mat partials = spec.warp.hessian(xb);
    double div = 0.0;
    for (int a = 0; a < n; ++a) {
      const Mat dginv = -ginv * dg[static_cast<std::size_t>(a)] * ginv;
      div += w.df[a] * up[a] + f * dginv.row(a).dot(w.df) + f * ginv.row(a).dot(partials.col(a));
      for (int k = 0; k < n; ++k) div += w.base.christoffel(a, a, k) * f * up[k];
    }
    p.divergence = div + (m - 2) * w.grad2 + lambda * f * f - mu;
    return p;
  });
  std::vector<double> c, g, d;
  for (const auto& p : per_point) {
    c.push_back(p.contracted);
    g.push_back(p.gradient);
    d.push_back(p.divergence);
  }
  ResidualReport report;
  report.equations.push_back(make_equation("contracted_base", std::move(c), tolerance));
  report.equations.push_back(make_equation("gradient_identity", std::move(g), tolerance));
  report.equations.push_back(make_equation("divergence_identity", std::move(d), tolerance));
  return report;
}

const char* to_string(ObstructionVerdict verdict) {
  switch (verdict) {
    case ObstructionVerdict::admissible: return "admissible";
    case ObstructionVerdict::boundary: return "boundary";
    case ObstructionVerdict::trivial_warping: return "warping must be trivial (mu=0 case)";
  }
  return "?";
}

ObstructionMargin obstruction_margin(double scalar, double lambda, int n, int m) {
  const double margin = lambda * (n - m) - scalar;
  if (margin > 0.0) return {margin, ObstructionVerdict::admissible};
  if (margin == 0.0) return {margin, ObstructionVerdict::boundary};
  return {margin, ObstructionVerdict::trivial_warping};
}

ResidualReport bochner_identities(const WarpedProductSpec& spec, const SampleGrid& grid,
                                  double tolerance, Execution exec) {
  spec.validate();
  const int n = spec.n();
  const int m = spec.m();
  const double lambda = spec.lambda_claim;
  const auto& pts = grid.points();

  ResidualReport report;
  const auto scalars = evaluate_points<double>(pts.size(), exec, [&](std::size_t i) {
    return scalar_curvature(spec.base, base_part(pts[i], n));
  });
  if (scalars.empty()) {
    report.applicable = false;
    report.note = "empty grid";
    return report;
  }
  const auto [lo, hi] = std::minmax_element(scalars.begin(), scalars.end());
  const double r = 0.5 * (*lo + *hi);
  const double scale = std::max(1.0, std::abs(r));
  if (*hi - *lo > tolerance * scale || std::abs(lambda - r / (n - 1)) > tolerance * scale) {
    report.applicable = false;
    std::ostringstream os;
    os << "not applicable: requires constant R and lambda = R/(n-1); R in [" << *lo << ", "
       << *hi << "], lambda = " << lambda << ", R/(n-1) = " << r / (n - 1);
    report.note = os.str();
    return report;
  }

  const Domain domain = spec.base_domain();
  auto grad2_at = [&](const Vec& xb) { return warp_at(spec, xb).grad2; };
  auto laplacian_at = [&](const Vec& xb) { return warp_at(spec, xb).laplacian; };

  struct Point {
    double laplacian, ricci_gradient, bochner, hessian_norm, ricci_norm;
  };
  const double c = 1.0 / (m * (n - 1.0));
  const auto per_point = evaluate_points<Point>(pts.size(), exec, [&](std::size_t i) {
    const Vec xb = base_part(pts[i], n);
    const WarpAtPoint w = warp_at(spec, xb);
    const Mat& ginv = w.base.inverse;
    const Vec up = ginv * w.df;
    const double rs = w.base.scalar;
    const double ric_grad = up.dot(w.base.ricci * up);
    const double hess2 = (ginv * w.hessian * ginv * w.hessian.transpose()).trace();
    const double ric2 = (ginv * w.base.ricci * ginv * w.base.ricci.transpose()).trace();

    const Vec dh = fd_gradient(grad2_at, xb, domain);
    const Mat hh = covariant_hessian(fd_hessian(grad2_at, xb, domain), w.base.christoffel, dh);
    const double lap_grad2 = (ginv.array() * hh.array()).sum();
    const Vec dlap = fd_gradient(laplacian_at, xb, domain);

    Point p;
    p.laplacian = -w.laplacian - rs * w.f * c;
    p.ricci_gradient = ric_grad;
    p.bochner = 0.5 * lap_grad2 - hess2 - ric_grad - up.dot(dlap);
    p.hessian_norm = hess2 - rs * rs * w.f * w.f * c * c;
    p.ricci_norm = ric2 - rs * rs / (n - 1);
    return p;
  });
  auto column = [&](auto member) {
    std::vector<double> v;
    for (const auto& p : per_point) v.push_back(p.*member);
    return v;
  };
  report.equations.push_back(make_equation("laplacian", column(&Point::laplacian), tolerance));
  report.equations.push_back(
      make_equation("ricci_gradient", column(&Point::ricci_gradient), tolerance));
  report.equations.push_back(make_equation(
      "bochner", column(&Point::bochner), std::max(tolerance, kFiniteDifferenceTolerance)));
  report.equations.push_back(
      make_equation("hessian_norm", column(&Point::hessian_norm), tolerance));
  report.equations.push_back(make_equation("ricci_norm", column(&Point::ricci_norm), tolerance));
  return report;
}

}  // namespace warpcheck
