#include "warpcheck/reduction.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint/stepper/runge_kutta4.hpp>

#include <algorithm>
#include <cmath>
#include <memory>
#include <ostream>
#include <sstream>

namespace warpcheck {

void ReducedParams::validate() const {
  if (n < 3) throw GeometryError("reduced system needs n >= 3");
  if (m < 2) throw GeometryError("reduced system needs m >= 2");
  if (kappa != 1 && kappa != -1)
    throw GeometryError("reduced system needs kappa = +1 or -1 (lightlike directions excluded)");
  if (g_sign != 1 && g_sign != -1) throw GeometryError("g_sign must be +1 or -1");
}

Evolution evolution(const ReducedState& s, const ReducedParams& p) {
  const double dG = ((p.n - 1) * s.G * s.dphi - p.m * s.G * s.G - p.kappa_lambda()) / s.phi;
  const double ddphi =
      p.m * (dG * s.phi + s.G * s.dphi + s.G * s.G) / ((p.n - 2) * s.phi);
  return {ddphi, dG};
}

double constraint_monitor(const ReducedState& s, const ReducedParams& p) {
  const double ddphi = evolution(s, p).ddphi;
  return s.phi * ddphi - (p.n - 1) * s.dphi * s.dphi + p.m * s.G * s.dphi - p.kappa_lambda();
}

double G_of(double lambda, double rbar, int kappa, int n, int m, int g_sign) {
  if (m < 2) throw GeometryError("G_of needs m >= 2");
  const double radicand = kappa * (lambda * (n - m) - rbar) / (m * (m - 1.0));
  // absorb rounding of an exact zero radicand
  const double slack = 1e-12 * std::max({1.0, std::abs(lambda * (n - m)), std::abs(rbar)});
  if (radicand < -slack) {
    std::ostringstream os;
    os << "negative radicand " << radicand << " for lambda = " << lambda << ", Rbar = " << rbar
       << ", kappa = " << kappa;
    throw NegativeRadicand(os.str());
  }
  return (g_sign < 0 ? -1.0 : 1.0) * std::sqrt(std::max(0.0, radicand));
}

// ---------------------------------------------------------------------------

namespace {

void require_nonvanishing(const ProfileFunction& phi, double a, double b) {
  constexpr int kSamples = 128;
  const double ref = phi(a);
  for (int i = 0; i <= kSamples; ++i) {
    const double xi = a + (b - a) * i / kSamples;
    if (!phi.domain().contains(xi))
      throw DomainError("warp_from_G: integration interval leaves the profile domain");
    const double v = phi(xi);
    if (v == 0.0 || !std::isfinite(v) || (v > 0) != (ref > 0)) {
      std::ostringstream os;
      os << "warp_from_G: phi vanishes in [" << std::min(a, b) << ", " << std::max(a, b)
         << "] near xi = " << xi;
      throw DomainError(os.str());
    }
  }
}

double integrate_ratio(const ProfileFunction& phi, const ProfileFunction& G, double a, double b) {
  if (a == b) return 0.0;
  auto ratio = [&](double t) { return G(t) / phi(t); };
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 31>::integrate(ratio, a, b, 15, 1e-14);
}

}  // namespace

WarpFromG warp_from_G(const ProfileFunction& phi, const ProfileFunction& G, double theta,
                      double xi0, double xi) {
  if (!(theta > 0.0)) throw GeometryError("warp_from_G: theta must be positive");
  require_nonvanishing(phi, xi0, xi);
  const double integral = integrate_ratio(phi, G, xi0, xi);
  return {theta * std::exp(integral), G(xi) / phi(xi)};
}

ProfileFunction warp_profile(const ProfileFunction& phi, const ProfileFunction& G, double theta,
                             double xi0) {
  if (!(theta > 0.0)) throw GeometryError("warp_profile: theta must be positive");
  auto p = std::make_shared<const ProfileFunction>(phi);
  auto g = std::make_shared<const ProfileFunction>(G);
  auto value = [p, g, theta, xi0](double xi) {
    return warp_from_G(*p, *g, theta, xi0, xi).value;
  };
  auto d1 = [p, g, value](double xi) { return value(xi) * (*g)(xi) / (*p)(xi); };
  // f''/f = (G/phi)^2 + G'/phi - G phi'/phi^2
  auto d2 = [p, g, value](double xi) {
    const double ph = (*p)(xi);
    const double r = (*g)(xi) / ph;
    return value(xi) * (r * r + g->d1(xi) / ph - r * p->d1(xi) / ph);
  };
  return ProfileFunction(value, d1, d2, phi.domain());
}

Residuals3 ode_residuals_general(const ProfileFunction& phi, const ProfileFunction& f,
                                 const ReducedParams& p, double xi) {
  const double u = phi(xi), du = phi.d1(xi), ddu = phi.d2(xi);
  const double w = f(xi), dw = f.d1(xi), ddw = f.d2(xi);
  const int n = p.n, m = p.m;
  const double kl = p.kappa_lambda();
  return {(n - 2) * w * ddu - m * ddw * u - 2 * m * du * dw,
          w * u * ddu - (n - 1) * w * du * du + m * u * du * dw - kl * w,
          (n - 2) * w * u * du * dw - (m - 1) * u * u * dw * dw - w * ddw * u * u - kl * w * w};
}

Residuals3 ode_residuals_reduced(const ProfileFunction& phi, const ProfileFunction& G,
                                 const ReducedParams& p, double xi) {
  const double u = phi(xi), du = phi.d1(xi), ddu = phi.d2(xi);
  const double g = G(xi), dg = G.d1(xi);
  const double dgu = dg * u + g * du;  // (G phi)'
  const int n = p.n, m = p.m;
  const double kl = p.kappa_lambda();
  return {(n - 2) * u * ddu - m * dgu - m * g * g,
          u * ddu - (n - 1) * du * du + m * g * du - kl,
          n * g * du - dgu - m * g * g - kl};
}

Residuals3 ode_residuals_constantR(const ProfileFunction& phi, double G, const ReducedParams& p,
                                   double xi) {
  const double u = phi(xi), du = phi.d1(xi), ddu = phi.d2(xi);
  const int n = p.n, m = p.m;
  const double kl = p.kappa_lambda();
  return {(n - 2) * u * ddu - m * G * du - m * G * G,
          u * ddu - (n - 1) * du * du + m * G * du - kl,
          (n - 1) * G * du - m * G * G - kl};
}

double admissibility_quadratic(double dphi0, double G0, const ReducedParams& p) {
  const int n = p.n, m = p.m;
  return m * (m - 1.0) * G0 * G0 - 2.0 * m * (n - 1) * dphi0 * G0 +
         (n - 2.0) * (n - 1) * dphi0 * dphi0 + (m + n - 2.0) * p.kappa_lambda();
}

std::vector<double> admissible_initial_data(double phi0, double dphi0, const ReducedParams& p) {
  p.validate();
  if (phi0 == 0.0) throw GeometryError("admissible_initial_data: phi0 must be nonzero");
  const int n = p.n, m = p.m;
  const double a = m * (m - 1.0);
  const double b = -2.0 * m * (n - 1) * dphi0;
  const double c = (n - 2.0) * (n - 1) * dphi0 * dphi0 + (m + n - 2.0) * p.kappa_lambda();
  const double disc = b * b - 4.0 * a * c;
  const double scale = b * b + std::abs(4.0 * a * c);
  if (disc < -1e-14 * scale) return {};
  if (disc <= 1e-14 * scale) return {-b / (2.0 * a)};
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (b + (b >= 0 ? sq : -sq));
  std::vector<double> roots{q / a, c / q};
  std::sort(roots.begin(), roots.end());
  return roots;
}

// ---------------------------------------------------------------------------

const char* to_string(HaltReason reason) {
  switch (reason) {
    case HaltReason::none: return "none";
    case HaltReason::singularity: return "singularity";
    case HaltReason::monitor_exceeded: return "monitor_exceeded";
    case HaltReason::non_finite: return "non_finite";
  }
  return "?";
}

double Trajectory::xi_min() const {
  return std::min(states.front().xi, states.back().xi);
}

double Trajectory::xi_max() const {
  return std::max(states.front().xi, states.back().xi);
}

ReducedState Trajectory::at(double xi) const {
  if (states.empty()) throw DomainError("empty trajectory");
  if (xi < xi_min() || xi > xi_max()) {
    std::ostringstream os;
    os << "xi = " << xi << " outside trajectory range [" << xi_min() << ", " << xi_max() << "]";
    throw DomainError(os.str());
  }
  if (states.size() == 1) return states.front();
  const bool forward = states.back().xi > states.front().xi;
  auto it = std::lower_bound(states.begin(), states.end(), xi,
                             [forward](const ReducedState& s, double v) {
                               return forward ? s.xi < v : s.xi > v;
                             });
  std::size_t k1 = static_cast<std::size_t>(std::distance(states.begin(), it));
  k1 = std::clamp<std::size_t>(k1, 1, states.size() - 1);
  const ReducedState& a = states[k1 - 1];
  const ReducedState& b = states[k1];
  const double dx = b.xi - a.xi;
  const double t = (xi - a.xi) / dx;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  const Evolution ea = evolution(a, params);
  const Evolution eb = evolution(b, params);
  auto hermite = [&](double y0, double m0, double y1, double m1) {
    return h00 * y0 + h10 * dx * m0 + h01 * y1 + h11 * dx * m1;
  };
  return {xi, hermite(a.phi, a.dphi, b.phi, b.dphi), hermite(a.dphi, ea.ddphi, b.dphi, eb.ddphi),
          hermite(a.G, ea.dG, b.G, eb.dG)};
}

ProfileFunction Trajectory::phi_profile() const {
  auto self = std::make_shared<const Trajectory>(*this);
  return ProfileFunction([self](double xi) { return self->at(xi).phi; },
                         [self](double xi) { return self->at(xi).dphi; },
                         [self](double xi) { return evolution(self->at(xi), self->params).ddphi; },
                         Interval{xi_min(), xi_max()});
}

ProfileFunction Trajectory::G_profile() const {
  auto self = std::make_shared<const Trajectory>(*this);
  auto dG = [self](double xi) { return evolution(self->at(xi), self->params).dG; };
  auto ddG = [self, dG](double xi) {
    const double h = fd_step_first(xi);
    const double lo = std::max(self->xi_min(), xi - h);
    const double hi = std::min(self->xi_max(), xi + h);
    return (dG(hi) - dG(lo)) / (hi - lo);
  };
  return ProfileFunction([self](double xi) { return self->at(xi).G; }, dG, ddG,
                         Interval{xi_min(), xi_max()});
}

namespace {

using OdeState = std::array<double, 3>;  // phi, phi', G

struct ReducedSystem {
  ReducedParams params;
  void operator()(const OdeState& y, OdeState& dydx, double xi) const {
    const Evolution e = evolution({xi, y[0], y[1], y[2]}, params);
    dydx = {y[1], e.ddphi, e.dG};
  }
};

Trajectory run_fixed_step(const ReducedState& initial, const ReducedParams& params, double step,
                          double xi_end, const IntegrationOptions& options) {
  Trajectory traj;
  traj.params = params;
  const double span = xi_end - initial.xi;
  const auto steps = static_cast<long>(std::max(1.0, std::ceil(std::abs(span) / step - 1e-9)));
  const double h = span / static_cast<double>(steps);
  traj.step = std::abs(h);

  const double threshold = options.singular_ratio * std::abs(initial.phi);
  boost::numeric::odeint::runge_kutta4<OdeState> stepper;
  const ReducedSystem system{params};

  OdeState y{initial.phi, initial.dphi, initial.G};
  traj.states.push_back(initial);
  traj.monitor.push_back(constraint_monitor(initial, params));

  for (long k = 1; k <= steps; ++k) {
    const double xi_prev = initial.xi + static_cast<double>(k - 1) * h;
    const double xi = initial.xi + static_cast<double>(k) * h;
    const double phi_prev = y[0];
    stepper.do_step(system, y, xi_prev, h);
    const ReducedState s{xi, y[0], y[1], y[2]};
    const bool finite = std::isfinite(y[0]) && std::isfinite(y[1]) && std::isfinite(y[2]);
    std::ostringstream os;
    if (std::abs(y[0]) < threshold ||
        (!finite && std::abs(phi_prev) < 1e-2 * std::abs(initial.phi))) {
      traj.halt = HaltReason::singularity;
      os << "singularity: phi -> 0 (pole of f) near xi = " << xi;
    } else if (!finite) {
      traj.halt = HaltReason::non_finite;
      os << "non-finite state at xi = " << xi;
    } else {
      const double mon = constraint_monitor(s, params);
      if (!(std::abs(mon) <= options.monitor_bound)) {
        traj.halt = HaltReason::monitor_exceeded;
        os << "constraint monitor " << mon << " exceeds bound " << options.monitor_bound
           << " at xi = " << xi;
      } else {
        traj.states.push_back(s);
        traj.monitor.push_back(mon);
        continue;
      }
    }
    traj.halt_xi = xi;
    traj.diagnostic = os.str();
    break;
  }
  return traj;
}

}  // namespace

Trajectory integrate_reduced(const ReducedState& initial, const ReducedParams& params, double step,
                             double xi_end, const IntegrationOptions& options) {
  params.validate();
  if (!(step > 0.0)) throw GeometryError("integrate_reduced: step must be positive");
  if (xi_end == initial.xi) throw GeometryError("integrate_reduced: empty span");
  if (initial.phi == 0.0) throw InadmissibleInitialData("initial phi must be nonzero");

  const double q = admissibility_quadratic(initial.dphi, initial.G, params);
  const int n = params.n, m = params.m;
  const double scale =
      std::max({1.0, m * (m - 1.0) * initial.G * initial.G,
                std::abs(2.0 * m * (n - 1) * initial.dphi * initial.G),
                (n - 2.0) * (n - 1) * initial.dphi * initial.dphi,
                std::abs((m + n - 2.0) * params.kappa_lambda())});
  if (std::abs(q) > options.admissibility_tolerance * scale) {
    std::ostringstream os;
    os << "initial data violates the admissibility constraint (residual " << q
       << "); admissible G0: ";
    for (double r : admissible_initial_data(initial.phi, initial.dphi, params)) os << r << ' ';
    throw InadmissibleInitialData(os.str());
  }

  Trajectory traj = run_fixed_step(initial, params, step, xi_end, options);
  if (options.estimate_error) {
    const Trajectory half = run_fixed_step(initial, params, 0.5 * step, xi_end, options);
    double err = 0.0;
    for (std::size_t k = 0; k < traj.states.size() && 2 * k < half.states.size(); ++k)
      err = std::max(err, std::abs(traj.states[k].phi - half.states[2 * k].phi));
    traj.error_estimate = err;
  }
  return traj;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& t) {
  os << "xi,phi,dphi,G,monitor\n";
  os.precision(17);
  for (std::size_t k = 0; k < t.states.size(); ++k) {
    const auto& s = t.states[k];
    os << s.xi << ',' << s.phi << ',' << s.dphi << ',' << s.G << ',' << t.monitor[k] << '\n';
  }
}

// ---------------------------------------------------------------------------

WarpedProductSpec lift_spec(const Trajectory& trajectory, double theta,
                            const FiberDescriptor& fiber, const Direction& dir) {
  const ReducedParams& p = trajectory.params;
  if (trajectory.states.size() < 2) throw GeometryError("lift_spec: trajectory too short");
  if (dir.dim() != p.n) throw DimensionMismatch("lift_spec: direction dimension != n");
  if (std::abs(dir.kappa() - p.kappa) > 1e-12)
    throw GeometryError("lift_spec: direction kappa differs from the trajectory's kappa");
  if (fiber.mu_claim != 0.0) throw GeometryError("lift_spec: fiber must be Ricci-flat");

  const ProfileFunction phi = trajectory.phi_profile();
  const ProfileFunction G = trajectory.G_profile();
  const ProfileFunction f = warp_profile(phi, G, theta, trajectory.states.front().xi);

  const double lo = trajectory.xi_min();
  const double hi = trajectory.xi_max();
  Domain domain{half_space("xi < trajectory end", dir, hi, 1.0),
                half_space("xi > trajectory start", dir, lo, -1.0)};

  WarpedProductSpec spec{
      MetricField::conformally_flat(dir.signature(), ScalarField::from_profile(phi, dir), domain),
      fiber, ScalarField::from_profile(f, dir), p.lambda, Box::unit(p.n)};

  const Vec& alpha = dir.alpha();
  const double l1 = alpha.cwiseAbs().sum();
  const double mid = 0.5 * (lo + hi);
  const Vec center = alpha * (mid / alpha.squaredNorm());
  const double half_width = std::min(0.5, 0.4 * (hi - lo) / l1);
  spec.base_box = {center.array() - half_width, center.array() + half_width};
  return spec;
}

ResidualReport lift_and_verify(const Trajectory& trajectory, double theta,
                               const FiberDescriptor& fiber, const Direction& dir,
                               const SampleGrid& grid, double tolerance,
                               std::optional<double> lambda, Execution exec) {
  const WarpedProductSpec spec = lift_spec(trajectory, theta, fiber, dir);
  const MetricField metric = assemble_warped_metric(spec);
  ResidualReport report =
      einstein_residual(metric, lambda.value_or(trajectory.params.lambda), grid, tolerance, exec);
  if (trajectory.halted()) report.note = "trajectory halted: " + trajectory.diagnostic;
  return report;
}

}  // namespace warpcheck
