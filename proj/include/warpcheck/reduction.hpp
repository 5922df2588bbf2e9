#pragma once

// Translation-invariant reduction: phi and f depend on xi = alpha . x only,
// and the Einstein condition with a Ricci-flat fiber becomes an ODE system in
// (phi, G) with f' / f = G / phi.

#include "warpcheck/warp.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace warpcheck {

/// kappa [lambda (n - m) - Rbar] < 0: no real invariant solution for these data.
class NegativeRadicand : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class InadmissibleInitialData : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

struct ReducedParams {
  int n = 3;
  int m = 2;
  double lambda = 0.0;
  int kappa = 1;
  /// Branch of the +- in G.
  int g_sign = 1;

  /// n >= 3, m >= 2, kappa = +-1 (the lightlike case is not reduced here).
  void validate() const;
  double kappa_lambda() const { return kappa * lambda; }
};

struct ReducedState {
  double xi = 0.0;
  double phi = 1.0;
  double dphi = 0.0;
  double G = 0.0;
};

/// phi'' and G' solved from the first and third reduced equations.
struct Evolution {
  double ddphi;
  double dG;
};

Evolution evolution(const ReducedState& s, const ReducedParams& p);

/// Second reduced equation, which contains no G': the algebraic constraint.
double constraint_monitor(const ReducedState& s, const ReducedParams& p);

/// g_sign * sqrt(kappa [lambda (n - m) - Rbar] / (m (m - 1))).
double G_of(double lambda, double rbar, int kappa, int n, int m, int g_sign = 1);

struct WarpFromG {
  double value;
  /// f'/f, which equals G/phi.
  double log_derivative;
};

/// f(xi) = theta exp(int_{xi0}^{xi} G/phi) by adaptive Gauss-Kronrod
/// quadrature. theta is the value of f at xi0.
WarpFromG warp_from_G(const ProfileFunction& phi, const ProfileFunction& G, double theta,
                      double xi0, double xi);

/// The same warping function as a profile with analytic f' and f''.
ProfileFunction warp_profile(const ProfileFunction& phi, const ProfileFunction& G,
                             double theta, double xi0);

using Residuals3 = std::array<double, 3>;

/// The phi-f system for a Ricci-flat fiber:
///   (n-2) f phi'' - m f'' phi - 2 m phi' f' = 0
///   f phi phi'' - (n-1) f phi'^2 + m phi phi' f' = kappa lambda f
///   (n-2) f phi phi' f' - (m-1) phi^2 f'^2 - f f'' phi^2 = kappa lambda f^2
Residuals3 ode_residuals_general(const ProfileFunction& phi, const ProfileFunction& f,
                                 const ReducedParams& p, double xi);

/// The phi-G system:
///   (n-2) phi phi'' - m (G phi)' = m G^2
///   phi phi'' - (n-1) phi'^2 + m G phi' = kappa lambda
///   n G phi' - (G phi)' - m G^2 = kappa lambda
Residuals3 ode_residuals_reduced(const ProfileFunction& phi, const ProfileFunction& G,
                                 const ReducedParams& p, double xi);

/// Constant-Rbar specialization (G constant).
Residuals3 ode_residuals_constantR(const ProfileFunction& phi, double G, const ReducedParams& p,
                                   double xi);

/// m(m-1) G^2 - 2m(n-1) phi' G + (n-2)(n-1) phi'^2 + (m+n-2) kappa lambda.
/// Obtained by eliminating phi'' between the first two reduced equations,
/// with G' removed through the third.
double admissibility_quadratic(double dphi0, double G0, const ReducedParams& p);

/// Real roots of admissibility_quadratic in G, ascending; a double root is
/// reported once and an empty vector means no admissible G.
std::vector<double> admissible_initial_data(double phi0, double dphi0, const ReducedParams& p);

struct IntegrationOptions {
  /// Accepted steps keep |constraint monitor| at or below this.
  double monitor_bound = 1e-6;
  /// Halt when |phi| < singular_ratio * |phi0|.
  double singular_ratio = 1e-6;
  /// Relative tolerance on admissibility_quadratic at the initial state.
  double admissibility_tolerance = 1e-8;
  /// Rerun with half the step to estimate the global error.
  bool estimate_error = true;
};

enum class HaltReason { none, singularity, monitor_exceeded, non_finite };

const char* to_string(HaltReason reason);

struct Trajectory {
  ReducedParams params;
  double step = 0.0;
  std::vector<ReducedState> states;
  /// Constraint monitor at each accepted state.
  std::vector<double> monitor;
  HaltReason halt = HaltReason::none;
  std::optional<double> halt_xi;
  std::string diagnostic;
  /// max |phi - phi_half| at common nodes of the halved-step rerun.
  std::optional<double> error_estimate;

  bool halted() const { return halt != HaltReason::none; }
  double xi_min() const;
  double xi_max() const;
  /// Cubic Hermite interpolation of (phi, phi', G) between accepted states.
  ReducedState at(double xi) const;
  /// phi with phi'' taken from the evolution equations.
  ProfileFunction phi_profile() const;
  /// G with G' taken from the evolution equations.
  ProfileFunction G_profile() const;
};

/// Fixed-step classical RK4 in (phi, phi', G) from `initial.xi` to `xi_end`.
/// Throws InadmissibleInitialData; singularities and monitor violations halt
/// the trajectory and are reported on it.
Trajectory integrate_reduced(const ReducedState& initial, const ReducedParams& params,
                             double step, double xi_end, const IntegrationOptions& options = {});

/// Header `xi,phi,dphi,G,monitor`, one row per accepted state.
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);

/// Warped product built from a trajectory: base g/phi^2 on the pseudo-Euclidean
/// chart of `dir`, f from warp_from_G with f(xi_start) = theta, the given
/// (Ricci-flat) fiber and lambda from the trajectory. The base box is a unit
/// box scaled down if needed so that xi stays inside the trajectory's range.
WarpedProductSpec lift_spec(const Trajectory& trajectory, double theta,
                            const FiberDescriptor& fiber, const Direction& dir);

/// einstein_residual of the lifted metric at `lambda` (default: the
/// trajectory's lambda).
ResidualReport lift_and_verify(const Trajectory& trajectory, double theta,
                               const FiberDescriptor& fiber, const Direction& dir,
                               const SampleGrid& grid, double tolerance,
                               std::optional<double> lambda = std::nullopt,
                               Execution exec = Execution::parallel);

}  // namespace warpcheck
