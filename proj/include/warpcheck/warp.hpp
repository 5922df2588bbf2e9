#pragma once

// Warped products g + f^2 g~ and the residual checks of the Einstein
// condition: direct curvature, the O'Neill block system, the contracted
// scalar identities and the Bochner chain for lambda = R/(n-1).

#include "warpcheck/curvature.hpp"
#include "warpcheck/sweep.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace warpcheck {

inline constexpr double kAnalyticTolerance = 1e-6;
inline constexpr double kFiniteDifferenceTolerance = 1e-4;

double default_tolerance(DerivativeMode mode);

// ---------------------------------------------------------------------------
// Reports

struct EquationResidual {
  std::string label;
  /// One value per grid point: the signed residual for scalar equations, the
  /// largest absolute component for tensor equations.
  std::vector<double> values;
  double sup = 0.0;
  double tolerance = 0.0;

  bool pass() const { return sup <= tolerance; }
};

EquationResidual make_equation(std::string label, std::vector<double> values,
                               double tolerance);

struct ResidualReport {
  std::vector<EquationResidual> equations;
  std::optional<double> best_fit_lambda;
  bool applicable = true;
  std::string note;

  /// Applicable and every equation within tolerance.
  bool pass() const;
  /// Largest sup-norm over all equations (0 for an empty report).
  double sup() const;
  const EquationResidual& equation(std::string_view label) const;
  bool has_equation(std::string_view label) const;
};

// ---------------------------------------------------------------------------
// Specs

struct FiberDescriptor {
  std::string name;
  MetricField metric;
  double mu_claim = 0.0;
  Box box;

  int m() const { return metric.dim(); }

  /// Flat pseudo-Euclidean fiber, mu = 0.
  static FiberDescriptor flat(const Signature& sig);
  /// Unit round sphere in hyperspherical angles, mu = m - 1.
  static FiberDescriptor sphere(int m);
  /// Upper half-space model of hyperbolic space, mu = -(m - 1).
  static FiberDescriptor hyperbolic(int m);

  /// Fiber metric multiplied by c^2 (Einstein constant unchanged).
  FiberDescriptor scaled(double c) const;
};

struct WarpedProductSpec {
  MetricField base;
  FiberDescriptor fiber;
  ScalarField warp;
  double lambda_claim = 0.0;
  Box base_box;

  int n() const { return base.dim(); }
  int m() const { return fiber.m(); }

  /// Throws GeometryError unless n >= 3 and m >= 2.
  void validate() const;
  /// Base domain plus positivity of the warping function.
  Domain base_domain() const;
  /// Domain on the product chart: base coordinates first.
  Domain product_domain() const;
  Box product_box() const { return base_box.product(fiber.box); }

  /// (f / c, c^2 g~): the same warped metric.
  WarpedProductSpec with_fiber_rescaled(double c) const;
  /// Base, fiber and warping derivatives switched to finite differences.
  WarpedProductSpec with_mode(DerivativeMode mode) const;
};

/// Block metric diag(g(x), f(x)^2 g~(y)) on the product chart. Analytic when
/// base and fiber are.
MetricField assemble_warped_metric(const WarpedProductSpec& spec);

/// Quasi-random grid on the product chart honoring the spec's domain.
SampleGrid product_grid(const WarpedProductSpec& spec,
                        int count = SampleGrid::kDefaultCount,
                        double margin = SampleGrid::kDefaultMargin,
                        std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Residual checks

/// R_ij - lambda g_ij at every grid point, split into horizontal / mixed /
/// vertical blocks when the metric carries a product split. Also reports the
/// least-squares lambda minimizing sum |R_ij - lambda g_ij|^2.
ResidualReport einstein_residual(const MetricField& metric, double lambda,
                                 const SampleGrid& grid, double tolerance,
                                 Execution exec = Execution::parallel);

/// The three block equations characterizing Einstein warped products:
///   Ric - (m/f) Hess f = lambda g            (base)
///   Ric~ = mu g~                             (fiber)
///   f Lap f + (m-1)|grad f|^2 + lambda f^2 = mu
/// Hessian and Laplacian use the base Levi-Civita connection.
ResidualReport oneill_residuals(const WarpedProductSpec& spec, double lambda, double mu,
                                const SampleGrid& grid, double tolerance,
                                Execution exec = Execution::parallel);

/// Contracted identities:
///   R f^2 - m f Lap f = n lambda f^2
///   |grad f|^2 + [(lambda(m-n) + R) / (m(m-1))] f^2 = mu / (m-1)
///   div(f grad f) + (m-2)|grad f|^2 + lambda f^2 = mu
ResidualReport scalar_identities(const WarpedProductSpec& spec, double lambda, double mu,
                                 const SampleGrid& grid, double tolerance,
                                 Execution exec = Execution::parallel);

enum class ObstructionVerdict { admissible, boundary, trivial_warping };

const char* to_string(ObstructionVerdict verdict);

struct ObstructionMargin {
  double margin;
  ObstructionVerdict verdict;

  bool admissible() const { return verdict != ObstructionVerdict::trivial_warping; }
};

/// lambda (n - m) - R. With a Ricci-flat fiber a negative margin forces the
/// warping function to be constant.
ObstructionMargin obstruction_margin(double scalar, double lambda, int n, int m);

/// Pointwise identities available when the base has constant scalar
/// curvature R and lambda = R / (n - 1); otherwise returns a report with
/// applicable == false. The Bochner formula itself is checked with finite
/// differences of |grad f|^2 and Lap f.
ResidualReport bochner_identities(const WarpedProductSpec& spec, const SampleGrid& grid,
                                  double tolerance, Execution exec = Execution::parallel);

}  // namespace warpcheck
