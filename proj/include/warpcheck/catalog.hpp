#pragma once

// Named solution families together with their claimed Einstein constants, and
// a harness that checks each claimed constant against the curvature engine.

#include "warpcheck/warp.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace warpcheck {

struct CatalogEntry {
  std::string name;
  std::vector<std::pair<std::string, double>> params;
  WarpedProductSpec spec;
  /// Constant as claimed with the family; none when no constant is claimed.
  std::optional<double> claimed_lambda{};
  /// Constant forced by the family's own equations; none when the family is
  /// not Einstein for any constant.
  std::optional<double> derived_lambda{};
  std::vector<std::string> domain_constraints{};
  std::vector<std::string> notes{};
};

/// Flat base, flat fiber, f = theta exp(A xi). Claimed Ricci-flat.
CatalogEntry flat_exponential(int n, int m, double theta, double A, const Direction& dir);

enum class ConformalForm {
  /// phi = -G xi + C, base g / phi^2
  affine,
  /// phi = 1 / (-G xi + C)^2, an alternative closed form (not Einstein)
  inverse_square,
};

/// Conformally flat base g/phi^2 with f = theta / (-G xi + C) and a flat fiber.
/// Derived constant lambda = -(m + n - 1) kappa G^2. Requires G != 0 and a
/// normalized direction; the chart is restricted to -G xi + C > 0.
CatalogEntry affine_conformal(int m, double G, double C, double theta, const Direction& dir,
                              ConformalForm form = ConformalForm::affine,
                              std::optional<Signature> fiber_signature = std::nullopt);

enum class HyperbolicWarp {
  /// f = 1 / x_n
  reciprocal,
  /// f = 1 / x_n^2 (not Einstein)
  reciprocal_square,
};

/// Hyperbolic base delta / x_n^2 on x_n > 0 with a flat fiber. Claimed
/// constant -(m+n-1)/(n(n-1)); derived constant -(m+n-1).
CatalogEntry hyperbolic_family(int n, int m, HyperbolicWarp warp = HyperbolicWarp::reciprocal);

/// Parameters accepted by make_entry. Unused fields are ignored per family.
struct CatalogParams {
  int n = 3;
  int m = 2;
  double theta = 1.0;
  double A = 1.0;
  double G = 1.0;
  double C = 5.0;
  int kappa = 1;
  std::optional<std::vector<int>> signature;
  std::optional<std::vector<double>> alpha;
};

std::vector<std::string> catalog_names();
/// Instantiates a family by name. Without an explicit direction the first
/// axis whose signature entry equals kappa is used.
CatalogEntry make_entry(const std::string& name, const CatalogParams& params);

struct ClaimCheck {
  /// "claimed", "derived" or "claimed=derived".
  std::string label;
  double lambda;
  ResidualReport einstein;
  ResidualReport oneill;

  bool pass() const { return einstein.pass() && oneill.pass(); }
};

/// Direct and block-system residuals at every distinct candidate constant;
/// the claimed constant is always evaluated, never replaced by the derived one.
std::vector<ClaimCheck> verify_catalog_entry(const CatalogEntry& entry, const SampleGrid& grid,
                                             double tolerance,
                                             Execution exec = Execution::parallel);

}  // namespace warpcheck
