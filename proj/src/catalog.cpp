#include "warpcheck/catalog.hpp"

#include <cmath>
#include <sstream>

namespace warpcheck {

namespace {

void require_normalized(const Direction& dir, const char* family) {
  if (std::abs(std::abs(dir.kappa()) - 1.0) > 1e-12) {
    std::ostringstream os;
    os << family << ": direction must be normalized to kappa = +-1 (got " << dir.kappa() << ")";
    throw GeometryError(os.str());
  }
}

// Unit box, moved along alpha (if needed) so that its nearest corner keeps
// `clearance` from the hyperplane xi = offset on the valid side
// side * (offset - xi) > 0.
Box box_clear_of(const Direction& dir, double offset, double side, double clearance) {
  const Vec& alpha = dir.alpha();
  const double norm = alpha.norm();
  double worst = 0.0;  // xi of the corner closest to the hyperplane
  for (int i = 0; i < alpha.size(); ++i)
    worst += side > 0 ? std::max(0.0, alpha[i]) : std::min(0.0, alpha[i]);
  const double distance = side * (offset - worst) / norm;
  Box box = Box::unit(dir.dim());
  if (distance >= clearance) return box;
  const Vec unit = -side * alpha / norm;
  return box.translated((clearance - distance) * unit);
}

constexpr double kBoxClearance = 0.5;

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

CatalogEntry flat_exponential(int n, int m, double theta, double A, const Direction& dir) {
  if (!(theta > 0.0)) throw GeometryError("flat_exponential: theta must be positive");
  if (dir.dim() != n) throw DimensionMismatch("flat_exponential: direction dimension != n");
  require_normalized(dir, "flat_exponential");

  CatalogEntry e{"flat_exponential",
                 {{"n", n}, {"m", m}, {"Theta", theta}, {"A", A}, {"kappa", dir.kappa()}},
                 WarpedProductSpec{
                     MetricField::flat(dir.signature()), FiberDescriptor::flat(Signature::euclidean(m)),
                     ScalarField::from_profile(ProfileFunction::exponential(theta, A), dir), 0.0,
                     Box::unit(n)}};
  e.spec.validate();
  e.claimed_lambda = 0.0;
  if (A == 0.0) e.derived_lambda = 0.0;
  e.notes = {
      "claimed: Ricci-flat warped product with f = Theta exp(A xi), A != 0",
      "with lambda = Rbar = 0 the quantity G vanishes, so f'/f = G/phi forces f constant",
      "expected residual: horizontal block -m A^2 alpha_i alpha_j, warp scalar m A^2 f^2"};
  return e;
}

CatalogEntry affine_conformal(int m, double G, double C, double theta, const Direction& dir,
                              ConformalForm form, std::optional<Signature> fiber_signature) {
  if (G == 0.0) throw GeometryError("affine_conformal: family requires G != 0");
  if (!(theta > 0.0)) throw GeometryError("affine_conformal: theta must be positive");
  require_normalized(dir, "affine_conformal");
  const int n = dir.dim();
  const double kappa = dir.kappa();

  const double side = G > 0 ? 1.0 : -1.0;
  Domain domain{half_space("-G xi + C > 0", dir, C / G, side)};
  const ProfileFunction phi = form == ConformalForm::affine
                                  ? ProfileFunction::affine(-G, C)
                                  : ProfileFunction(
                                        [G, C](double xi) { return 1.0 / std::pow(C - G * xi, 2); },
                                        [G, C](double xi) { return 2.0 * G / std::pow(C - G * xi, 3); },
                                        [G, C](double xi) {
                                          return 6.0 * G * G / std::pow(C - G * xi, 4);
                                        });

  CatalogEntry e{
      form == ConformalForm::affine ? "affine_conformal" : "affine_conformal_inverse_square",
      {{"n", n}, {"m", m}, {"G", G}, {"C", C}, {"Theta", theta}, {"kappa", kappa}},
      WarpedProductSpec{
          MetricField::conformally_flat(dir.signature(), ScalarField::from_profile(phi, dir), domain),
          FiberDescriptor::flat(fiber_signature.value_or(Signature::euclidean(m))),
          ScalarField::from_profile(ProfileFunction::reciprocal_affine(theta, G, C), dir), 0.0,
          box_clear_of(dir, C / G, side, kBoxClearance)}};
  e.spec.validate();
  const double lambda = -(m + n - 1) * kappa * G * G;
  e.spec.lambda_claim = lambda;
  e.claimed_lambda = lambda;
  if (form == ConformalForm::affine) e.derived_lambda = lambda;
  e.domain_constraints = {"xi != C/G = " + fmt(C / G) + " (kept on the side -G xi + C > 0)"};
  e.notes = {"Rbar = -n(n-1) kappa G^2 and Rbar = n(n-1) lambda/(m+n-1) give lambda = "
             "-(m+n-1) kappa G^2"};
  if (form == ConformalForm::affine)
    e.notes.push_back("alternative claimed form phi = 1/(-G xi + C)^2 available as "
                      "affine_conformal_inverse_square");
  else
    e.notes.push_back("claimed alternative phi = 1/(-G xi + C)^2; the derivation gives "
                      "phi = -G xi + C");
  return e;
}

CatalogEntry hyperbolic_family(int n, int m, HyperbolicWarp warp) {
  const Signature sig = Signature::euclidean(n);
  const Direction up = Direction::axis(sig, n - 1);
  Domain domain{half_space("x_n > 0", up, 0.0, -1.0)};
  const ProfileFunction f =
      warp == HyperbolicWarp::reciprocal
          ? ProfileFunction::reciprocal_affine(1.0, -1.0, 0.0)
          : ProfileFunction([](double x) { return 1.0 / (x * x); },
                            [](double x) { return -2.0 / (x * x * x); },
                            [](double x) { return 6.0 / (x * x * x * x); }, Interval{0.0});

  CatalogEntry e{
      warp == HyperbolicWarp::reciprocal ? "hyperbolic_reciprocal" : "hyperbolic_reciprocal_square",
      {{"n", n}, {"m", m}, {"G", -1.0}, {"C", 0.0}, {"kappa", 1.0}},
      WarpedProductSpec{
          MetricField::conformally_flat(
              sig, ScalarField::from_profile(ProfileFunction::affine(1.0, 0.0), up), domain),
          FiberDescriptor::flat(Signature::euclidean(m)), ScalarField::from_profile(f, up), 0.0,
          box_clear_of(up, 0.0, -1.0, kBoxClearance)}};
  e.spec.validate();
  e.claimed_lambda = -(m + n - 1.0) / (n * (n - 1.0));
  e.spec.lambda_claim = *e.claimed_lambda;
  if (warp == HyperbolicWarp::reciprocal) e.derived_lambda = -(m + n - 1.0);
  e.domain_constraints = {"x_n > 0"};
  e.notes = {"claimed constant -(m+n-1)/(n(n-1))",
             "the affine family with G^2 = 1, kappa = 1 forces lambda = -(m+n-1); the assembled "
             "metric is hyperbolic space of dimension n+m",
             "setting alpha_n = 1/G gives kappa = 1/G^2, so G^2 = 1 is fixed here"};
  if (warp == HyperbolicWarp::reciprocal)
    e.notes.push_back("alternative claimed warp f = 1/x_n^2 available as "
                      "hyperbolic_reciprocal_square");
  return e;
}

std::vector<std::string> catalog_names() {
  return {"flat_exponential", "affine_conformal", "affine_conformal_inverse_square",
          "hyperbolic_reciprocal", "hyperbolic_reciprocal_square"};
}

CatalogEntry make_entry(const std::string& name, const CatalogParams& p) {
  const bool hyperbolic = name.rfind("hyperbolic", 0) == 0;
  if (hyperbolic) {
    return hyperbolic_family(p.n, p.m,
                                name == "hyperbolic_reciprocal" ? HyperbolicWarp::reciprocal
                                                               : HyperbolicWarp::reciprocal_square);
  }
  std::vector<int> eps;
  if (p.signature) {
    eps = *p.signature;
  } else {
    eps.assign(static_cast<std::size_t>(p.n), 1);
    if (p.kappa == -1) eps.front() = -1;
  }
  const Signature sig(eps);
  if (sig.dim() != p.n) throw DimensionMismatch("signature length differs from n");
  Direction dir = [&] {
    if (p.alpha) {
      Vec a = Eigen::Map<const Vec>(p.alpha->data(), static_cast<Eigen::Index>(p.alpha->size()));
      return Direction::normalized(std::move(a), sig);
    }
    for (int k = 0; k < sig.dim(); ++k)
      if (sig[k] == p.kappa) return Direction::axis(sig, k);
    throw GeometryError("no coordinate axis with signature entry equal to kappa");
  }();
  if (dir.kappa() != p.kappa)
    throw GeometryError("direction kappa differs from the requested kappa");

  if (name == "flat_exponential") return flat_exponential(p.n, p.m, p.theta, p.A, dir);
  if (name == "affine_conformal") return affine_conformal(p.m, p.G, p.C, p.theta, dir);
  if (name == "affine_conformal_inverse_square")
    return affine_conformal(p.m, p.G, p.C, p.theta, dir, ConformalForm::inverse_square);
  throw GeometryError("unknown catalog family: " + name);
}

std::vector<ClaimCheck> verify_catalog_entry(const CatalogEntry& entry, const SampleGrid& grid,
                                             double tolerance, Execution exec) {
  std::vector<std::pair<std::string, double>> candidates;
  const auto& claimed = entry.claimed_lambda;
  const auto& derived = entry.derived_lambda;
  if (claimed && derived && std::abs(*claimed - *derived) <= 1e-12 * std::max(1.0, std::abs(*claimed))) {
    candidates.emplace_back("claimed=derived", *derived);
  } else {
    if (claimed) candidates.emplace_back("claimed", *claimed);
    if (derived) candidates.emplace_back("derived", *derived);
  }
  const MetricField metric = assemble_warped_metric(entry.spec);
  std::vector<ClaimCheck> checks;
  for (const auto& [label, lambda] : candidates) {
    checks.push_back({label, lambda, einstein_residual(metric, lambda, grid, tolerance, exec),
                      oneill_residuals(entry.spec, lambda, entry.spec.fiber.mu_claim, grid,
                                       tolerance, exec)});
  }
  return checks;
}

}  // namespace warpcheck
