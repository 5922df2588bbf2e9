#include "oracles.hpp"
#include "warpcheck/warp.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace warpcheck;

namespace {

// Conformally flat base g/phi^2, phi = -G xi + C along e_1, f = theta / phi,
// flat fiber. Einstein with lambda = -(m+n-1) G^2.
WarpedProductSpec affine_spec(int n, int m, double G = 1.0, double C = 5.0, double theta = 1.0) {
  const Signature e = Signature::euclidean(n);
  const Direction d = Direction::axis(e, 0);
  const Domain dom{half_space("phi > 0", d, C / G, G > 0 ? 1.0 : -1.0)};
  return WarpedProductSpec{
      MetricField::conformally_flat(e, ScalarField::from_profile(ProfileFunction::affine(-G, C), d),
                                    dom),
      FiberDescriptor::flat(Signature::euclidean(m)),
      ScalarField::from_profile(ProfileFunction::reciprocal_affine(theta, G, C), d),
      -(m + n - 1.0) * G * G, Box::unit(n)};
}

// Flat base, f = x_1 on x_1 > 0, round sphere fiber: a flat cone.
WarpedProductSpec cone_spec(int n, int m) {
  const Signature e = Signature::euclidean(n);
  const Direction d = Direction::axis(e, 0);
  MetricField base = MetricField::flat(e);
  return WarpedProductSpec{base, FiberDescriptor::sphere(m),
                           ScalarField::from_profile(ProfileFunction::affine(1.0, 0.0), d), 0.0,
                           Box::unit(n).translated(Vec::Unit(n, 0) * 0.5)};
}

}  // namespace

TEST_SUITE("warp") {

TEST_CASE("equation sup-norm") {
  const auto e = make_equation("x", {1.0, -3.0, 2.0}, 2.5);
  CHECK(e.sup == 3.0);
  CHECK_FALSE(e.pass());
  const auto nan = make_equation("y", {0.0, std::numeric_limits<double>::quiet_NaN(), 1.0}, 1.0);
  CHECK(std::isnan(nan.sup));
  CHECK_FALSE(nan.pass());

  ResidualReport r;
  r.equations = {make_equation("a", {0.1}, 1.0), make_equation("b", {0.5}, 1.0)};
  CHECK(r.pass());
  CHECK(r.sup() == 0.5);
  CHECK(r.has_equation("b"));
  CHECK_THROWS_AS(r.equation("c"), std::out_of_range);
  r.applicable = false;
  CHECK_FALSE(r.pass());
  CHECK(default_tolerance(DerivativeMode::finite_difference) == kFiniteDifferenceTolerance);
}

TEST_CASE("fiber descriptors are Einstein with their claimed constant") {
  for (int m = 2; m <= 4; ++m) {
    for (const auto& fiber : {FiberDescriptor::flat(Signature::euclidean(m)),
                              FiberDescriptor::sphere(m), FiberDescriptor::hyperbolic(m)}) {
      CAPTURE(fiber.name);
      CAPTURE(m);
      const auto grid = SampleGrid::quasi_random(fiber.box, fiber.metric.domain(), 20, 0.05, 3);
      const auto r = einstein_residual(fiber.metric, fiber.mu_claim, grid, 1e-9);
      CHECK(r.pass());
      const auto scaled = fiber.scaled(3.0);
      // the Ricci tensor is scale invariant, so the constant drops by c^2
      CHECK(einstein_residual(scaled.metric, fiber.mu_claim / 9.0, grid, 1e-9).pass());
    }
  }
  CHECK(FiberDescriptor::sphere(3).mu_claim == 2.0);
  CHECK(FiberDescriptor::hyperbolic(3).mu_claim == -2.0);
  CHECK_THROWS_AS(FiberDescriptor::flat(Signature::euclidean(2)).scaled(0.0), GeometryError);
}

TEST_CASE("assembled metric has block form") {
  const auto spec = affine_spec(3, 2);
  const auto g = assemble_warped_metric(spec);
  CHECK(g.dim() == 5);
  CHECK(g.product_split() == 3);
  Vec x(5);
  x << 0.5, 0.2, 0.1, 0.3, 0.4;
  const Mat c = g.components(x);
  const double phi = 5.0 - 0.5;
  CHECK(c(0, 0) == doctest::Approx(1.0 / (phi * phi)));
  CHECK(c(3, 3) == doctest::Approx(1.0 / (phi * phi)));
  CHECK(c(0, 3) == 0.0);
  CHECK(c(1, 2) == 0.0);
}

TEST_CASE("assembled analytic derivatives match the nested-difference oracle") {
  const auto spec = cone_spec(3, 2);
  const auto g = assemble_warped_metric(spec);
  Vec x(5);
  x << 1.1, 0.3, 0.7, 1.2, 1.6;
  const Mat ref = oracle::ricci_fd([&](const Vec& y) { return g.components(y); }, x);
  CHECK((ricci(g, x) - ref).norm() < 1e-5);
}

TEST_CASE("affine family is Einstein") {
  for (auto [n, m] : {std::pair{3, 2}, {4, 2}, {3, 3}}) {
    const auto spec = affine_spec(n, m);
    const double lambda = -(m + n - 1.0);
    const auto grid = product_grid(spec, 100, 0.1, 0);
    const auto direct = einstein_residual(assemble_warped_metric(spec), lambda, grid, 1e-6);
    CHECK(direct.pass());
    REQUIRE(direct.best_fit_lambda);
    CHECK(*direct.best_fit_lambda == doctest::Approx(lambda));
    CHECK(oneill_residuals(spec, lambda, 0.0, grid, 1e-6).pass());
    CHECK(scalar_identities(spec, lambda, 0.0, grid, 1e-8).pass());
    CHECK_FALSE(einstein_residual(assemble_warped_metric(spec), lambda + 0.5, grid, 1e-6).pass());
  }
}

TEST_CASE("flat cone over a sphere") {
  const auto spec = cone_spec(3, 2);
  const auto grid = product_grid(spec, 40, 0.1, 2);
  CHECK(einstein_residual(assemble_warped_metric(spec), 0.0, grid, 1e-9).pass());
  const auto blocks = oneill_residuals(spec, 0.0, 1.0, grid, 1e-9);
  CHECK(blocks.pass());
  // wrong fiber constant shows up only in the fiber and scalar equations
  const auto wrong = oneill_residuals(spec, 0.0, 2.0, grid, 1e-9);
  CHECK(wrong.equation("base_block").pass());
  CHECK(wrong.equation("fiber_block").sup == doctest::Approx(1.0));
  CHECK(wrong.equation("warp_scalar").sup == doctest::Approx(1.0));
  CHECK(scalar_identities(spec, 0.0, 1.0, grid, 1e-9).pass());
}

TEST_CASE("FD mode agrees with analytic mode") {
  const auto spec = affine_spec(3, 2, 1.3, 4.0, 2.0);
  const auto fd = spec.with_mode(DerivativeMode::finite_difference);
  const auto grid = product_grid(spec, 20, 0.1, 5);
  const double lambda = -4.0 * 1.3 * 1.3;
  const auto a = einstein_residual(assemble_warped_metric(spec), lambda, grid, 1e-6);
  const auto b = einstein_residual(assemble_warped_metric(fd), lambda, grid, 1e-4);
  CHECK(a.pass());
  CHECK(b.pass());
  CHECK(oneill_residuals(fd, lambda, 0.0, grid, 1e-4).pass());
  CHECK(assemble_warped_metric(fd).mode() == DerivativeMode::finite_difference);
}

TEST_CASE("serial and parallel sweeps are bit-identical") {
  const auto spec = cone_spec(3, 3);
  const auto grid = product_grid(spec, 64, 0.1, 9);
  const auto g = assemble_warped_metric(spec);
  const auto s = einstein_residual(g, 0.1, grid, 1e-6, Execution::serial);
  const auto p = einstein_residual(g, 0.1, grid, 1e-6, Execution::parallel);
  REQUIRE(s.equations.size() == p.equations.size());
  for (std::size_t i = 0; i < s.equations.size(); ++i)
    CHECK(s.equations[i].values == p.equations[i].values);
  CHECK(*s.best_fit_lambda == *p.best_fit_lambda);
  const auto so = oneill_residuals(spec, 0.1, 2.0, grid, 1e-6, Execution::serial);
  const auto po = oneill_residuals(spec, 0.1, 2.0, grid, 1e-6, Execution::parallel);
  for (std::size_t i = 0; i < so.equations.size(); ++i)
    CHECK(so.equations[i].values == po.equations[i].values);
}

TEST_CASE("errors inside a parallel sweep propagate") {
  const auto spec = affine_spec(3, 2);
  Vec bad(5);
  bad << 6.0, 0, 0, 0, 0;  // beyond the singular hyperplane
  const auto grid = SampleGrid::from_points({Vec::Zero(5), bad}, {});
  CHECK_THROWS_AS(einstein_residual(assemble_warped_metric(spec), -4.0, grid, 1e-6),
                  GeometryError);
}

TEST_CASE("spec validation") {
  auto spec = affine_spec(3, 2);
  spec.fiber = FiberDescriptor::flat(Signature::euclidean(1));
  CHECK_THROWS_AS(spec.validate(), GeometryError);
  auto wrong_grid = SampleGrid::quasi_random(Box::unit(3), {}, 5, 0.0, 0);
  CHECK_THROWS_AS(oneill_residuals(affine_spec(3, 2), -4.0, 0.0, wrong_grid, 1e-6),
                  DimensionMismatch);
}

TEST_CASE("product grid stays inside the product domain") {
  const auto spec = cone_spec(3, 2);
  const auto grid = product_grid(spec, 50, 0.1, 4);
  const auto dom = spec.product_domain();
  for (const auto& p : grid.points()) CHECK(domain_distance(dom, p) >= 0.1);
}

TEST_CASE("obstruction margin") {
  CHECK(obstruction_margin(-6.0, -4.0, 3, 2).verdict == ObstructionVerdict::admissible);
  CHECK(obstruction_margin(-6.0, -4.0, 3, 2).margin == 2.0);
  CHECK(obstruction_margin(-4.0, -4.0, 3, 2).verdict == ObstructionVerdict::boundary);
  const auto t = obstruction_margin(0.0, -1.0, 4, 2);
  CHECK(t.verdict == ObstructionVerdict::trivial_warping);
  CHECK_FALSE(t.admissible());
}

TEST_CASE("Bochner identities and their gate") {
  const auto cone = cone_spec(3, 2);
  const auto grid = product_grid(cone, 20, 0.1, 1);
  const auto r = bochner_identities(cone, grid, 1e-6);
  CHECK(r.applicable);
  CHECK(r.pass());

  const auto affine = affine_spec(3, 2);
  const auto gated = bochner_identities(affine, product_grid(affine, 10, 0.1, 0), 1e-6);
  CHECK_FALSE(gated.applicable);
  CHECK(gated.note.find("not applicable") != std::string::npos);
}

}
