#include "warpcheck/chart.hpp"

#include <doctest.h>

#include <set>

using namespace warpcheck;

TEST_SUITE("chart") {

TEST_CASE("signature validation") {
  CHECK_NOTHROW(Signature({1, -1, 1}));
  CHECK_THROWS_AS(Signature({1, 0, 1}), GeometryError);
  CHECK_THROWS_AS(Signature({-1, -1}), GeometryError);
  CHECK_THROWS_AS(Signature(std::vector<int>{}), GeometryError);
  const Signature s({-1, 1, 1});
  CHECK(s.metric()(0, 0) == -1.0);
  CHECK(s.metric()(2, 2) == 1.0);
  CHECK(s == Signature({-1, 1, 1}));
}

TEST_CASE("kappa and normalization") {
  const Signature e = Signature::euclidean(3);
  Vec a(3);
  a << 1, 2, 2;
  CHECK(kappa(a, e) == doctest::Approx(9.0));
  const Direction d = Direction::normalized(a, e);
  CHECK(d.kappa() == 1.0);
  CHECK(d.alpha()[1] == doctest::Approx(2.0 / 3.0));

  const Signature lor({-1, 1, 1});
  Vec b(3);
  b << 2, 1, 0;
  const Direction t = Direction::normalized(b, lor);
  CHECK(t.kappa() == -1.0);
  CHECK(kappa(t.alpha(), lor) == doctest::Approx(-1.0));

  Vec null(3);
  null << 1, 1, 0;
  CHECK(Direction(null, lor).kappa() == 0.0);
  CHECK_THROWS_AS(kappa(Vec::Ones(2), e), DimensionMismatch);
}

TEST_CASE("xi coordinate") {
  const Direction d(Vec::Ones(3), Signature::euclidean(3));
  Vec x(3);
  x << 1, 2, 3;
  CHECK(xi_coordinate(x, d) == 6.0);
}

TEST_CASE("half space distance is signed Euclidean distance") {
  const Direction up = Direction::axis(Signature::euclidean(3), 2);
  const Domain dom{half_space("x3 > 0", up, 0.0, -1.0)};
  Vec x(3);
  x << 4, -7, 0.25;
  CHECK(domain_distance(dom, x) == doctest::Approx(0.25));
  CHECK(inside(dom, x));
  x[2] = -0.5;
  CHECK_FALSE(inside(dom, x));
  CHECK_THROWS_AS(require_inside(dom, x, "test"), DomainError);
}

TEST_CASE("profile functions") {
  const auto e = ProfileFunction::exponential(2.0, 3.0);
  CHECK(e(0.0) == 2.0);
  CHECK(e.d1(0.0) == 6.0);
  CHECK(e.d2(0.0) == 18.0);

  const auto r = ProfileFunction::reciprocal_affine(1.0, 1.0, 5.0);
  CHECK(r(4.0) == 1.0);
  CHECK(r.d1(4.0) == 1.0);
  CHECK(r.d2(4.0) == 2.0);
  CHECK(r.domain().contains(4.9));
  CHECK_FALSE(r.domain().contains(5.1));

  const auto h = ProfileFunction::reciprocal_affine(1.0, -1.0, 0.0);  // 1/x
  CHECK(h(2.0) == 0.5);
  CHECK(h.d1(2.0) == -0.25);
  CHECK(h.domain().contains(1.0));
  CHECK_FALSE(h.domain().contains(-1.0));
}

TEST_CASE("scalar field from profile") {
  Vec a(2);
  a << 1, 2;
  const auto f = ScalarField::from_profile(ProfileFunction::exponential(1.0, 1.0),
                                           Direction(a, Signature::euclidean(2)));
  Vec x(2);
  x << 0.5, -0.25;
  CHECK(f.value(x) == 1.0);
  CHECK(f.gradient(x)[1] == 2.0);
  CHECK(f.hessian(x)(1, 1) == 4.0);
  const auto s = f.scaled(3.0);
  CHECK(s.value(x) == 3.0);
  CHECK(s.hessian(x)(0, 1) == 6.0);
}

TEST_CASE("finite differences") {
  const std::function<double(const Vec&)> fn = [](const Vec& x) {
    return std::sin(x[0]) * std::exp(x[1]);
  };
  Vec x(2);
  x << 0.3, -0.2;
  const Vec g = fd_gradient(fn, x);
  CHECK(g[0] == doctest::Approx(std::cos(0.3) * std::exp(-0.2)).epsilon(1e-9));
  CHECK(g[1] == doctest::Approx(std::sin(0.3) * std::exp(-0.2)).epsilon(1e-9));
  const Mat h = fd_hessian(fn, x);
  CHECK(h(0, 0) == doctest::Approx(-std::sin(0.3) * std::exp(-0.2)).epsilon(1e-6));
  CHECK(h(0, 1) == doctest::Approx(std::cos(0.3) * std::exp(-0.2)).epsilon(1e-6));
  CHECK(h(0, 1) == h(1, 0));

  // steps are exactly representable offsets
  const double c = 0.1;
  const double step = fd_step_first(c);
  CHECK((c + step) - c == step);
  CHECK(fd_step_second(1e3) > fd_step_second(1.0));

  const auto numeric = ScalarField::numeric(fn);
  CHECK(numeric.gradient(x)[0] == doctest::Approx(g[0]));
}

TEST_CASE("stencils refuse to leave the domain") {
  const Direction up = Direction::axis(Signature::euclidean(2), 1);
  const Domain dom{half_space("y > 0", up, 0.0, -1.0)};
  const std::function<double(const Vec&)> fn = [](const Vec& x) { return std::log(x[1]); };
  Vec x(2);
  x << 0.0, 1e-9;
  CHECK_THROWS_AS(fd_gradient(fn, x, dom), DomainError);
}

TEST_CASE("quasi-random grid") {
  const Box box = Box::unit(3);
  const auto a = SampleGrid::quasi_random(box, {}, 100, 0.1, 7);
  const auto b = SampleGrid::quasi_random(box, {}, 100, 0.1, 7);
  const auto c = SampleGrid::quasi_random(box, {}, 100, 0.1, 8);
  REQUIRE(a.size() == 100);
  CHECK(a.dim() == 3);
  bool same = true, differs = false;
  std::set<double> firsts;
  for (std::size_t i = 0; i < a.size(); ++i) {
    same = same && a.points()[i] == b.points()[i];
    differs = differs || a.points()[i] != c.points()[i];
    firsts.insert(a.points()[i][0]);
    for (int k = 0; k < 3; ++k) {
      CHECK(a.points()[i][k] >= 0.0);
      CHECK(a.points()[i][k] <= 1.0);
    }
  }
  CHECK(same);
  CHECK(differs);
  CHECK(firsts.size() == 100);
}

TEST_CASE("grid respects margin and rejects empty domains") {
  const Direction up = Direction::axis(Signature::euclidean(2), 1);
  const Domain dom{half_space("y > 0.5", up, 0.5, -1.0)};
  const auto g = SampleGrid::quasi_random(Box::unit(2), dom, 50, 0.2, 1);
  for (const auto& p : g.points()) CHECK(p[1] >= 0.7);

  const Domain none{half_space("y > 2", up, 2.0, -1.0)};
  CHECK_THROWS_AS(SampleGrid::quasi_random(Box::unit(2), none, 10, 0.1, 0), DomainError);

  Vec bad(2);
  bad << 0.5, 0.55;
  CHECK_THROWS_AS(SampleGrid::from_points({bad}, dom, 0.1), DomainError);
}

TEST_CASE("box helpers") {
  const Box b = Box::unit(2).product(Box::unit(1)).translated(Vec::Constant(3, 2.0));
  CHECK(b.dim() == 3);
  CHECK(b.lo[2] == 2.0);
  CHECK(b.hi[0] == 3.0);
}

}
