#include "warpcheck/chart.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <sstream>

namespace warpcheck {

namespace {

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a << " vs " << b << ")";
    throw DimensionMismatch(os.str());
  }
}

}  // namespace

Signature::Signature(std::vector<int> eps) : eps_(std::move(eps)) {
  if (eps_.empty()) throw GeometryError("signature must be non-empty");
  bool has_plus = false;
  for (int e : eps_) {
    if (e != 1 && e != -1) throw GeometryError("signature entries must be +1 or -1");
    has_plus = has_plus || e == 1;
  }
  if (!has_plus) throw GeometryError("signature needs at least one +1 entry");
}

Signature Signature::euclidean(int n) {
  return Signature(std::vector<int>(static_cast<std::size_t>(n), 1));
}

Mat Signature::metric() const {
  Mat g = Mat::Zero(dim(), dim());
  for (int i = 0; i < dim(); ++i) g(i, i) = (*this)[i];
  return g;
}

double kappa(const Vec& alpha, const Signature& sig) {
  require_same_dim(alpha.size(), sig.dim(), "kappa");
  double k = 0.0;
  for (int i = 0; i < sig.dim(); ++i) k += sig[i] * alpha[i] * alpha[i];
  return k;
}

Direction::Direction(Vec alpha, const Signature& sig)
    : alpha_(std::move(alpha)), sig_(sig), kappa_(warpcheck::kappa(alpha_, sig)) {}

Direction Direction::normalized(Vec alpha, const Signature& sig) {
  const double k = warpcheck::kappa(alpha, sig);
  if (k != 0.0) alpha /= std::sqrt(std::abs(k));
  Direction d(std::move(alpha), sig);
  // sqrt rounding can leave kappa one ulp away from +-1
  if (k != 0.0) d.kappa_ = k > 0 ? 1.0 : -1.0;
  return d;
}

Direction Direction::axis(const Signature& sig, int k) {
  Vec alpha = Vec::Zero(sig.dim());
  alpha[k] = 1.0;
  return Direction(std::move(alpha), sig);
}

double xi_coordinate(const Vec& point, const Direction& dir) {
  require_same_dim(point.size(), dir.dim(), "xi_coordinate");
  return point.dot(dir.alpha());
}

double domain_distance(const Domain& domain, const Vec& x) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& c : domain) d = std::min(d, c.distance(x));
  return d;
}

bool inside(const Domain& domain, const Vec& x) {
  return domain_distance(domain, x) > 0.0;
}

void require_inside(const Domain& domain, const Vec& x, const char* what) {
  for (const auto& c : domain) {
    if (!(c.distance(x) > 0.0)) {
      std::ostringstream os;
      os << what << " outside domain (" << c.label << ") at x = ("
         << x.transpose() << ")";
      throw DomainError(os.str());
    }
  }
}

Constraint half_space(std::string label, const Direction& dir, double offset,
                      double side) {
  const Vec alpha = dir.alpha();
  const double norm = alpha.norm();
  if (norm == 0.0) throw GeometryError("half_space: zero direction");
  return {std::move(label), [alpha, norm, offset, side](const Vec& x) {
            return side * (offset - x.dot(alpha)) / norm;
          }};
}

// ---------------------------------------------------------------------------

ProfileFunction::ProfileFunction(Fn eval, Fn d1, Fn d2, Interval domain)
    : eval_(std::move(eval)), d1_(std::move(d1)), d2_(std::move(d2)), domain_(domain) {}

ProfileFunction ProfileFunction::constant(double c) {
  return {[c](double) { return c; }, [](double) { return 0.0; },
          [](double) { return 0.0; }};
}

ProfileFunction ProfileFunction::affine(double slope, double offset) {
  return {[=](double xi) { return slope * xi + offset; },
          [=](double) { return slope; }, [](double) { return 0.0; }};
}

ProfileFunction ProfileFunction::exponential(double scale, double rate) {
  return {[=](double xi) { return scale * std::exp(rate * xi); },
          [=](double xi) { return scale * rate * std::exp(rate * xi); },
          [=](double xi) { return scale * rate * rate * std::exp(rate * xi); }};
}

ProfileFunction ProfileFunction::reciprocal_affine(double theta, double g, double c) {
  Interval domain;
  if (g != 0.0) {
    // sign(theta) * (c - g xi) > 0
    const double pole = c / g;
    if ((g > 0) == (theta > 0)) domain.hi = pole;
    else domain.lo = pole;
  }
  return {[=](double xi) { return theta / (c - g * xi); },
          [=](double xi) {
            const double d = c - g * xi;
            return theta * g / (d * d);
          },
          [=](double xi) {
            const double d = c - g * xi;
            return 2.0 * theta * g * g / (d * d * d);
          },
          domain};
}

ScalarField ScalarField::from_profile(ProfileFunction profile, const Direction& dir) {
  const Vec alpha = dir.alpha();
  auto p = std::make_shared<const ProfileFunction>(std::move(profile));
  ScalarField s;
  s.value = [p, alpha](const Vec& x) { return (*p)(x.dot(alpha)); };
  s.gradient = [p, alpha](const Vec& x) -> Vec { return p->d1(x.dot(alpha)) * alpha; };
  s.hessian = [p, alpha](const Vec& x) -> Mat {
    return p->d2(x.dot(alpha)) * (alpha * alpha.transpose());
  };
  return s;
}

ScalarField ScalarField::numeric(std::function<double(const Vec&)> value, Domain domain) {
  ScalarField s;
  s.value = value;
  s.gradient = [value, domain](const Vec& x) { return fd_gradient(value, x, domain); };
  s.hessian = [value, domain](const Vec& x) { return fd_hessian(value, x, domain); };
  return s;
}

ScalarField ScalarField::constant(double c, int dim) {
  ScalarField s;
  s.value = [c](const Vec&) { return c; };
  s.gradient = [dim](const Vec&) -> Vec { return Vec::Zero(dim); };
  s.hessian = [dim](const Vec&) -> Mat { return Mat::Zero(dim, dim); };
  return s;
}

ScalarField ScalarField::scaled(double factor) const {
  ScalarField s;
  s.value = [v = value, factor](const Vec& x) { return v(x) * factor; };
  s.gradient = [g = gradient, factor](const Vec& x) -> Vec { return g(x) * factor; };
  s.hessian = [h = hessian, factor](const Vec& x) -> Mat { return h(x) * factor; };
  return s;
}

// ---------------------------------------------------------------------------

namespace {

double rounded_step(double base, double coordinate) {
  const double h = base * std::max(1.0, std::abs(coordinate));
  volatile double moved = coordinate + h;
  return moved - coordinate;
}

}  // namespace

double fd_step_first(double coordinate) {
  static const double base = std::cbrt(std::numeric_limits<double>::epsilon());
  return rounded_step(base, coordinate);
}

double fd_step_second(double coordinate) {
  static const double base =
      std::pow(std::numeric_limits<double>::epsilon(), 0.25);
  return rounded_step(base, coordinate);
}

Vec fd_gradient(const std::function<double(const Vec&)>& fn, const Vec& x,
                const Domain& domain) {
  Vec g(x.size());
  for (int k = 0; k < x.size(); ++k) g[k] = fd_partial(fn, x, k, domain);
  return g;
}

Mat fd_hessian(const std::function<double(const Vec&)>& fn, const Vec& x,
               const Domain& domain) {
  const auto n = x.size();
  Mat h(n, n);
  for (int k = 0; k < n; ++k) {
    for (int l = k; l < n; ++l) {
      h(k, l) = fd_second_partial(fn, x, k, l, domain);
      h(l, k) = h(k, l);
    }
  }
  return h;
}

// ---------------------------------------------------------------------------

Box Box::unit(int dim) { return {Vec::Zero(dim), Vec::Ones(dim)}; }

Box Box::translated(const Vec& shift) const { return {lo + shift, hi + shift}; }

Box Box::product(const Box& other) const {
  Box b{Vec(dim() + other.dim()), Vec(dim() + other.dim())};
  b.lo << lo, other.lo;
  b.hi << hi, other.hi;
  return b;
}

namespace {

constexpr std::array<int, 16> kPrimes = {2,  3,  5,  7,  11, 13, 17, 19,
                                         23, 29, 31, 37, 41, 43, 47, 53};

double radical_inverse(std::uint64_t index, int base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
    f /= base;
  }
  return result;
}

}  // namespace

SampleGrid SampleGrid::quasi_random(const Box& box, const Domain& domain, int count,
                                    double margin, std::uint64_t seed) {
  const int dim = box.dim();
  if (dim > static_cast<int>(kPrimes.size()))
    throw GeometryError("quasi_random: dimension too large for Halton bases");
  if (count < 0) throw GeometryError("quasi_random: negative count");

  // Cranley-Patterson rotation keeps the low-discrepancy structure while
  // making the seed meaningful.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vec rotation(dim);
  for (int d = 0; d < dim; ++d) rotation[d] = unit(rng);

  std::vector<Vec> points;
  points.reserve(static_cast<std::size_t>(count));
  const std::uint64_t max_attempts = 1000ull * static_cast<std::uint64_t>(count) + 1000;
  for (std::uint64_t i = 1; points.size() < static_cast<std::size_t>(count); ++i) {
    if (i > max_attempts)
      throw DomainError("quasi_random: empty domain after constraints");
    Vec x(dim);
    for (int d = 0; d < dim; ++d) {
      double u = radical_inverse(i, kPrimes[static_cast<std::size_t>(d)]) + rotation[d];
      u -= std::floor(u);
      x[d] = box.lo[d] + u * (box.hi[d] - box.lo[d]);
    }
    if (domain_distance(domain, x) >= margin) points.push_back(std::move(x));
  }
  return SampleGrid(std::move(points), margin);
}

SampleGrid SampleGrid::from_points(std::vector<Vec> points, const Domain& domain,
                                   double margin) {
  for (const auto& p : points) {
    if (p.size() != points.front().size())
      throw DimensionMismatch("from_points: mixed point dimensions");
    if (!(domain_distance(domain, p) >= margin) || !inside(domain, p))
      throw DomainError("from_points: point closer than margin to a singular locus");
  }
  return SampleGrid(std::move(points), margin);
}

int SampleGrid::dim() const {
  return points_.empty() ? 0 : static_cast<int>(points_.front().size());
}

}  // namespace warpcheck
