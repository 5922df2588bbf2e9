#pragma once

// Coordinates, signatures, translation-invariant profiles, sample grids and
// the finite-difference backend shared by the rest of the library.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace warpcheck {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

/// Evaluation requested outside the valid chart (stencil leaving the domain,
/// vanishing conformal factor, non-positive warping function, ...).
class DomainError : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

// ---------------------------------------------------------------------------
// Signature and Direction

class Signature {
 public:
  explicit Signature(std::vector<int> eps);

  static Signature euclidean(int n);

  int dim() const { return static_cast<int>(eps_.size()); }
  int operator[](int i) const { return eps_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& eps() const { return eps_; }

  /// diag(eps) as a matrix.
  Mat metric() const;
  bool operator==(const Signature&) const = default;

 private:
  std::vector<int> eps_;
};

double kappa(const Vec& alpha, const Signature& sig);

/// Translation-invariance data: xi = sum alpha_k x_k, kappa = sum eps_k alpha_k^2.
class Direction {
 public:
  Direction(Vec alpha, const Signature& sig);

  /// Rescales alpha so that kappa is exactly -1, 0 or +1.
  static Direction normalized(Vec alpha, const Signature& sig);
  static Direction axis(const Signature& sig, int k);

  int dim() const { return static_cast<int>(alpha_.size()); }
  const Vec& alpha() const { return alpha_; }
  double kappa() const { return kappa_; }
  const Signature& signature() const { return sig_; }

 private:
  Vec alpha_;
  Signature sig_;
  double kappa_;
};

double xi_coordinate(const Vec& point, const Direction& dir);

// ---------------------------------------------------------------------------
// Domains

/// A chart constraint. `distance` is positive inside the domain and
/// approximates the Euclidean coordinate distance to the excluded locus.
struct Constraint {
  std::string label;
  std::function<double(const Vec&)> distance;
};

using Domain = std::vector<Constraint>;

/// Smallest constraint distance at x (+inf for an unconstrained domain).
double domain_distance(const Domain& domain, const Vec& x);
bool inside(const Domain& domain, const Vec& x);
/// Throws DomainError naming the first violated constraint.
void require_inside(const Domain& domain, const Vec& x, const char* what);

/// Constraint `s * (offset - xi(x)) > 0` normalized by |alpha|, i.e. the
/// half-space on one side of the hyperplane xi = offset.
Constraint half_space(std::string label, const Direction& dir, double offset,
                      double side);

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double x) const { return x >= lo && x <= hi; }
};

// ---------------------------------------------------------------------------
// Profiles and scalar fields

/// A scalar function of one variable with first and second derivatives.
class ProfileFunction {
 public:
  using Fn = std::function<double(double)>;

  ProfileFunction(Fn eval, Fn d1, Fn d2, Interval domain = {});

  double operator()(double xi) const { return eval_(xi); }
  double d1(double xi) const { return d1_(xi); }
  double d2(double xi) const { return d2_(xi); }
  const Interval& domain() const { return domain_; }

  static ProfileFunction constant(double c);
  /// slope * xi + offset
  static ProfileFunction affine(double slope, double offset);
  /// scale * exp(rate * xi)
  static ProfileFunction exponential(double scale, double rate);
  /// theta / (-g * xi + c), restricted to the side where the denominator
  /// has the sign of theta.
  static ProfileFunction reciprocal_affine(double theta, double g, double c);

 private:
  Fn eval_;
  Fn d1_;
  Fn d2_;
  Interval domain_;
};

/// Scalar field on a chart with gradient and Hessian in coordinate partials.
struct ScalarField {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  std::function<Mat(const Vec&)> hessian;

  /// u(xi(x)): gradient u' alpha, Hessian u'' alpha alpha^T.
  static ScalarField from_profile(ProfileFunction profile, const Direction& dir);
  /// Derivatives by central differences, stencils checked against `domain`.
  static ScalarField numeric(std::function<double(const Vec&)> value,
                             Domain domain = {});
  static ScalarField constant(double c, int dim);

  ScalarField scaled(double factor) const;
};

// ---------------------------------------------------------------------------
// Finite differences
//
// First derivatives use h = eps^(1/3) max(1, |x_k|), second derivatives
// h = eps^(1/4) max(1, |x_k|). Steps are rounded so that x + h - x == h.

double fd_step_first(double coordinate);
double fd_step_second(double coordinate);

namespace detail {

inline Vec shifted(const Vec& x, int k, double h) {
  Vec y = x;
  y[k] += h;
  return y;
}

inline Vec shifted(const Vec& x, int k, double hk, int l, double hl) {
  Vec y = x;
  y[k] += hk;
  y[l] += hl;
  return y;
}

inline const Vec& checked(const Domain& domain, const Vec& y) {
  require_inside(domain, y, "finite-difference stencil");
  return y;
}

}  // namespace detail

/// Central difference d/dx_k of a double- or matrix-valued function.
template <class F>
auto fd_partial(const F& fn, const Vec& x, int k, const Domain& domain = {}) {
  const double h = fd_step_first(x[k]);
  const Vec xp = detail::shifted(x, k, h);
  const Vec xm = detail::shifted(x, k, -h);
  using R = std::decay_t<decltype(fn(x))>;
  R result = fn(detail::checked(domain, xp)) - fn(detail::checked(domain, xm));
  return R(result / (2.0 * h));
}

/// Central second difference d^2/dx_k dx_l.
template <class F>
auto fd_second_partial(const F& fn, const Vec& x, int k, int l,
                       const Domain& domain = {}) {
  using R = std::decay_t<decltype(fn(x))>;
  if (k == l) {
    const double h = fd_step_second(x[k]);
    const Vec xp = detail::shifted(x, k, h);
    const Vec xm = detail::shifted(x, k, -h);
    R result = fn(detail::checked(domain, xp)) - 2.0 * fn(x) +
               fn(detail::checked(domain, xm));
    return R(result / (h * h));
  }
  const double hk = fd_step_second(x[k]);
  const double hl = fd_step_second(x[l]);
  const Vec pp = detail::shifted(x, k, hk, l, hl);
  const Vec pm = detail::shifted(x, k, hk, l, -hl);
  const Vec mp = detail::shifted(x, k, -hk, l, hl);
  const Vec mm = detail::shifted(x, k, -hk, l, -hl);
  R result = fn(detail::checked(domain, pp)) - fn(detail::checked(domain, pm)) -
             fn(detail::checked(domain, mp)) + fn(detail::checked(domain, mm));
  return R(result / (4.0 * hk * hl));
}

Vec fd_gradient(const std::function<double(const Vec&)>& fn, const Vec& x,
                const Domain& domain = {});
Mat fd_hessian(const std::function<double(const Vec&)>& fn, const Vec& x,
               const Domain& domain = {});

// ---------------------------------------------------------------------------
// Sample grids

struct Box {
  Vec lo;
  Vec hi;

  static Box unit(int dim);
  int dim() const { return static_cast<int>(lo.size()); }
  Box translated(const Vec& shift) const;
  /// Cartesian product: this box's coordinates first.
  Box product(const Box& other) const;
};

class SampleGrid {
 public:
  static constexpr int kDefaultCount = 100;
  static constexpr double kDefaultMargin = 0.1;

  /// Scrambled Halton points in `box`, keeping only those at distance
  /// >= margin from every constraint of `domain`. Deterministic in `seed`.
  static SampleGrid quasi_random(const Box& box, const Domain& domain,
                                 int count = kDefaultCount,
                                 double margin = kDefaultMargin,
                                 std::uint64_t seed = 0);
  /// Validates caller-provided points against the domain.
  static SampleGrid from_points(std::vector<Vec> points, const Domain& domain,
                                double margin = 0.0);

  const std::vector<Vec>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double margin() const { return margin_; }
  int dim() const;

 private:
  SampleGrid(std::vector<Vec> points, double margin)
      : points_(std::move(points)), margin_(margin) {}

  std::vector<Vec> points_;
  double margin_;
};

}  // namespace warpcheck
