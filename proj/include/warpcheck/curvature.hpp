#pragma once

// Levi-Civita connection, Ricci tensor and scalar curvature of coordinate
// metrics, plus closed forms for conformally flat metrics g/phi^2.

#include "warpcheck/chart.hpp"

#include <optional>
#include <vector>

namespace warpcheck {

class SingularMetric : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

enum class DerivativeMode { analytic, finite_difference };

const char* to_string(DerivativeMode mode);

/// Dense rank-3 array indexed (k, i, j); used for Christoffel symbols with
/// the upper index first.
class Tensor3 {
 public:
  explicit Tensor3(int n = 0) : n_(n), data_(static_cast<std::size_t>(n * n * n), 0.0) {}

  int dim() const { return n_; }
  double& operator()(int k, int i, int j) { return data_[index(k, i, j)]; }
  double operator()(int k, int i, int j) const { return data_[index(k, i, j)]; }

 private:
  std::size_t index(int k, int i, int j) const {
    return static_cast<std::size_t>((k * n_ + i) * n_ + j);
  }
  int n_;
  std::vector<double> data_;
};

/// A coordinate metric on an open chart.
///
/// In analytic mode the first and second partials of the components come from
/// caller-supplied oracles; in finite-difference mode they are computed from
/// the components by central differences with stencils checked against the
/// domain. `d1(x)[k]` is d_k g and `d2(x)[k * n + l]` is d_k d_l g.
class MetricField {
 public:
  using Components = std::function<Mat(const Vec&)>;
  using Derivatives = std::function<std::vector<Mat>(const Vec&)>;

  /// Finite-difference metric.
  MetricField(int dim, Components components, Domain domain = {});
  /// Analytic metric.
  MetricField(int dim, Components components, Derivatives d1, Derivatives d2,
              Domain domain = {});

  static MetricField flat(const Signature& sig);
  /// g / phi^2 with g = diag(eps); derivatives composed from phi's gradient
  /// and Hessian. The domain excludes phi = 0 only through `domain`.
  static MetricField conformally_flat(const Signature& sig, ScalarField phi,
                                      Domain domain = {});

  int dim() const { return dim_; }
  DerivativeMode mode() const { return d1_ ? DerivativeMode::analytic
                                           : DerivativeMode::finite_difference; }
  const Domain& domain() const { return domain_; }

  Mat components(const Vec& x) const;
  std::vector<Mat> d1(const Vec& x) const;
  std::vector<Mat> d2(const Vec& x) const;

  /// Same components, derivatives switched to finite differences. Requesting
  /// analytic mode on a finite-difference metric is an error.
  MetricField with_mode(DerivativeMode mode) const;

  /// For a product chart: number of leading (base) coordinates.
  std::optional<int> product_split() const { return split_; }
  MetricField with_product_split(int base_dim) const;

 private:
  int dim_;
  Components components_;
  Derivatives d1_;
  Derivatives d2_;
  Domain domain_;
  std::optional<int> split_;
};

struct CurvatureBundle {
  Mat metric;
  Mat inverse;
  Tensor3 christoffel;
  Mat ricci;
  double scalar = 0.0;
};

/// Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij).
Tensor3 christoffel(const MetricField& metric, const Vec& x);
/// R_ij = d_k Gamma^k_ij - d_i Gamma^k_kj + Gamma^k_kl Gamma^l_ij - Gamma^k_il Gamma^l_kj.
Mat ricci(const MetricField& metric, const Vec& x);
double scalar_curvature(const MetricField& metric, const Vec& x);
CurvatureBundle curvature(const MetricField& metric, const Vec& x);

/// Ricci tensor of g/phi^2 for the flat metric g = diag(eps):
///   (1/phi^2) { (n-2) phi Hess(phi) + [phi Lap(phi) - (n-1) |grad phi|^2] g }.
Mat conformal_ricci_closed(const ScalarField& phi, const Signature& sig, const Vec& x);

/// Scalar curvature of g/phi^2 for a profile phi(xi):
///   (n-1) (2 phi phi'' - n phi'^2) kappa.
double conformal_scalar_closed(const ProfileFunction& phi, const Direction& dir,
                               double xi);

}  // namespace warpcheck
