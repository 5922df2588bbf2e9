#include "warpcheck/curvature.hpp"

#include <cmath>
#include <sstream>

namespace warpcheck {

const char* to_string(DerivativeMode mode) {
  return mode == DerivativeMode::analytic ? "analytic" : "fd";
}

MetricField::MetricField(int dim, Components components, Domain domain)
    : dim_(dim), components_(std::move(components)), domain_(std::move(domain)) {}

MetricField::MetricField(int dim, Components components, Derivatives d1,
                         Derivatives d2, Domain domain)
    : dim_(dim),
      components_(std::move(components)),
      d1_(std::move(d1)),
      d2_(std::move(d2)),
      domain_(std::move(domain)) {}

MetricField MetricField::flat(const Signature& sig) {
  const int n = sig.dim();
  const Mat g = sig.metric();
  auto zeros = [n](std::size_t count) {
    return [n, count](const Vec&) {
      return std::vector<Mat>(count, Mat::Zero(n, n));
    };
  };
  return MetricField(
      n, [g](const Vec&) { return g; }, zeros(static_cast<std::size_t>(n)),
      zeros(static_cast<std::size_t>(n * n)));
}

MetricField MetricField::conformally_flat(const Signature& sig, ScalarField phi,
                                          Domain domain) {
  const int n = sig.dim();
  const Mat eta = sig.metric();
  auto value = phi.value;
  auto grad = phi.gradient;
  auto hess = phi.hessian;
  auto components = [eta, value](const Vec& x) -> Mat {
    const double p = value(x);
    if (p == 0.0) throw DomainError("conformal factor vanishes");
    return eta / (p * p);
  };
  // d_k (eta / phi^2) = -2 eta phi_k / phi^3
  auto d1 = [n, eta, value, grad](const Vec& x) {
    const double p = value(x);
    const Vec dp = grad(x);
    const double p3 = p * p * p;
    std::vector<Mat> out(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = (-2.0 * dp[k] / p3) * eta;
    return out;
  };
  // d_k d_l (eta / phi^2) = eta (6 phi_k phi_l / phi^4 - 2 phi_kl / phi^3)
  auto d2 = [n, eta, value, grad, hess](const Vec& x) {
    const double p = value(x);
    const Vec dp = grad(x);
    const Mat ddp = hess(x);
    const double p2 = p * p;
    std::vector<Mat> out(static_cast<std::size_t>(n * n));
    for (int k = 0; k < n; ++k) {
      for (int l = 0; l < n; ++l) {
        const double c = 6.0 * dp[k] * dp[l] / (p2 * p2) - 2.0 * ddp(k, l) / (p2 * p);
        out[static_cast<std::size_t>(k * n + l)] = c * eta;
      }
    }
    return out;
  };
  return MetricField(n, components, d1, d2, std::move(domain));
}

Mat MetricField::components(const Vec& x) const {
  if (x.size() != dim_) throw DimensionMismatch("metric evaluated at point of wrong dimension");
  require_inside(domain_, x, "metric evaluation");
  return components_(x);
}

std::vector<Mat> MetricField::d1(const Vec& x) const {
  require_inside(domain_, x, "metric derivative");
  if (d1_) return d1_(x);
  std::vector<Mat> out(static_cast<std::size_t>(dim_));
  for (int k = 0; k < dim_; ++k)
    out[static_cast<std::size_t>(k)] = fd_partial(components_, x, k, domain_);
  return out;
}

std::vector<Mat> MetricField::d2(const Vec& x) const {
  require_inside(domain_, x, "metric derivative");
  if (d2_) return d2_(x);
  std::vector<Mat> out(static_cast<std::size_t>(dim_ * dim_));
  for (int k = 0; k < dim_; ++k) {
    for (int l = k; l < dim_; ++l) {
      Mat v = fd_second_partial(components_, x, k, l, domain_);
      out[static_cast<std::size_t>(l * dim_ + k)] = v;
      out[static_cast<std::size_t>(k * dim_ + l)] = std::move(v);
    }
  }
  return out;
}

MetricField MetricField::with_mode(DerivativeMode mode) const {
  if (mode == this->mode()) return *this;
  if (mode == DerivativeMode::analytic)
    throw GeometryError("metric has no analytic derivative oracles");
  MetricField m(dim_, components_, domain_);
  m.split_ = split_;
  return m;
}

MetricField MetricField::with_product_split(int base_dim) const {
  if (base_dim <= 0 || base_dim >= dim_) throw GeometryError("invalid product split");
  MetricField m = *this;
  m.split_ = base_dim;
  return m;
}

// ---------------------------------------------------------------------------

namespace {

// Relative test, so uniformly small (or large) metrics are not flagged.
Mat checked_inverse(const Mat& g) {
  const Vec sv = Eigen::JacobiSVD<Mat>(g).singularValues();
  const double hi = sv.maxCoeff();
  const double lo = sv.minCoeff();
  if (!(lo > 1e-12 * hi)) {
    std::ostringstream os;
    os << "singular metric (det = " << g.determinant() << ", condition " << hi / lo << ")";
    throw SingularMetric(os.str());
  }
  return g.inverse();
}

// Christoffel symbols of the first kind, doubled: S(l, i, j) = d_i g_jl + d_j g_il - d_l g_ij.
Tensor3 lowered(const std::vector<Mat>& dg, int n) {
  Tensor3 s(n);
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        s(l, i, j) = dg[static_cast<std::size_t>(i)](j, l) +
                     dg[static_cast<std::size_t>(j)](i, l) -
                     dg[static_cast<std::size_t>(l)](i, j);
  return s;
}

Tensor3 raise(const Mat& ginv, const Tensor3& s, int n) {
  Tensor3 gamma(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int l = 0; l < n; ++l) acc += ginv(k, l) * s(l, i, j);
        gamma(k, i, j) = 0.5 * acc;
      }
  return gamma;
}

}  // namespace

Tensor3 christoffel(const MetricField& metric, const Vec& x) {
  const int n = metric.dim();
  const Mat ginv = checked_inverse(metric.components(x));
  return raise(ginv, lowered(metric.d1(x), n), n);
}

CurvatureBundle curvature(const MetricField& metric, const Vec& x) {
  const int n = metric.dim();
  CurvatureBundle b;
  b.metric = metric.components(x);
  b.inverse = checked_inverse(b.metric);
  const auto dg = metric.d1(x);
  const auto ddg = metric.d2(x);
  const Tensor3 s = lowered(dg, n);
  b.christoffel = raise(b.inverse, s, n);
  const Tensor3& gamma = b.christoffel;

  // d_p g^kl = -g^ka (d_p g_ab) g^bl
  std::vector<Mat> dginv(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p)
    dginv[static_cast<std::size_t>(p)] = -b.inverse * dg[static_cast<std::size_t>(p)] * b.inverse;

  auto dd = [&](int p, int q) -> const Mat& { return ddg[static_cast<std::size_t>(p * n + q)]; };
  // d_p Gamma^k_ij
  auto dgamma = [&](int p, int k, int i, int j) {
    double acc = 0.0;
    for (int l = 0; l < n; ++l) {
      const double ds = dd(p, i)(j, l) + dd(p, j)(i, l) - dd(p, l)(i, j);
      acc += dginv[static_cast<std::size_t>(p)](k, l) * s(l, i, j) + b.inverse(k, l) * ds;
    }
    return 0.5 * acc;
  };

  b.ricci = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double r = 0.0;
      for (int k = 0; k < n; ++k) {
        r += dgamma(k, k, i, j) - dgamma(i, k, k, j);
        for (int l = 0; l < n; ++l)
          r += gamma(k, k, l) * gamma(l, i, j) - gamma(k, i, l) * gamma(l, k, j);
      }
      b.ricci(i, j) = r;
    }
  }
  b.scalar = (b.inverse.array() * b.ricci.array()).sum();
  return b;
}

Mat ricci(const MetricField& metric, const Vec& x) { return curvature(metric, x).ricci; }

double scalar_curvature(const MetricField& metric, const Vec& x) {
  return curvature(metric, x).scalar;
}

Mat conformal_ricci_closed(const ScalarField& phi, const Signature& sig, const Vec& x) {
  const int n = sig.dim();
  if (x.size() != n) throw DimensionMismatch("conformal_ricci_closed");
  const double p = phi.value(x);
  if (p == 0.0) throw DomainError("conformal_ricci_closed: phi vanishes");
  const Vec dp = phi.gradient(x);
  const Mat hess = phi.hessian(x);
  double lap = 0.0;
  double grad2 = 0.0;
  for (int i = 0; i < n; ++i) {
    lap += sig[i] * hess(i, i);
    grad2 += sig[i] * dp[i] * dp[i];
  }
  return ((n - 2) * p * hess + (p * lap - (n - 1) * grad2) * sig.metric()) / (p * p);
}

double conformal_scalar_closed(const ProfileFunction& phi, const Direction& dir, double xi) {
  const int n = dir.dim();
  const double p = phi(xi);
  const double dp = phi.d1(xi);
  return (n - 1) * (2.0 * p * phi.d2(xi) - n * dp * dp) * dir.kappa();
}

}  // namespace warpcheck
