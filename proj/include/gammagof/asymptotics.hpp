#pragma once

// Null covariance kernel of the fixed-point process, its Nystrom spectrum and
// the quantiles of the limit law sum_j kappa_j N_j^2.
//
// Under X ~ Gamma(k, 1) the process is asymptotically the Gaussian element
// with covariance K(s, t) = E[W(s) W(t)], W(t) = R(t) - r(t), where
//
//   R(t) = (X - k) 1{X <= t} + t (1 - (k - 1)/X) 1{X > t}
//   r(t) = Psi1(X) e1(t) - Psi2(X) e2(t)
//
// and Psi1, Psi2 are the influence functions of the shape and scale
// estimators. Every piece that depends on a single argument is collected in a
// KernelPoint, so a full Gram matrix needs m quadratures rather than m^2.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Eigenvalues>

#include "gammagof/errors.hpp"
#include "gammagof/estimators.hpp"
#include "gammagof/gamma_expectations.hpp"
#include "gammagof/quadrature.hpp"
#include "gammagof/rng.hpp"
#include "gammagof/special_functions.hpp"

namespace gammagof {

enum class InfluenceKind { Mle, Moment };

inline InfluenceKind influence_kind(EstimatorKind kind) {
  return kind == EstimatorKind::Moment ? InfluenceKind::Moment : InfluenceKind::Mle;
}

/// 1 - k psi'(k); strictly negative for every k > 0.
inline double mle_denominator(double k) { return 1.0 - k * trigamma(k); }

inline double psi1(double x, double k, InfluenceKind kind) {
  if (kind == InfluenceKind::Mle) return (x - k + k * (digamma(k) - std::log(x))) / mle_denominator(k);
  const double d = x - k;
  return 2.0 * x - k - d * d;
}

inline double psi2(double x, double k, InfluenceKind kind) {
  if (kind == InfluenceKind::Mle) return (trigamma(k) * (x - k) + digamma(k) - std::log(x)) / mle_denominator(k);
  const double d = x - k;
  return (x - d * d) / k;
}

/// e1(t) = P(t, k) + t E[X^-1 1{X > t}]
inline double e1(double t, double k) {
  if (!(t > 0.0)) throw DomainError("e1: t must be positive");
  if (std::isinf(t)) return 1.0;
  return gamma_cdf(t, k) + t * std::exp(std::log(upper_inc_gamma(k - 1.0, t)) - ln_gamma(k));
}

/// e2(t) = k P(t, k + 1) + t (1 - P(t, k))
inline double e2(double t, double k) {
  if (!(t > 0.0)) throw DomainError("e2: t must be positive");
  if (std::isinf(t)) return k;
  return k * gamma_cdf(t, k + 1.0) + t * gamma_sf(t, k);
}

struct KernelContext {
  double k = 2.0;
  InfluenceKind kind = InfluenceKind::Mle;
  double quad_tol = 1e-11;
  int grid_size = 128;
  double t_max = 0.0;

  KernelContext() = default;
  KernelContext(double shape, InfluenceKind estimator, double t_max_, int grid = 128, double tol = 1e-11)
      : k(shape), kind(estimator), quad_tol(tol), grid_size(grid), t_max(t_max_) {
    validate();
  }

  void validate() const {
    if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("KernelContext: k must be positive");
    if (grid_size < 16) throw DomainError("KernelContext: grid_size must be at least 16");
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw DomainError("KernelContext: t_max must be positive");
    if (!(quad_tol > 0.0 && quad_tol <= 1e-4)) throw DomainError("KernelContext: quad_tol must lie in (0, 1e-4]");
  }
};

/// Truncation point: the Gamma(k, 1) upper 1e-9 quantile plus 30 / a.
inline double default_t_max(double k, double a) { return gamma_upper_quantile(1e-9, k) + 30.0 / a; }

inline KernelContext make_kernel_context(double k, InfluenceKind kind, double a, int grid_size = 128) {
  if (!(a > 0.0)) throw DomainError("make_kernel_context: a must be positive");
  return KernelContext(k, kind, default_t_max(k, a), grid_size);
}

/// Single-argument ingredients of K(s, t).
struct KernelPoint {
  double t = 0.0;
  double cdf0 = 0.0;  // P(t, k)
  double cdf1 = 0.0;  // P(t, k + 1)
  double pdf = 0.0;   // p(t, k)
  double sq = 0.0;    // E[(X - k)^2 1{X <= t}]
  double tail = 0.0;  // E[((k-1)^2 X^-2 - (k-1) X^-1) 1{X > t}]
  double e1 = 0.0;
  double e2 = 0.0;
  double m1 = 0.0;  // E[R(t) Psi1(X)]
  double m2 = 0.0;  // E[R(t) Psi2(X)]
};

/// E[Psi_i Psi_j] for X ~ Gamma(k, 1).
struct InfluenceMoments {
  double v11 = 0.0;
  double v12 = 0.0;
  double v22 = 0.0;
};

inline InfluenceMoments influence_moments(double k, InfluenceKind kind) {
  if (kind == InfluenceKind::Mle) {
    const double d = mle_denominator(k);
    return {-k / d, -1.0 / d, -trigamma(k) / d};
  }
  return {2.0 * k * (1.0 + k), 2.0 * (1.0 + k), (3.0 + 2.0 * k) / k};
}

inline KernelPoint kernel_point(double t, const KernelContext& ctx) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("kernel_point: t must be finite and positive");
  const double k = ctx.k;
  const double tol = ctx.quad_tol;
  KernelPoint pt;
  pt.t = t;
  pt.cdf0 = gamma_cdf(t, k);
  pt.cdf1 = gamma_cdf(t, k + 1.0);
  const double cdf2 = gamma_cdf(t, k + 2.0);
  pt.pdf = gamma_pdf(t, k);
  pt.sq = k * (1.0 + k) * cdf2 - 2.0 * k * k * pt.cdf1 + k * k * pt.cdf0;
  pt.tail = expect_gamma_above(
      [&](double x) {
        const double inv = 1.0 / x;
        return (k - 1.0) * (k - 1.0) * inv * inv - (k - 1.0) * inv;
      },
      t, k, tol);
  pt.e1 = e1(t, k);
  pt.e2 = e2(t, k);

  const double sf0 = 1.0 - pt.cdf0;
  const double sf1 = 1.0 - pt.cdf1;
  if (ctx.kind == InfluenceKind::Mle) {
    const double psi = digamma(k);
    const double tri = trigamma(k);
    const double d = mle_denominator(k);
    // E[(X - k) (psi - log X) 1{X <= t}] and E[B(X) (psi - log X) 1{X > t}]
    const double log_below = expect_gamma_below([&](double x) { return std::log(x) * (x - k); }, t, k, tol);
    const double log_above =
        expect_gamma_above([&](double x) { return (1.0 - (k - 1.0) / x) * std::log(x); }, t, k, tol);
    const double centred_log_below = k * psi * (pt.cdf1 - pt.cdf0) - log_below;
    const double centred_log_above = psi * pt.pdf - log_above;
    // E[B(X) (X - k) 1{X > t}]
    const double linear_above = 1.0 - k * pt.cdf1 + (k - 1.0) * pt.cdf0 - k * pt.pdf;
    pt.m1 = (pt.sq + k * centred_log_below + t * linear_above + t * k * centred_log_above) / d;
    pt.m2 = (tri * pt.sq + centred_log_below + t * tri * linear_above + t * centred_log_above) / d;
  } else {
    const double cdf3 = gamma_cdf(t, k + 3.0);
    const double sf2 = 1.0 - cdf2;
    const double k2 = k * k;
    const double k3 = k2 * k;
    const double second = k * (1.0 + k) * cdf2 - k2 * pt.cdf1;  // E[X (X - k) 1{X <= t}]
    const double cubic = k * (k + 1.0) * (k + 2.0) * cdf3 - 3.0 * k2 * (1.0 + k) * cdf2 + 3.0 * k3 * pt.cdf1 -
                         k3 * pt.cdf0;  // E[(X - k)^3 1{X <= t}]
    const double quad_above =
        k * (1.0 + k) * sf2 + 2.0 * k * (k - 1.0) * sf0 + k * (1.0 - 3.0 * k) * sf1 + k2 * pt.pdf;
    const double lin_above = k * sf1 + (1.0 - k) * sf0;
    pt.m1 = 2.0 * second - cubic - k2 * (pt.cdf1 - pt.cdf0) - k * t * pt.pdf - t * quad_above + 2.0 * t * lin_above;
    pt.m2 = (second - cubic - t * quad_above + t * lin_above) / k;
  }
  return pt;
}

/// K(s, t) from precomputed points; symmetric in its arguments.
inline double kernel(const KernelPoint& a, const KernelPoint& b, const KernelContext& ctx,
                     const InfluenceMoments& v) {
  const double k = ctx.k;
  const KernelPoint& lo = a.t <= b.t ? a : b;
  const KernelPoint& hi = a.t <= b.t ? b : a;
  const double s = lo.t;
  const double t = hi.t;
  const double rr = lo.sq + s * t * hi.tail + s * k * (hi.cdf1 - lo.cdf1) + s * (1.0 - k) * (hi.cdf0 - lo.cdf0) +
                    s * k * (hi.pdf - lo.pdf) + s * t * hi.pdf;
  const double cross = (lo.m1 * hi.e1 - lo.m2 * hi.e2) + (hi.m1 * lo.e1 - hi.m2 * lo.e2);
  const double est = v.v11 * lo.e1 * hi.e1 - v.v12 * (lo.e1 * hi.e2 + lo.e2 * hi.e1) + v.v22 * lo.e2 * hi.e2;
  return rr - cross + est;
}

inline double kernel(double s, double t, const KernelContext& ctx) {
  const auto v = influence_moments(ctx.k, ctx.kind);
  return kernel(kernel_point(s, ctx), kernel_point(t, ctx), ctx, v);
}

/// Gram matrix [K(t_i, t_j)].
inline Eigen::MatrixXd kernel_matrix(const std::vector<double>& points, const KernelContext& ctx) {
  const auto v = influence_moments(ctx.k, ctx.kind);
  std::vector<KernelPoint> pts;
  pts.reserve(points.size());
  for (double t : points) pts.push_back(kernel_point(t, ctx));
  const auto m = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd gram(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      gram(i, j) = gram(j, i) = kernel(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(j)], ctx, v);
    }
  }
  return gram;
}

struct EigenSpectrum {
  std::vector<double> eigenvalues;  // descending, negatives clamped to 0
  std::vector<double> nodes;
  std::vector<double> weights;  // Gauss-Legendre weight times e^(-a t)
  double min_raw = 0.0;         // smallest eigenvalue before clamping
  int clamped = 0;              // how many were set to zero

  double trace() const {
    double s = 0.0;
    for (double x : eigenvalues) s += x;
    return s;
  }
};

/// Eigenvalues of f -> int_0^t_max K(., t) f(t) e^(-a t) dt by Nystrom discretisation.
/// Nodes are Gauss-Legendre in u = 1 - e^(-a t), which absorbs the weight and
/// puts the nodes where it lives; weights[i] already include e^(-a t_i).
inline EigenSpectrum nystrom_eigenvalues(const KernelContext& ctx, double a) {
  ctx.validate();
  if (!(a > 0.0)) throw DomainError("nystrom_eigenvalues: a must be positive");
  const auto rule = gauss_legendre(ctx.grid_size, 0.0, -std::expm1(-a * ctx.t_max));
  EigenSpectrum out;
  out.nodes.resize(rule.nodes.size());
  out.weights.resize(rule.weights.size());
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    out.nodes[i] = -std::log1p(-rule.nodes[i]) / a;
    out.weights[i] = rule.weights[i] / a;
  }
  Eigen::MatrixXd mat = kernel_matrix(out.nodes, ctx);
  Eigen::VectorXd root(static_cast<Eigen::Index>(out.weights.size()));
  for (std::size_t i = 0; i < out.weights.size(); ++i) root(static_cast<Eigen::Index>(i)) = std::sqrt(out.weights[i]);
  mat = root.asDiagonal() * mat * root.asDiagonal();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(mat, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("nystrom_eigenvalues: eigen-solver failed");
  const auto& ev = solver.eigenvalues();  // ascending
  out.min_raw = ev.size() > 0 ? ev(0) : 0.0;
  out.eigenvalues.reserve(static_cast<std::size_t>(ev.size()));
  for (Eigen::Index i = ev.size(); i-- > 0;) {
    double x = ev(i);
    if (x < 0.0) {
      x = 0.0;
      ++out.clamped;
    }
    out.eigenvalues.push_back(x);
  }
  return out;
}

/// Empirical (1 - alpha) quantile of sum_j kappa_j N_j^2, ignoring kappa_j < 1e-8 kappa_1.
inline double limit_quantile(const std::vector<double>& eigenvalues, double alpha, std::size_t draws,
                             RngStream& rng) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("limit_quantile: alpha must lie in (0, 1)");
  if (draws == 0) throw DomainError("limit_quantile: draws must be positive");
  if (eigenvalues.empty()) return 0.0;
  std::vector<double> kappa(eigenvalues);
  std::sort(kappa.begin(), kappa.end(), std::greater<>());
  const double cutoff = 1e-8 * kappa.front();
  kappa.erase(std::find_if(kappa.begin(), kappa.end(), [&](double x) { return !(x >= cutoff) || x <= 0.0; }),
              kappa.end());
  std::vector<double> sums(draws);
  for (auto& value : sums) {
    double acc = 0.0;
    for (double kj : kappa) {
      const double z = rng.normal();
      acc += kj * z * z;
    }
    value = acc;
  }
  const auto idx = std::min(draws - 1, static_cast<std::size_t>(std::ceil((1.0 - alpha) * static_cast<double>(draws))) -
                                           (draws > 1 ? 1 : 0));
  std::nth_element(sums.begin(), sums.begin() + static_cast<std::ptrdiff_t>(idx), sums.end());
  return sums[idx];
}

inline double limit_quantile(const EigenSpectrum& spectrum, double alpha, std::size_t draws, RngStream& rng) {
  return limit_quantile(spectrum.eigenvalues, alpha, draws, rng);
}

}  // namespace gammagof
