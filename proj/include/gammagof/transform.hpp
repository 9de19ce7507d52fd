#pragma once

// The fixed-point transform T^X(t) = E[(1 - (k - 1)/X) min{X, t}] of a
// positive random variable, which equals the Gamma(k, 1) distribution
// function exactly when X ~ Gamma(k, 1).
//
//   empirical_transform  sample version on a grid, with the empirical CDF
//   exact_transform      T^X for X ~ Gamma(k, 1) by quadrature
//   delta_k              L2 distance between T^X and F for an alternative,
//                        the limit of G_{n,a} / n under that alternative
//   mle_limit_params     probability limits of the maximum likelihood fit

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "gammagof/distributions.hpp"
#include "gammagof/errors.hpp"
#include "gammagof/gamma_expectations.hpp"
#include "gammagof/quadrature.hpp"
#include "gammagof/special_functions.hpp"
#include "gammagof/statistics.hpp"

namespace gammagof {

struct TransformCurve {
  std::vector<double> grid;
  std::vector<double> t_hat;
  std::vector<double> f_hat;
  std::size_t n = 0;

  /// sqrt(n) (t_hat - f_hat) at grid point i, i.e. Lambda_n(grid[i]).
  double process(std::size_t i) const { return std::sqrt(static_cast<double>(n)) * (t_hat[i] - f_hat[i]); }
};

/// 512 (by default) geometrically spaced points from Y_{1:n}/10 to 2 Y_{n:n}.
inline std::vector<double> diagnostic_grid(const ScaledSample& s, std::size_t points = 512) {
  if (points < 2) throw DomainError("diagnostic_grid: need at least two points");
  const double lo = s.y_sorted.front() / 10.0;
  const double hi = 2.0 * s.y_sorted.back();
  std::vector<double> grid(points);
  const double ratio = std::log(hi / lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) grid[i] = lo * std::exp(ratio * static_cast<double>(i));
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

inline TransformCurve empirical_transform(const ScaledSample& s, std::span<const double> grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0)) throw DomainError("empirical_transform: grid must be positive");
    if (i > 0 && grid[i] < grid[i - 1]) throw DomainError("empirical_transform: grid must be ascending");
  }
  const auto& y = s.y_sorted;
  const std::size_t n = y.size();
  const double k = s.k_hat;
  // below[m] = sum_{j < m} (Y_j - (k - 1)),  above[m] = sum_{j >= m} B(Y_j)
  std::vector<double> below(n + 1, 0.0);
  std::vector<double> above(n + 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) below[j + 1] = below[j] + (y[j] - (k - 1.0));
  for (std::size_t j = n; j-- > 0;) above[j] = above[j + 1] + (1.0 - (k - 1.0) / y[j]);

  TransformCurve curve;
  curve.n = n;
  curve.grid.assign(grid.begin(), grid.end());
  curve.t_hat.reserve(grid.size());
  curve.f_hat.reserve(grid.size());
  const double nd = static_cast<double>(n);
  for (double t : grid) {
    const auto m = static_cast<std::size_t>(std::upper_bound(y.begin(), y.end(), t) - y.begin());
    curve.t_hat.push_back((below[m] + t * above[m]) / nd);
    curve.f_hat.push_back(static_cast<double>(m) / nd);
  }
  return curve;
}

/// T^X(t) for X ~ Gamma(k, 1) by direct quadrature of the defining expectation.
inline double exact_transform(double t, double k, double tol = 1e-13) {
  if (!(t > 0.0) || !(k > 0.0)) throw DomainError("exact_transform: requires t > 0 and k > 0");
  if (std::isinf(t)) return 1.0;
  const double below = expect_gamma_below([&](double x) { return x - (k - 1.0); }, t, k, tol);
  const double above = expect_gamma_above([&](double x) { return 1.0 - (k - 1.0) / x; }, t, k, tol);
  return below + t * above;
}

namespace detail {

inline double support_max(const AlternativeSpec& spec) {
  return spec.family == Family::Power ? 1.0 : std::numeric_limits<double>::infinity();
}

// int_lo^hi g(z) f_Z(z) dz for Z = X / lambda, integrated in s = log z.
template <class G>
double scaled_integral(const AlternativeSpec& spec, double lambda, const G& g, double lo, double hi, double tol) {
  hi = std::min(hi, support_max(spec) / lambda);
  if (!(hi > lo)) return 0.0;
  auto f = [&](double s) {
    const double z = std::exp(s);
    if (!(z > 0.0) || !std::isfinite(z)) return 0.0;
    const double dens = density(spec, lambda * z);
    return dens == 0.0 ? 0.0 : g(z) * lambda * dens * z;
  };
  QuadratureOptions opts;
  opts.abs_tol = tol;
  opts.rel_tol = tol;
  opts.max_intervals = 6000;
  QuadratureResult r;
  if (lo == 0.0 && std::isinf(hi)) {
    const auto left = integrate_to_infinity([&](double u) { return f(-u); }, 0.0, opts);
    const auto right = integrate_to_infinity(f, 0.0, opts);
    r = {left.value + right.value, left.error + right.error, left.intervals + right.intervals,
         left.converged && right.converged};
  } else if (lo == 0.0) {
    const double top = std::log(hi);
    r = integrate_to_infinity([&](double u) { return f(top - u); }, 0.0, opts);
  } else if (std::isinf(hi)) {
    const double bottom = std::log(lo);
    r = integrate_to_infinity([&](double u) { return f(bottom + u); }, 0.0, opts);
  } else {
    r = integrate(f, std::log(lo), std::log(hi), opts);
  }
  if (!r.converged && r.error > 1e3 * tol * std::max(1.0, std::fabs(r.value))) {
    throw NumericError("delta_k: inner quadrature did not converge");
  }
  return r.value;
}

}  // namespace detail

/// T^Z(t) - P(Z <= t) for Z = X / lambda, X ~ spec, at shape k.
inline double transform_discrepancy(const AlternativeSpec& spec, double k, double lambda, double t,
                                    double tol = 1e-11) {
  const double inf = std::numeric_limits<double>::infinity();
  const double below = detail::scaled_integral(spec, lambda, [&](double z) { return z - (k - 1.0); }, 0.0, t, tol);
  const double above =
      detail::scaled_integral(spec, lambda, [&](double z) { return 1.0 - (k - 1.0) / z; }, t, inf, tol);
  return below + t * above - cdf(spec, lambda * t);
}

/// int_0^inf (T^Z(t) - P(Z <= t))^2 e^(-a t) dt with Z = X / lambda.
inline double delta_k(const AlternativeSpec& spec, double k, double lambda, double a, double tol = 1e-9) {
  if (!(k > 0.0) || !(lambda > 0.0) || !(a > 0.0)) throw DomainError("delta_k: k, lambda and a must be positive");
  auto integrand = [&](double t) {
    if (!(t > 0.0)) return 0.0;
    const double d = transform_discrepancy(spec, k, lambda, t);
    return d * d * std::exp(-a * t);
  };
  QuadratureOptions opts;
  opts.abs_tol = 1e-15;
  opts.rel_tol = tol;
  opts.max_intervals = 2000;
  const double edge = detail::support_max(spec) / lambda;
  QuadratureResult r;
  if (std::isfinite(edge)) {
    const auto left = integrate(integrand, 0.0, edge, opts);
    const auto right = integrate_to_infinity(integrand, edge, opts);
    r = {left.value + right.value, left.error + right.error, left.intervals + right.intervals,
         left.converged && right.converged};
  } else {
    r = integrate_to_infinity(integrand, 0.0, opts);
  }
  if (!r.converged && r.error > 1e2 * tol * std::max(1e-12, std::fabs(r.value))) {
    throw NumericError("delta_k: outer quadrature did not converge");
  }
  return std::max(0.0, r.value);
}

struct LimitParams {
  double k = 1.0;
  double lambda = 1.0;
};

/// Root of log k - psi(k) = log E X - E log X and lambda = E X / k.
inline LimitParams mle_limit_params(const AlternativeSpec& spec) {
  const double mean = expectation(spec, [](double x) { return x; });
  const double mean_log = expectation(spec, [](double x) { return std::log(x); });
  const double r = std::log(mean) - mean_log;
  if (!(r > 0.0) || !std::isfinite(r)) throw NumericError("mle_limit_params: log E X - E log X must be positive");
  // 1/(2k) < log k - psi(k) < 1/(2k) + 1/k^2 brackets the root.
  double lo = 1.0 / (2.0 * r);
  double hi = (1.0 + std::sqrt(1.0 + 16.0 * r)) / (4.0 * r);
  if (!(log_minus_digamma(lo) >= r && log_minus_digamma(hi) <= r)) {
    throw NumericError("mle_limit_params: root not bracketed");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-10 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (log_minus_digamma(mid) > r ? lo : hi) = mid;
  }
  double k = 0.5 * (lo + hi);
  for (int i = 0; i < 3; ++i) {
    const double step = (log_minus_digamma(k) - r) / (1.0 / k - trigamma(k));
    const double next = k - step;
    if (!(next > 0.0)) break;
    k = next;
  }
  return {k, mean / k};
}

}  // namespace gammagof
