#pragma once

// Scale-equivariant estimation of (k, lambda) for the Gamma family.
//
//   mle_approx : the rational approximation to the maximum likelihood shape
//                as a function of R_n = log(mean) - mean(log), three branches
//   mle_newton : Newton iteration on log k - psi(k) = R_n
//   moment_fit : k = mean^2 / S^2, lambda = S^2 / mean (S^2 divides by n)
//
// Every estimator returns the scaled sample Y_j = X_j / lambda_hat.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gammagof/errors.hpp"
#include "gammagof/special_functions.hpp"
#include "gammagof/text.hpp"

namespace gammagof {

enum class EstimatorKind { MleApprox, MleNewton, Moment };

inline std::string_view estimator_token(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::MleApprox: return "mle-approx";
    case EstimatorKind::MleNewton: return "mle-newton";
    case EstimatorKind::Moment: return "moment";
  }
  return "?";
}

inline EstimatorKind parse_estimator(std::string_view token) {
  token = trim(token);
  if (token == "mle-approx") return EstimatorKind::MleApprox;
  if (token == "mle-newton") return EstimatorKind::MleNewton;
  if (token == "moment") return EstimatorKind::Moment;
  throw ParseError("unknown estimator '" + std::string(token) + "'");
}

struct FitResult {
  double k_hat = 0.0;
  double lambda_hat = 0.0;
  std::vector<double> y;  // X_j / lambda_hat, input order
  EstimatorKind kind = EstimatorKind::MleApprox;
};

/// Log-ratio of arithmetic to geometric mean; nonnegative, zero iff the sample is constant.
struct LogRatio {
  double r_n = 0.0;
  double mean = 0.0;
};

namespace detail {

inline void require_sample(std::span<const double> x, std::size_t min_n = 2) {
  if (x.size() < min_n) throw DomainError("sample needs at least " + std::to_string(min_n) + " observations");
  for (double v : x) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("sample must contain finite, strictly positive values");
  }
}

inline FitResult make_fit(std::span<const double> x, double k_hat, double lambda_hat, EstimatorKind kind) {
  if (!(std::isfinite(k_hat) && k_hat > 0.0 && std::isfinite(lambda_hat) && lambda_hat > 0.0)) {
    throw EstimationError("estimator produced non-finite or non-positive parameters");
  }
  FitResult fit{k_hat, lambda_hat, {}, kind};
  fit.y.reserve(x.size());
  for (double v : x) fit.y.push_back(v / lambda_hat);
  return fit;
}

}  // namespace detail

inline LogRatio log_ratio(std::span<const double> x) {
  detail::require_sample(x);
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); })) return {0.0, x.front()};
  double mean_log_ratio = 0.0;  // mean of log(X_j / mean); scale-free
  for (double v : x) mean_log_ratio += std::log(v / mean);
  mean_log_ratio /= n;
  return {std::max(0.0, -mean_log_ratio), mean};
}

/// Shape estimate from R_n by the three-branch rational approximation.
inline double approx_mle_shape(double r_n) {
  if (!(r_n > 0.0) || !std::isfinite(r_n)) throw EstimationError("approximate MLE needs R_n > 0");
  if (r_n <= 0.5772) return (0.500876 + 0.1648852 * r_n - 0.0544274 * r_n * r_n) / r_n;
  if (r_n <= 17.0) {
    return (8.898919 + 9.059950 * r_n + 0.9775373 * r_n * r_n) / (r_n * (17.79728 + 11.968477 * r_n + r_n * r_n));
  }
  return 1.0 / r_n;
}

/// Root of log k - psi(k) = r_n; Newton on log k, safeguarded by the bracket
/// 1/(2k) < log k - psi(k) < 1/(2k) + 1/k^2.
inline double solve_shape_equation(double r_n, double initial_guess, int max_iter = 50, double tol = 1e-13) {
  if (!(r_n > 0.0) || !std::isfinite(r_n)) throw EstimationError("shape equation needs R_n > 0");
  double lo = 1.0 / (2.0 * r_n);
  double hi = (1.0 + std::sqrt(1.0 + 16.0 * r_n)) / (4.0 * r_n);
  double k = (initial_guess > lo && initial_guess < hi) ? initial_guess : 0.5 * (lo + hi);
  for (int i = 0; i < max_iter; ++i) {
    const double g = log_minus_digamma(k) - r_n;
    if (std::fabs(g) <= tol * std::max(1.0, r_n)) return k;
    // h is decreasing: g > 0 means the root lies to the right.
    (g > 0.0 ? lo : hi) = k;
    const double dg = 1.0 / k - trigamma(k);  // < 0
    double next = k * std::exp(-g / (dg * k));  // Newton step in log k
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - k) <= 1e-16 * k) return next;
    k = next;
  }
  if (std::fabs(log_minus_digamma(k) - r_n) <= 1e-10 * std::max(1.0, r_n)) return k;
  throw EstimationError("Newton iteration for the Gamma shape did not converge");
}

inline FitResult mle_approx(std::span<const double> x) {
  const auto lr = log_ratio(x);
  if (!(lr.r_n > 0.0)) throw EstimationError("degenerate sample: R_n = 0");
  const double k = approx_mle_shape(lr.r_n);
  return detail::make_fit(x, k, lr.mean / k, EstimatorKind::MleApprox);
}

inline FitResult mle_newton(std::span<const double> x) {
  const auto lr = log_ratio(x);
  if (!(lr.r_n > 0.0)) throw EstimationError("degenerate sample: R_n = 0");
  const double k = solve_shape_equation(lr.r_n, approx_mle_shape(lr.r_n));
  return detail::make_fit(x, k, lr.mean / k, EstimatorKind::MleNewton);
}

inline FitResult moment_fit(std::span<const double> x) {
  detail::require_sample(x);
  const double n = static_cast<double>(x.size());
  if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); })) {
    throw EstimationError("degenerate sample: zero variance");
  }
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double s2 = ss / n;
  if (!(s2 > 0.0)) throw EstimationError("degenerate sample: zero variance");
  return detail::make_fit(x, mean * mean / s2, s2 / mean, EstimatorKind::Moment);
}

inline FitResult fit(std::span<const double> x, EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::MleApprox: return mle_approx(x);
    case EstimatorKind::MleNewton: return mle_newton(x);
    case EstimatorKind::Moment: return moment_fit(x);
  }
  throw EstimationError("unknown estimator");
}

}  // namespace gammagof
