#pragma once

// Special functions used throughout the library: log-gamma, digamma,
// trigamma, incomplete gamma (regularized and non-regularized, including
// non-positive first argument), the Gamma density/CDF and error functions.
//
// Everything here is a pure function of its arguments.

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gammagof/errors.hpp"

namespace gammagof {

/// Shape/scale pair of a Gamma law; density lambda^-k / Gamma(k) t^(k-1) e^(-t/lambda).
struct GammaParams {
  double k = 1.0;
  double lambda = 1.0;

  GammaParams() = default;
  GammaParams(double shape, double scale) : k(shape), lambda(scale) {
    if (!(std::isfinite(k) && k > 0.0) || !(std::isfinite(lambda) && lambda > 0.0)) {
      throw DomainError("GammaParams: shape and scale must be finite and positive");
    }
  }
};

namespace detail {

inline constexpr double kEulerGamma = 0.57721566490153286060651209;
inline constexpr double kTiny = 1e-300;
inline constexpr double kEps = 1e-16;
inline constexpr int kMaxIncGammaIter = 100000;

inline void require_positive(double x, const char* fn) {
  if (!(std::isfinite(x) && x > 0.0)) {
    throw DomainError(std::string(fn) + ": argument must be finite and positive");
  }
}

// Lower regularized incomplete gamma by its power series; valid for x < a + 1.
inline double gamma_p_series(double a, double x, double log_gamma_a) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int i = 0; i < kMaxIncGammaIter; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - log_gamma_a);
}

// Continued fraction for Gamma(a, x) * e^x * x^-a (modified Lentz), valid for x >= a + 1.
inline double gamma_q_continued_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIncGammaIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return h;
}

// Exponential integral E1(t) = Gamma(0, t), t > 0.
inline double exponential_integral_e1(double t) {
  if (t <= 1.0) {
    double sum = 0.0;
    double term = 1.0;
    for (int n = 1; n < 200; ++n) {
      term *= -t / n;
      const double add = -term / n;
      sum += add;
      if (std::fabs(add) < std::fabs(sum) * kEps) break;
    }
    return -kEulerGamma - std::log(t) + sum;
  }
  double b = t + 1.0;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIncGammaIter; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double delta = c * d;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return h * std::exp(-t);
}

}  // namespace detail

/// log Gamma(x) for x > 0 (Lanczos, g = 7, with reflection below 1/2).
inline double ln_gamma(double x) {
  detail::require_positive(x, "ln_gamma");
  static constexpr std::array<double, 9> kLanczos = {
      0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
      771.32342877765313,   -176.61502916214059,   12.507343278686905,
      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  if (x < 0.5) {
    // Reflection keeps relative accuracy near the pole at 0.
    return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - ln_gamma(1.0 - x);
  }
  const double z = x - 1.0;
  double series = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) series += kLanczos[i] / (z + static_cast<double>(i));
  const double t = z + 7.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(series);
}

/// Digamma psi(x) = Gamma'(x)/Gamma(x), x > 0.
inline double digamma(double x) {
  detail::require_positive(x, "digamma");
  double shift = 0.0;
  while (x < 10.0) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  const double x2 = 1.0 / (x * x);
  const double tail =
      x2 * (1.0 / 12 -
            x2 * (1.0 / 120 -
                  x2 * (1.0 / 252 - x2 * (1.0 / 240 - x2 * (1.0 / 132 - x2 * (691.0 / 32760 - x2 / 12))))));
  return shift + std::log(x) - 0.5 / x - tail;
}

/// Trigamma psi'(x), x > 0.
inline double trigamma(double x) {
  detail::require_positive(x, "trigamma");
  double shift = 0.0;
  while (x < 10.0) {
    shift += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double x2 = inv * inv;
  const double tail =
      inv * x2 *
      (1.0 / 6 -
       x2 * (1.0 / 30 - x2 * (1.0 / 42 - x2 * (1.0 / 30 - x2 * (5.0 / 66 - x2 * (691.0 / 2730 - x2 * 7.0 / 6))))));
  return shift + inv + 0.5 * x2 + tail;
}

/// log(x) - psi(x), evaluated without cancellation for large x. Positive and decreasing.
inline double log_minus_digamma(double x) {
  detail::require_positive(x, "log_minus_digamma");
  if (x < 10.0) return std::log(x) - digamma(x);
  const double inv = 1.0 / x;
  const double x2 = inv * inv;
  return 0.5 * inv +
         x2 * (1.0 / 12 - x2 * (1.0 / 120 - x2 * (1.0 / 252 - x2 * (1.0 / 240 - x2 * (1.0 / 132 - x2 * 691.0 / 32760)))));
}

/// Regularized lower incomplete gamma P(t, k): the Gamma(k, 1) distribution function.
inline double gamma_cdf(double t, double k) {
  if (!(t >= 0.0) || !(std::isfinite(k) && k > 0.0)) {
    throw DomainError("gamma_cdf: requires t >= 0 and k > 0");
  }
  if (t == 0.0) return 0.0;
  if (std::isinf(t)) return 1.0;
  const double lg = ln_gamma(k);
  if (t < k + 1.0) return detail::gamma_p_series(k, t, lg);
  return 1.0 - std::exp(-t + k * std::log(t) - lg) * detail::gamma_q_continued_fraction(k, t);
}

/// Survival function 1 - P(t, k), accurate in the upper tail.
inline double gamma_sf(double t, double k) {
  if (!(t >= 0.0) || !(std::isfinite(k) && k > 0.0)) {
    throw DomainError("gamma_sf: requires t >= 0 and k > 0");
  }
  if (t == 0.0) return 1.0;
  if (std::isinf(t)) return 0.0;
  const double lg = ln_gamma(k);
  if (t < k + 1.0) return 1.0 - detail::gamma_p_series(k, t, lg);
  return std::exp(-t + k * std::log(t) - lg) * detail::gamma_q_continued_fraction(k, t);
}

/// Point t with gamma_sf(t, k) = tail, found by bracketing and bisection.
inline double gamma_upper_quantile(double tail, double k) {
  if (!(tail > 0.0 && tail < 1.0)) throw DomainError("gamma_upper_quantile: tail must lie in (0, 1)");
  detail::require_positive(k, "gamma_upper_quantile");
  double lo = 0.0;
  double hi = k + 1.0;
  while (gamma_sf(hi, k) > tail) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (gamma_sf(mid, k) > tail ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Gamma(k, lambda) density at t > 0.
inline double gamma_pdf(double t, const GammaParams& params) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("gamma_pdf: t must be finite and positive");
  const double z = t / params.lambda;
  return std::exp((params.k - 1.0) * std::log(z) - z - ln_gamma(params.k)) / params.lambda;
}

/// Standard Gamma(k, 1) density.
inline double gamma_pdf(double t, double k) { return gamma_pdf(t, GammaParams{k, 1.0}); }

/// Non-regularized upper incomplete gamma Gamma(a, t) = int_t^inf x^(a-1) e^-x dx.
/// Any finite a; a <= 0 goes through Gamma(a, t) = (Gamma(a+1, t) - t^a e^-t) / a.
inline double upper_inc_gamma(double a, double t) {
  if (!(std::isfinite(t) && t > 0.0)) throw DomainError("upper_inc_gamma: t must be finite and positive");
  if (!std::isfinite(a)) throw DomainError("upper_inc_gamma: a must be finite");
  if (a > 0.0) {
    if (t >= a + 1.0) return std::exp(-t + a * std::log(t)) * detail::gamma_q_continued_fraction(a, t);
    return std::exp(ln_gamma(a)) * gamma_sf(t, a);
  }
  const double steps = std::ceil(-a);
  double base = a + steps;  // in [0, 1)
  double value;
  if (base == 0.0) {
    value = detail::exponential_integral_e1(t);
  } else {
    value = upper_inc_gamma(base, t);
  }
  const double log_t = std::log(t);
  for (int i = 0; i < static_cast<int>(steps); ++i) {
    base -= 1.0;
    value = (value - std::exp(base * log_t - t)) / base;
  }
  return value;
}

/// Error function erf(x) = 2/sqrt(pi) int_0^x e^(-t^2) dt on x >= 0.
inline double erf_paper(double x) {
  if (!(x >= 0.0)) throw DomainError("erf_paper: x must be nonnegative");
  return std::erf(x);
}

/// Scaled complementary error function exp(x^2) erfc(x); finite for every x >= 0.
inline double erfcx(double x) {
  if (x < 25.0) return std::exp(x * x) * std::erfc(x);
  // Asymptotic series; at x >= 25 the terms shrink by at least 1/1250 per order.
  const double inv2 = 1.0 / (2.0 * x * x);
  double term = 1.0;
  double sum = 1.0;
  for (int n = 1; n < 8; ++n) {
    term *= -(2.0 * n - 1.0) * inv2;
    sum += term;
  }
  return sum / (x * std::sqrt(std::numbers::pi));
}

/// Standard normal distribution function.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// Standard normal quantile (Acklam's rational approximation plus one Halley step).
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0, 1)");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (p <= 1 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    const double q = std::sqrt(-2 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2 * std::numbers::pi) * std::exp(x * x / 2);
  return x - u / (1 + x * u / 2);
}

}  // namespace gammagof
