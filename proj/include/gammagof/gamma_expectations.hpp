#pragma once

// Truncated expectations E[g(X) 1{X <= s}] and E[g(X) 1{X > s}] for X ~ Gamma(k, 1).
//
// Near the origin the lower piece substitutes x = c w^(1/k), which turns
// x^(k-1) dx into a constant multiple of dw and removes the singularity at 0
// for k < 1. Past c = min(s, 1) the density is integrated directly, split at
// the mode so the adaptive rule cannot step over the bulk.

#include <algorithm>
#include <cmath>
#include <limits>

#include "gammagof/errors.hpp"
#include "gammagof/quadrature.hpp"
#include "gammagof/special_functions.hpp"

namespace gammagof {

inline QuadratureOptions gamma_expectation_options(double tol) {
  QuadratureOptions opts;
  opts.abs_tol = tol;
  opts.rel_tol = tol;
  opts.max_intervals = 6000;
  return opts;
}

template <class G>
double expect_gamma_above(const G& g, double s, double k, double tol = 1e-12);

template <class G>
double expect_gamma_below(const G& g, double s, double k, double tol = 1e-12) {
  if (!(s > 0.0)) return 0.0;
  const auto opts = gamma_expectation_options(tol);
  auto check = [&](const QuadratureResult& r) {
    if (!r.converged && r.error > 1e3 * tol * std::max(1.0, std::fabs(r.value))) {
      throw NumericError("expect_gamma_below: quadrature did not converge");
    }
    return r.value;
  };
  // substituted piece on [0, c]; beyond c the density is smooth and bounded
  const double c = std::min(s, 1.0);
  auto substituted = [&](double w) {
    if (!(w > 0.0)) return 0.0;
    const double x = c * std::pow(w, 1.0 / k);
    if (!(x > 0.0)) return 0.0;
    return g(x) * std::exp(-x);
  };
  double total = std::exp(k * std::log(c) - ln_gamma(k + 1.0)) * check(integrate(substituted, 0.0, 1.0, opts));
  if (s == c) return total;

  const double lg = ln_gamma(k);
  auto weighted = [&](double x) {
    const double dens = std::exp((k - 1.0) * std::log(x) - x - lg);
    return dens == 0.0 ? 0.0 : g(x) * dens;
  };
  const double mode = std::max(c, k);
  const double far = mode + 40.0 + 10.0 * std::sqrt(k);
  if (mode > c) total += check(integrate(weighted, c, std::min(s, mode), opts));
  if (s > mode) total += check(integrate(weighted, mode, std::min(s, far), opts));
  if (s > far) {
    total += expect_gamma_above(g, far, k, tol);
    if (std::isfinite(s)) total -= expect_gamma_above(g, s, k, tol);
  }
  return total;
}

template <class G>
double expect_gamma_above(const G& g, double s, double k, double tol) {
  if (!(s > 0.0)) throw DomainError("expect_gamma_above: s must be positive");
  const double lg = ln_gamma(k);
  auto integrand = [&](double x) {
    const double dens = std::exp((k - 1.0) * std::log(x) - x - lg);
    return dens == 0.0 ? 0.0 : g(x) * dens;
  };
  const auto r = integrate_to_infinity(integrand, s, gamma_expectation_options(tol));
  if (!r.converged && r.error > 1e3 * tol * std::max(1.0, std::fabs(r.value))) {
    throw NumericError("expect_gamma_above: quadrature did not converge");
  }
  return r.value;
}

}  // namespace gammagof
