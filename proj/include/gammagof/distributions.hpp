#pragma once

// The Gamma null family and the seven alternative families of the power
// study: seeded samplers, densities, distribution functions and moments.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "gammagof/errors.hpp"
#include "gammagof/quadrature.hpp"
#include "gammagof/rng.hpp"
#include "gammagof/special_functions.hpp"
#include "gammagof/text.hpp"

namespace gammagof {

enum class Family { Gamma, Weibull, InverseGaussian, LogNormal, Power, ShiftedPareto, Gompertz, LinearFailureRate };

/// A distribution from the study, indexed by its single parameter theta.
/// Gamma(theta) is the standard Gamma law with shape theta and scale 1.
struct AlternativeSpec {
  Family family = Family::Gamma;
  double theta = 1.0;

  AlternativeSpec() = default;
  AlternativeSpec(Family f, double t) : family(f), theta(t) {
    if (!(std::isfinite(theta) && theta > 0.0)) throw DomainError("AlternativeSpec: theta must be positive");
  }
  bool operator==(const AlternativeSpec&) const = default;
};

inline std::string_view family_token(Family f) {
  switch (f) {
    case Family::Gamma: return "gamma";
    case Family::Weibull: return "weibull";
    case Family::InverseGaussian: return "invgauss";
    case Family::LogNormal: return "lognormal";
    case Family::Power: return "power";
    case Family::ShiftedPareto: return "spareto";
    case Family::Gompertz: return "gompertz";
    case Family::LinearFailureRate: return "lfr";
  }
  return "?";
}

inline Family parse_family(std::string_view token) {
  token = trim(token);
  for (Family f : {Family::Gamma, Family::Weibull, Family::InverseGaussian, Family::LogNormal, Family::Power,
                   Family::ShiftedPareto, Family::Gompertz, Family::LinearFailureRate}) {
    if (family_token(f) == token) return f;
  }
  throw ParseError("unknown distribution family '" + std::string(token) + "'");
}

/// "invgauss:0.5" style token.
inline AlternativeSpec parse_alternative(std::string_view token) {
  const auto colon = token.find(':');
  if (colon == std::string_view::npos) throw ParseError("expected family:theta, got '" + std::string(token) + "'");
  return AlternativeSpec(parse_family(token.substr(0, colon)), parse_double(token.substr(colon + 1)));
}

inline std::string format_alternative(const AlternativeSpec& spec) {
  return std::string(family_token(spec.family)) + ":" + format_double(spec.theta);
}

/// Short label in the style of the power tables, e.g. IG(0.5).
inline std::string alternative_label(const AlternativeSpec& spec) {
  std::string prefix;
  switch (spec.family) {
    case Family::Gamma: prefix = "Gamma"; break;
    case Family::Weibull: prefix = "W"; break;
    case Family::InverseGaussian: prefix = "IG"; break;
    case Family::LogNormal: prefix = "LN"; break;
    case Family::Power: prefix = "PW"; break;
    case Family::ShiftedPareto: prefix = "SP"; break;
    case Family::Gompertz: prefix = "GO"; break;
    case Family::LinearFailureRate: prefix = "LF"; break;
  }
  return prefix + "(" + format_double(spec.theta) + ")";
}

/// Gamma(k, 1) variate: Marsaglia-Tsang squeeze, with the U^(1/k) boost for k < 1.
inline double sample_gamma(double k, RngStream& rng) {
  if (k < 1.0) {
    for (;;) {
      const double g = sample_gamma(k + 1.0, rng);
      const double x = g * std::exp(std::log(rng.uniform()) / k);
      if (x > 0.0) return x;
    }
  }
  const double d = k - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double z;
    double v;
    do {
      z = rng.normal();
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double z2 = z * z;
    if (u < 1.0 - 0.0331 * z2 * z2) return d * v;
    if (std::log(u) < 0.5 * z2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

/// Inverse Gaussian with mean 1 and shape theta (Michael-Schucany-Haas).
inline double sample_inverse_gaussian(double theta, RngStream& rng) {
  const double z = rng.normal();
  const double y = z * z;
  const double x = 1.0 + y / (2.0 * theta) - std::sqrt(4.0 * theta * y + y * y) / (2.0 * theta);
  return rng.uniform() <= 1.0 / (1.0 + x) ? x : 1.0 / x;
}

inline double sample_one(const AlternativeSpec& spec, RngStream& rng) {
  const double th = spec.theta;
  switch (spec.family) {
    case Family::Gamma: return sample_gamma(th, rng);
    case Family::Weibull: return std::pow(-std::log(rng.uniform()), 1.0 / th);
    case Family::InverseGaussian: return sample_inverse_gaussian(th, rng);
    case Family::LogNormal: return std::exp(th * rng.normal());
    case Family::Power: return std::pow(rng.uniform(), th);
    case Family::ShiftedPareto: return std::expm1(-std::log(rng.uniform()) / th);
    case Family::Gompertz: return std::log1p(-th * std::log(rng.uniform()));
    case Family::LinearFailureRate: {
      const double s = -std::log(rng.uniform());
      return 2.0 * s / (1.0 + std::sqrt(1.0 + 2.0 * th * s));
    }
  }
  throw DomainError("sample: unknown family");
}

/// n i.i.d. variates from spec, all strictly positive.
inline std::vector<double> sample(const AlternativeSpec& spec, std::size_t n, RngStream& rng) {
  if (n == 0) throw DomainError("sample: n must be at least 1");
  std::vector<double> out;
  out.reserve(n);
  while (out.size() < n) {
    const double x = sample_one(spec, rng);
    if (x > 0.0 && std::isfinite(x)) out.push_back(x);
  }
  return out;
}

/// Density of spec at x; zero outside the support.
inline double density(const AlternativeSpec& spec, double x) {
  if (!(x > 0.0) || !std::isfinite(x)) return 0.0;
  const double th = spec.theta;
  switch (spec.family) {
    case Family::Gamma: return gamma_pdf(x, th);
    case Family::Weibull: return std::exp(std::log(th) + (th - 1.0) * std::log(x) - std::pow(x, th));
    case Family::InverseGaussian:
      return std::sqrt(th / (2.0 * std::numbers::pi)) *
             std::exp(-1.5 * std::log(x) - th * (x - 1.0) * (x - 1.0) / (2.0 * x));
    case Family::LogNormal: {
      const double l = std::log(x);
      return std::exp(-l * l / (2.0 * th * th)) / (th * x * std::sqrt(2.0 * std::numbers::pi));
    }
    case Family::Power: return x <= 1.0 ? std::pow(x, (1.0 - th) / th) / th : 0.0;
    case Family::ShiftedPareto: return th * std::pow(1.0 + x, -1.0 - th);
    case Family::Gompertz: return std::exp(x + (1.0 - std::exp(x)) / th) / th;
    case Family::LinearFailureRate: return (1.0 + th * x) * std::exp(-x - th * x * x / 2.0);
  }
  return 0.0;
}

/// Distribution function of spec at any real x.
inline double cdf(const AlternativeSpec& spec, double x) {
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double th = spec.theta;
  switch (spec.family) {
    case Family::Gamma: return gamma_cdf(x, th);
    case Family::Weibull: return -std::expm1(-std::pow(x, th));
    case Family::InverseGaussian: {
      const double r = std::sqrt(th / x);
      const double upper = r * (x + 1.0);
      // e^(2 theta) Phi(-upper) = 0.5 erfcx(upper / sqrt 2) exp(2 theta - upper^2 / 2)
      const double second =
          0.5 * erfcx(upper / std::numbers::sqrt2) * std::exp(2.0 * th - 0.5 * upper * upper);
      return normal_cdf(r * (x - 1.0)) + second;
    }
    case Family::LogNormal: return normal_cdf(std::log(x) / th);
    case Family::Power: return x >= 1.0 ? 1.0 : std::pow(x, 1.0 / th);
    case Family::ShiftedPareto: return -std::expm1(-th * std::log1p(x));
    case Family::Gompertz: return -std::expm1(-std::expm1(x) / th);
    case Family::LinearFailureRate: return -std::expm1(-x - th * x * x / 2.0);
  }
  return 0.0;
}

/// E[g(X)] for X ~ spec, integrated in log-space (x = e^s) so that power-law
/// behaviour at 0 and heavy tails both become exponential decay.
inline double expectation(const AlternativeSpec& spec, const std::function<double(double)>& g,
                          double rel_tol = 1e-11) {
  auto integrand = [&](double s) {
    const double x = std::exp(s);
    if (!(x > 0.0) || !std::isfinite(x)) return 0.0;
    const double f = density(spec, x);
    return f == 0.0 ? 0.0 : g(x) * f * x;
  };
  QuadratureOptions opts;
  opts.abs_tol = 1e-14;
  opts.rel_tol = rel_tol;
  opts.max_intervals = 8000;
  auto right = integrate_to_infinity(integrand, 0.0, opts);
  auto left = integrate_to_infinity([&](double u) { return integrand(-u); }, 0.0, opts);
  const double value = right.value + left.value;
  if ((!right.converged || !left.converged) && right.error + left.error > 1e3 * rel_tol * std::max(1.0, std::fabs(value))) {
    throw NumericError("expectation: quadrature did not converge");
  }
  return value;
}

}  // namespace gammagof
