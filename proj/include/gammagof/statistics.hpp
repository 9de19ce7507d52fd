#pragma once

// Goodness-of-fit statistics for the Gamma family.
//
// G_{n,a} is the e^{-at}-weighted L2 norm of the empirical fixed-point process
//
//   Lambda_n(t) = sqrt(n) [ n^-1 sum B(Y_j) min(Y_j, t) - n^-1 sum 1{Y_j <= t} ],
//   B(y) = 1 - (k - 1) / y,
//
// with Y_j = X_j / lambda_hat. Two evaluations are provided: the published
// double-sum closed form (gn_closed) and an exact segment-wise integration of
// the piecewise-linear process (gn_piecewise). The second is O(n log n) and
// stays accurate when some Y_j are tiny; it is the one used by the tests
// driver. Both agree with direct quadrature.

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gammagof/errors.hpp"
#include "gammagof/estimators.hpp"
#include "gammagof/special_functions.hpp"
#include "gammagof/text.hpp"

namespace gammagof {

enum class StatisticKind { Gn, T1, T2, KS, CM, AD, WA, BH };

struct StatisticSpec {
  StatisticKind kind = StatisticKind::Gn;
  double a = 1.0;  // used by Gn, T1, T2, BH

  bool operator==(const StatisticSpec&) const = default;
};

inline bool needs_tuning(StatisticKind kind) {
  return kind == StatisticKind::Gn || kind == StatisticKind::T1 || kind == StatisticKind::T2 ||
         kind == StatisticKind::BH;
}

inline std::string_view statistic_token(StatisticKind kind) {
  switch (kind) {
    case StatisticKind::Gn: return "gn";
    case StatisticKind::T1: return "t1";
    case StatisticKind::T2: return "t2";
    case StatisticKind::KS: return "ks";
    case StatisticKind::CM: return "cm";
    case StatisticKind::AD: return "ad";
    case StatisticKind::WA: return "wa";
    case StatisticKind::BH: return "bh";
  }
  return "?";
}

/// Parses "gn:0.25", "t1:1", "ks", ...
inline StatisticSpec parse_statistic(std::string_view token) {
  token = trim(token);
  const auto colon = token.find(':');
  const auto name = trim(token.substr(0, colon));
  for (auto kind : {StatisticKind::Gn, StatisticKind::T1, StatisticKind::T2, StatisticKind::KS, StatisticKind::CM,
                    StatisticKind::AD, StatisticKind::WA, StatisticKind::BH}) {
    if (statistic_token(kind) != name) continue;
    StatisticSpec spec{kind, 1.0};
    if (needs_tuning(kind)) {
      if (colon == std::string_view::npos) throw ParseError("statistic '" + std::string(name) + "' needs ':a'");
      spec.a = parse_double(token.substr(colon + 1));
      if (!(spec.a > 0.0) || !std::isfinite(spec.a)) throw ParseError("tuning parameter must be positive");
    } else if (colon != std::string_view::npos) {
      throw ParseError("statistic '" + std::string(name) + "' takes no tuning parameter");
    }
    return spec;
  }
  throw ParseError("unknown statistic '" + std::string(token) + "'");
}

inline std::string format_statistic(const StatisticSpec& spec) {
  std::string out(statistic_token(spec.kind));
  if (needs_tuning(spec.kind)) out += ":" + format_double(spec.a);
  return out;
}

/// Order statistics Y_{1:n} <= ... <= Y_{n:n} together with the shape estimate.
struct ScaledSample {
  std::vector<double> y_sorted;
  double k_hat = 1.0;

  ScaledSample() = default;
  ScaledSample(std::vector<double> y, double k) : y_sorted(std::move(y)), k_hat(k) {
    std::stable_sort(y_sorted.begin(), y_sorted.end());
    if (y_sorted.empty()) throw DomainError("ScaledSample: empty sample");
    if (!(y_sorted.front() > 0.0)) throw DomainError("ScaledSample: values must be positive");
    if (!(k_hat > 0.0) || !std::isfinite(k_hat)) throw DomainError("ScaledSample: k_hat must be positive");
  }
  explicit ScaledSample(const FitResult& fit) : ScaledSample(fit.y, fit.k_hat) {}

  std::size_t size() const { return y_sorted.size(); }
};

/// Lambda_n(t) at a single t > 0.
inline double lambda_n(double t, const ScaledSample& s) {
  const double n = static_cast<double>(s.size());
  double transform = 0.0;
  double ecdf = 0.0;
  for (double y : s.y_sorted) {
    transform += (1.0 - (s.k_hat - 1.0) / y) * std::min(y, t);
    ecdf += y <= t ? 1.0 : 0.0;
  }
  return std::sqrt(n) * (transform - ecdf) / n;
}

/// Published closed form of G_{n,a}; O(n^2). The terms cancel like 1 / Y_{1:n}^2,
/// so the sums run in long double, and order statistics below 1e-12 are refused.
inline double gn_closed(const ScaledSample& s, double a_in) {
  if (!(a_in > 0.0)) throw DomainError("gn_closed: a must be positive");
  using real = long double;
  const auto& y = s.y_sorted;
  if (y.front() < 1e-12) throw DomainError("gn_closed: order statistic below 1e-12");
  const real k = s.k_hat;
  const real a = a_in;
  const std::size_t n = y.size();
  const real a2 = a * a;
  const real a3 = a2 * a;
  std::vector<real> b(n);
  std::vector<real> ex(n);
  for (std::size_t j = 0; j < n; ++j) {
    b[j] = 1 - (k - 1) / y[j];
    ex[j] = std::exp(-a * y[j]);
  }
  real pairs = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const real yj = y[j];
    for (std::size_t l = j + 1; l < n; ++l) {
      pairs += ex[l] / a * (yj - k) * (-b[l] / a - 1) + 2 / a3 * b[j] * b[l] +
               ex[j] / a * b[l] * ((k - 2 - yj) / a - 2 / a2 * b[j] - yj);
    }
  }
  real diag = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const real yj = y[j];
    diag += ex[j] / a * (2 * k - 1 - 2 * yj + b[j] * b[j] * (-2 / a * yj - 2 / a2)) + 2 / a3 * b[j] * b[j];
  }
  return static_cast<double>((2 * pairs + diag) / static_cast<real>(n));
}

namespace detail {

// int_0^h u^p e^{-a u} du for p = 0, 1, 2 (h may be +inf), without cancellation for small a h.
inline std::array<double, 3> exp_moments(double a, double h) {
  std::array<double, 3> out{};
  const double fact[3] = {1.0, 1.0, 2.0};
  if (std::isinf(h)) {
    for (int p = 0; p < 3; ++p) out[p] = fact[p] / std::pow(a, p + 1);
    return out;
  }
  const double x = a * h;
  for (int p = 0; p < 3; ++p) {
    // regularized lower incomplete gamma P(p + 1, x)
    double lower;
    if (x < 1.0) {
      double term = std::exp(-x);
      for (int i = 1; i <= p + 1; ++i) term *= x / i;
      lower = term;
      for (int i = p + 2; i < 60; ++i) {
        term *= x / i;
        lower += term;
        if (term < 1e-17 * lower) break;
      }
    } else {
      double partial = 0.0;
      double term = 1.0;
      for (int i = 0; i <= p; ++i) {
        if (i > 0) term *= x / i;
        partial += term;
      }
      lower = 1.0 - std::exp(-x) * partial;
    }
    out[p] = fact[p] / std::pow(a, p + 1) * lower;
  }
  return out;
}

}  // namespace detail

/// G_{n,a} by exact integration of the piecewise-linear process between order statistics.
inline double gn_piecewise(const ScaledSample& s, double a) {
  if (!(a > 0.0)) throw DomainError("gn_piecewise: a must be positive");
  const auto& y = s.y_sorted;
  const double k = s.k_hat;
  const std::size_t n = y.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  // slope[m] = n^-1 sum_{j > m} B(Y_j) (0-based: j >= m)
  std::vector<double> slope(n + 1, 0.0);
  for (std::size_t m = n; m-- > 0;) slope[m] = slope[m + 1] + (1.0 - (k - 1.0) / y[m]) * inv_n;
  double intercept_sum = 0.0;  // sum_{j <= m} (B_j Y_j - 1) = sum (Y_j - k)
  double total = 0.0;
  double lower = 0.0;
  for (std::size_t m = 0; m <= n; ++m) {
    if (m > 0) intercept_sum += y[m - 1] - k;
    const double upper = m < n ? y[m] : std::numeric_limits<double>::infinity();
    const double h = upper - lower;
    if (h > 0.0) {
      const double beta = slope[m];
      const double c = intercept_sum * inv_n + beta * lower;  // process / sqrt(n) at t = lower
      const auto j = detail::exp_moments(a, h);
      total += std::exp(-a * lower) * (c * c * j[0] + 2.0 * c * beta * j[1] + beta * beta * j[2]);
    }
    lower = upper;
  }
  return static_cast<double>(n) * total;
}

/// Baringhaus-Henze statistic on U_k = X_k / mean(X): the k = 1 specialization of the closed form.
inline double bh_statistic(std::span<const double> u, double a) {
  if (!(a > 0.0)) throw DomainError("bh_statistic: a must be positive");
  std::vector<double> v(u.begin(), u.end());
  if (v.empty()) throw DomainError("bh_statistic: empty sample");
  std::stable_sort(v.begin(), v.end());
  if (!(v.front() > 0.0)) throw DomainError("bh_statistic: values must be positive");
  const std::size_t n = v.size();
  const double a2 = a * a;
  const double a3 = a2 * a;
  std::vector<double> ex(n);
  for (std::size_t j = 0; j < n; ++j) ex[j] = std::exp(-a * v[j]);
  double pairs = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t l = j + 1; l < n; ++l) {
      pairs += ex[l] / a * (v[j] - 1.0) * (-1.0 / a - 1.0) + 2.0 / a3 +
               ex[j] / a * ((-1.0 - v[j]) / a - 2.0 / a2 - v[j]);
    }
  }
  double diag = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    diag += ex[j] / a * (1.0 - 2.0 * v[j] - 2.0 * v[j] / a - 2.0 / a2) + 2.0 / a3;
  }
  return (2.0 * pairs + diag) / static_cast<double>(n);
}

/// Laplace-transform process Z_n(t) behind T^(1) and T^(2), on y = X / lambda_hat.
/// E[(k - (1 + t) Y) e^(-tY)] vanishes for Y ~ Gamma(k, 1), not for X / mean(X).
inline double z_n(double t, std::span<const double> y, double k_hat) {
  double first = 0.0;
  double second = 0.0;
  for (double v : y) {
    const double e = std::exp(-t * v);
    first += e;
    second += v * e;
  }
  const double n = static_cast<double>(y.size());
  return std::sqrt(n) * (k_hat * first - (1.0 + t) * second) / n;
}

/// T^(1)_{n,a} = int Z_n^2(t) e^{-at} dt, closed double sum over all (j, l).
inline double t1_statistic(std::span<const double> y, double k_hat, double a) {
  if (!(a > 0.0)) throw DomainError("t1_statistic: a must be positive");
  const std::size_t n = y.size();
  auto term = [&](double yj, double yl) {
    const double s = yj + yl + a;
    const double prod = yj * yl;
    const double sum = yj + yl;
    return (prod - k_hat * sum + k_hat * k_hat) / s + (2.0 * prod - k_hat * sum) / (s * s) +
           2.0 * prod / (s * s * s);
  };
  double off = 0.0;
  double diag = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    diag += term(y[j], y[j]);
    for (std::size_t l = j + 1; l < n; ++l) off += term(y[j], y[l]);
  }
  return (diag + 2.0 * off) / static_cast<double>(n);
}

namespace detail {

struct GaussLaplaceMoments {
  double m0 = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
};

/// M_p = int_0^inf t^p e^(-u t - a t^2) dt for p = 0, 1, 2. With r = u / (2 sqrt a) and
/// F = (sqrt(pi) / 2) erfcx(r): M0 = F / sqrt a, M1 = (1 - 2 r F) / (2a),
/// M2 = (F - r (1 - 2 r F)) / (2a sqrt a). For large r both brackets cancel, so there they
/// come from the tails e_m = (m / 2) / (r + e_(m+1)) of the Laplace continued fraction:
/// F = 1 / 2D, 1 - 2rF = e_1 / D, F - r(1 - 2rF) = e_2 / (2D (r + e_2)), D = r + e_1.
inline GaussLaplaceMoments gauss_laplace_moments(double u, double a) {
  const double root_a = std::sqrt(a);
  const double r = u / (2.0 * root_a);
  double f = 0.0;
  double g = 0.0;
  double h = 0.0;
  if (r < 2.0) {
    f = 0.5 * std::sqrt(std::numbers::pi) * erfcx(r);
    g = 1.0 - 2.0 * r * f;
    h = f - r * g;
  } else {
    double e2 = 0.0;
    for (int m = 60; m >= 2; --m) e2 = 0.5 * m / (r + e2);
    const double e1 = 0.5 / (r + e2);
    const double d = r + e1;
    f = 0.5 / d;
    g = e1 / d;
    h = e2 / (2.0 * d * (r + e2));
  }
  return {f / root_a, g / (2.0 * a), h / (2.0 * a * root_a)};
}

}  // namespace detail

/// T^(2)_{n,a} = int Z_n^2(t) e^{-at^2} dt. The published double sum with
/// phi_jk = erfcx((Y_j + Y_l) / 2 sqrt a) is regrouped as
/// sum_jl [A_j A_l M0 - (A_j Y_l + A_l Y_j) M1 + Y_j Y_l M2], A_j = k_hat - Y_j,
/// so nothing overflows and large Y_j + Y_l do not cancel.
inline double t2_statistic(std::span<const double> y, double k_hat, double a) {
  if (!(a > 0.0)) throw DomainError("t2_statistic: a must be positive");
  const std::size_t n = y.size();
  auto term = [&](double yj, double yl) {
    const auto m = detail::gauss_laplace_moments(yj + yl, a);
    const long double aj = k_hat - yj;
    const long double al = k_hat - yl;
    return aj * al * m.m0 - (aj * yl + al * yj) * m.m1 + static_cast<long double>(yj) * yl * m.m2;
  };
  long double off = 0.0L;
  long double diag = 0.0L;
  for (std::size_t j = 0; j < n; ++j) {
    diag += term(y[j], y[j]);
    for (std::size_t l = j + 1; l < n; ++l) off += term(y[j], y[l]);
  }
  return static_cast<double>((diag + 2.0L * off) / static_cast<long double>(n));
}

struct EdfStatistics {
  double ks = 0.0;
  double cm = 0.0;
  double ad = 0.0;
  double wa = 0.0;
  bool clamped = false;  // some u_j was pushed into [1e-15, 1 - 1e-15]
};

/// Classical EDF statistics from u_j = P(Y_{j:n}, k_hat).
inline EdfStatistics edf_statistics(const ScaledSample& s) {
  constexpr double kClamp = 1e-15;
  const auto& y = s.y_sorted;
  const std::size_t n = y.size();
  const double nd = static_cast<double>(n);
  std::vector<double> u(n);
  std::vector<double> v(n);  // 1 - u, taken from the survival function
  EdfStatistics out;
  for (std::size_t j = 0; j < n; ++j) {
    u[j] = gamma_cdf(y[j], s.k_hat);
    v[j] = gamma_sf(y[j], s.k_hat);
    if (u[j] < kClamp || v[j] < kClamp) out.clamped = true;
    u[j] = std::clamp(u[j], kClamp, 1.0 - kClamp);
    v[j] = std::clamp(v[j], kClamp, 1.0 - kClamp);
  }
  double d_plus = 0.0;
  double d_minus = 0.0;
  double cm = 0.0;
  double ad = 0.0;
  double mean_u = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double i = static_cast<double>(j + 1);
    d_plus = std::max(d_plus, i / nd - u[j]);
    d_minus = std::max(d_minus, u[j] - (i - 1.0) / nd);
    const double dev = u[j] - (2.0 * i - 1.0) / (2.0 * nd);
    cm += dev * dev;
    ad += (2.0 * i - 1.0) * (std::log(u[j]) + std::log(v[n - 1 - j]));
    mean_u += u[j];
  }
  mean_u /= nd;
  out.ks = std::max(d_plus, d_minus);
  out.cm = cm + 1.0 / (12.0 * nd);
  out.ad = -nd - ad / nd;
  out.wa = out.cm - nd * (mean_u - 0.5) * (mean_u - 0.5);
  return out;
}

/// Evaluates several statistics on one raw sample and its fit, sharing the
/// sort and the EDF transform between them.
inline std::vector<double> compute_statistics(std::span<const StatisticSpec> specs, std::span<const double> x,
                                              const FitResult& fit) {
  std::vector<double> out;
  out.reserve(specs.size());
  std::optional<ScaledSample> scaled;
  std::optional<EdfStatistics> edf;
  std::vector<double> mean_scaled;
  auto get_scaled = [&]() -> const ScaledSample& {
    if (!scaled) scaled.emplace(fit);
    return *scaled;
  };
  auto get_mean_scaled = [&]() -> std::span<const double> {
    if (mean_scaled.empty()) {
      const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
      mean_scaled.reserve(x.size());
      for (double v : x) mean_scaled.push_back(v / mean);
    }
    return mean_scaled;
  };
  auto get_edf = [&]() -> const EdfStatistics& {
    if (!edf) edf = edf_statistics(get_scaled());
    return *edf;
  };
  for (const auto& spec : specs) {
    switch (spec.kind) {
      case StatisticKind::Gn: out.push_back(gn_piecewise(get_scaled(), spec.a)); break;
      case StatisticKind::T1: out.push_back(t1_statistic(fit.y, fit.k_hat, spec.a)); break;
      case StatisticKind::T2: out.push_back(t2_statistic(fit.y, fit.k_hat, spec.a)); break;
      case StatisticKind::BH: out.push_back(bh_statistic(get_mean_scaled(), spec.a)); break;
      case StatisticKind::KS: out.push_back(get_edf().ks); break;
      case StatisticKind::CM: out.push_back(get_edf().cm); break;
      case StatisticKind::AD: out.push_back(get_edf().ad); break;
      case StatisticKind::WA: out.push_back(get_edf().wa); break;
    }
  }
  return out;
}

inline double compute_statistic(const StatisticSpec& spec, std::span<const double> x, const FitResult& fit) {
  return compute_statistics(std::span<const StatisticSpec>(&spec, 1), x, fit).front();
}

}  // namespace gammagof
