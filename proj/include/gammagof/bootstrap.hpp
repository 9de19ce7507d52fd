#pragma once

// Parametric bootstrap calibration. Replicate i draws n variates from
// Gamma(k_hat, 1) on stream (seed, i), refits the chosen estimator and
// evaluates every requested statistic, so several statistics can share one
// replicate set.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gammagof/distributions.hpp"
#include "gammagof/errors.hpp"
#include "gammagof/estimators.hpp"
#include "gammagof/parallel.hpp"
#include "gammagof/rng.hpp"
#include "gammagof/statistics.hpp"

namespace gammagof {

struct BootstrapOptions {
  EstimatorKind estimator = EstimatorKind::MleApprox;
  std::size_t b = 500;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  int max_redraws = 10;
  bool reestimate = true;        // refit on every replicate
  double replicate_scale = 1.0;  // scale of the Gamma law replicates are drawn from

  void validate() const {
    if (b < 20) throw DomainError("bootstrap: b must be at least 20");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("bootstrap: alpha must lie in (0, 1)");
    if (!(replicate_scale > 0.0)) throw DomainError("bootstrap: replicate scale must be positive");
  }
};

struct TestOutcome {
  StatisticSpec spec;
  double statistic = 0.0;
  double critical_value = 0.0;
  double p_value = 1.0;
  bool reject = false;
  std::size_t b = 0;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  EstimatorKind estimator = EstimatorKind::MleApprox;
  FitResult fit;
};

/// Interpolated upper critical value T*_(j) + (1 - alpha)(T*_(j+1) - T*_(j)),
/// j = floor((1 - alpha) b), order statistics counted from 1.
inline double critical_value_from(std::span<const double> sorted, double alpha) {
  if (sorted.empty()) throw DomainError("critical_value_from: no replicates");
  const std::size_t b = sorted.size();
  const double q = (1.0 - alpha) * static_cast<double>(b);
  auto j = static_cast<std::size_t>(std::floor(q + 1e-9));
  j = std::clamp<std::size_t>(j, 1, b);
  if (j == b) return sorted[b - 1];
  return sorted[j - 1] + (1.0 - alpha) * (sorted[j] - sorted[j - 1]);
}

/// (1 + #{T* >= t_obs}) / (b + 1)
inline double p_value_from(std::span<const double> sorted, double t_obs) {
  const auto first = std::lower_bound(sorted.begin(), sorted.end(), t_obs);
  const auto above = static_cast<double>(sorted.end() - first);
  return (1.0 + above) / (static_cast<double>(sorted.size()) + 1.0);
}

/// Sorted replicate statistics, one vector per spec.
inline std::vector<std::vector<double>> bootstrap_distribution(std::size_t n, double k_hat,
                                                               std::span<const StatisticSpec> specs,
                                                               const BootstrapOptions& opts) {
  opts.validate();
  if (n < 2) throw DomainError("bootstrap: sample size must be at least 2");
  const std::size_t m = specs.size();
  std::vector<double> flat(opts.b * m);
  parallel_for(opts.b, opts.workers, [&](std::size_t i) {
    RngStream rng(opts.seed, i);
    for (int attempt = 0;; ++attempt) {
      std::vector<double> x(n);
      for (auto& v : x) v = opts.replicate_scale * sample_gamma(k_hat, rng);
      try {
        std::vector<double> values;
        if (opts.reestimate) {
          values = compute_statistics(specs, x, fit(x, opts.estimator));
        } else {
          FitResult fixed{k_hat, opts.replicate_scale, {}, opts.estimator};
          for (double v : x) fixed.y.push_back(v / opts.replicate_scale);
          values = compute_statistics(specs, x, fixed);
        }
        std::copy(values.begin(), values.end(), flat.begin() + static_cast<std::ptrdiff_t>(i * m));
        return;
      } catch (const EstimationError&) {
        if (attempt >= opts.max_redraws) throw;
      } catch (const DomainError&) {
        if (attempt >= opts.max_redraws) throw;
      }
    }
  });
  std::vector<std::vector<double>> out(m, std::vector<double>(opts.b));
  for (std::size_t i = 0; i < opts.b; ++i) {
    for (std::size_t s = 0; s < m; ++s) out[s][i] = flat[i * m + s];
  }
  for (auto& v : out) std::sort(v.begin(), v.end());
  return out;
}

/// Fits the sample once and tests it against every spec on a shared replicate set.
inline std::vector<TestOutcome> gof_tests(std::span<const double> x, std::span<const StatisticSpec> specs,
                                          const BootstrapOptions& opts) {
  opts.validate();
  const FitResult fitted = fit(x, opts.estimator);
  const auto observed = compute_statistics(specs, x, fitted);
  const auto boot = bootstrap_distribution(x.size(), fitted.k_hat, specs, opts);
  std::vector<TestOutcome> out;
  out.reserve(specs.size());
  for (std::size_t s = 0; s < specs.size(); ++s) {
    TestOutcome t;
    t.spec = specs[s];
    t.statistic = observed[s];
    t.critical_value = critical_value_from(boot[s], opts.alpha);
    t.p_value = p_value_from(boot[s], observed[s]);
    t.reject = t.statistic > t.critical_value;
    t.b = opts.b;
    t.alpha = opts.alpha;
    t.seed = opts.seed;
    t.estimator = opts.estimator;
    t.fit = fitted;
    out.push_back(std::move(t));
  }
  return out;
}

inline TestOutcome gof_test(std::span<const double> x, const StatisticSpec& spec, const BootstrapOptions& opts) {
  return gof_tests(x, std::span<const StatisticSpec>(&spec, 1), opts).front();
}

inline double critical_value(std::span<const double> x, const StatisticSpec& spec, const BootstrapOptions& opts) {
  return gof_test(x, spec, opts).critical_value;
}

inline double p_value(std::span<const double> x, const StatisticSpec& spec, const BootstrapOptions& opts) {
  return gof_test(x, spec, opts).p_value;
}

/// key=value rendering of an outcome, one field per line.
inline std::string format_outcome(const TestOutcome& t) {
  std::string out;
  auto line = [&](std::string_view key, const std::string& value) {
    out.append(key);
    out.push_back('=');
    out.append(value);
    out.push_back('\n');
  };
  line("statistic", format_statistic(t.spec));
  line("value", format_double(t.statistic));
  line("critical_value", format_double(t.critical_value));
  line("p_value", format_double(t.p_value));
  line("reject", t.reject ? "true" : "false");
  line("b", std::to_string(t.b));
  line("alpha", format_double(t.alpha));
  line("seed", std::to_string(t.seed));
  line("estimator", std::string(estimator_token(t.estimator)));
  line("n", std::to_string(t.fit.y.size()));
  line("k_hat", format_double(t.fit.k_hat));
  line("lambda_hat", format_double(t.fit.lambda_hat));
  return out;
}

}  // namespace gammagof
