#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "gammagof/distributions.hpp"
#include "gammagof/quadrature.hpp"

using namespace gammagof;

namespace {

// Parameters appearing in the power tables.
std::vector<AlternativeSpec> table_alternatives() {
  return {{Family::Gamma, 0.5},          {Family::Gamma, 1.0},          {Family::Gamma, 5.0},
          {Family::Weibull, 0.5},        {Family::Weibull, 1.0},        {Family::Weibull, 3.0},
          {Family::InverseGaussian, 0.5}, {Family::InverseGaussian, 1.5}, {Family::InverseGaussian, 3.0},
          {Family::LogNormal, 0.8},      {Family::LogNormal, 1.5},      {Family::Power, 1.0},
          {Family::Power, 2.0},          {Family::ShiftedPareto, 1.0},  {Family::ShiftedPareto, 2.0},
          {Family::Gompertz, 0.5},       {Family::Gompertz, 4.0},       {Family::LinearFailureRate, 2.0},
          {Family::LinearFailureRate, 4.0}};
}

// Asymptotic Kolmogorov distribution survival function.
double kolmogorov_sf(double d, std::size_t n) {
  const double x = (std::sqrt(static_cast<double>(n)) + 0.12 + 0.11 / std::sqrt(static_cast<double>(n))) * d;
  double sum = 0.0;
  for (int j = 1; j < 100; ++j) sum += 2.0 * (j % 2 ? 1.0 : -1.0) * std::exp(-2.0 * j * j * x * x);
  return std::clamp(sum, 0.0, 1.0);
}

}  // namespace

TEST(Tokens, RoundTrip) {
  for (const auto& spec : table_alternatives()) EXPECT_EQ(parse_alternative(format_alternative(spec)), spec);
  EXPECT_EQ(parse_alternative("invgauss:0.5"), AlternativeSpec(Family::InverseGaussian, 0.5));
  EXPECT_EQ(alternative_label({Family::InverseGaussian, 0.5}), "IG(0.5)");
  EXPECT_THROW(parse_alternative("cauchy:1"), ParseError);
  EXPECT_THROW(parse_alternative("gamma"), ParseError);
  EXPECT_THROW(parse_alternative("gamma:-1"), DomainError);
}

TEST(Density, ClosedForms) {
  for (double x : {0.1, 1.0, 3.0}) {
    EXPECT_NEAR(density({Family::Weibull, 1.0}, x), std::exp(-x), 1e-15);
    EXPECT_NEAR(density({Family::ShiftedPareto, 2.0}, x), 2.0 / std::pow(1.0 + x, 3.0), 1e-15);
  }
  EXPECT_EQ(density({Family::Power, 2.0}, 1.5), 0.0);
  EXPECT_EQ(density({Family::Gamma, 2.0}, -1.0), 0.0);
}

TEST(Density, IntegratesToOne) {
  for (const auto& spec : table_alternatives()) {
    EXPECT_NEAR(expectation(spec, [](double) { return 1.0; }), 1.0, 1e-9) << format_alternative(spec);
  }
}

TEST(Cdf, ClosedFormsAndQuadrature) {
  EXPECT_NEAR(cdf({Family::ShiftedPareto, 2.0}, 1.0), 1.0 - 0.25, 1e-15);
  EXPECT_NEAR(cdf({Family::LogNormal, 0.8}, std::exp(0.8)), normal_cdf(1.0), 1e-15);
  for (const auto& spec : table_alternatives()) {
    for (double x : {0.05, 0.4, 0.9, 2.0, 6.0}) {
      auto f = [&](double u) { return density(spec, u); };
      // split at 1 where the power family's support ends
      double oracle = integrate(f, 0.0, std::min(x, 1.0)).value;
      if (x > 1.0) oracle += integrate(f, 1.0, x).value;
      EXPECT_NEAR(cdf(spec, x), oracle, 1e-8) << format_alternative(spec) << " " << x;
    }
    EXPECT_EQ(cdf(spec, 0.0), 0.0);
    EXPECT_EQ(cdf(spec, -3.0), 0.0);
    EXPECT_NEAR(cdf(spec, 1e12), 1.0, 1e-6);
  }
}

TEST(Sample, InverseTransformForms) {
  RngStream a(11, 3);
  RngStream b(11, 3);
  for (int i = 0; i < 100; ++i) {
    const double u = b.uniform();
    EXPECT_DOUBLE_EQ(sample_one({Family::Power, 2.0}, a), std::pow(u, 2.0));
  }
  RngStream c(5, 1);
  RngStream d(5, 1);
  for (int i = 0; i < 100; ++i) {
    const double u = d.uniform();
    // U and 1 - U are equal in law; log(1 - theta log U) is the same inversion
    EXPECT_DOUBLE_EQ(sample_one({Family::Gompertz, 4.0}, c), std::log1p(-4.0 * std::log(u)));
  }
  RngStream e(5, 2);
  RngStream f(5, 2);
  for (int i = 0; i < 100; ++i) {
    const double s = -std::log(f.uniform());
    EXPECT_NEAR(sample_one({Family::LinearFailureRate, 2.0}, e), (-1.0 + std::sqrt(1.0 + 4.0 * s)) / 2.0, 1e-12);
  }
}

TEST(Sample, PositiveAndDeterministic) {
  for (const auto& spec : table_alternatives()) {
    RngStream r1(99, 7);
    RngStream r2(99, 7);
    const auto x = sample(spec, 500, r1);
    const auto y = sample(spec, 500, r2);
    EXPECT_EQ(x, y);
    for (double v : x) {
      EXPECT_GT(v, 0.0);
      if (spec.family == Family::Power) EXPECT_LE(v, 1.0);
    }
  }
  RngStream r(1, 1);
  EXPECT_THROW(sample({Family::Gamma, 1.0}, 0, r), DomainError);
}

TEST(Sample, DistinctStreamsDiffer) {
  RngStream r1(99, 7);
  RngStream r2(99, 8);
  EXPECT_NE(sample({Family::Gamma, 2.0}, 10, r1), sample({Family::Gamma, 2.0}, 10, r2));
}

TEST(Sample, KolmogorovSmirnovAgainstCdf) {
  const std::size_t n = 100000;
  std::uint64_t stream = 0;
  for (const auto& spec : table_alternatives()) {
    RngStream rng(2024, stream++);
    auto x = sample(spec, n, rng);
    std::sort(x.begin(), x.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = cdf(spec, x[i]);
      d = std::max({d, static_cast<double>(i + 1) / n - u, u - static_cast<double>(i) / n});
    }
    EXPECT_GT(kolmogorov_sf(d, n), 1e-3) << format_alternative(spec) << " D=" << d;
  }
}

TEST(Sample, MomentsWithinThreeStandardErrors) {
  const std::size_t n = 100000;
  auto check = [&](const AlternativeSpec& spec, double mean, double var, std::uint64_t stream) {
    RngStream rng(77, stream);
    const auto x = sample(spec, n, rng);
    double m = 0.0;
    for (double v : x) m += v;
    m /= n;
    double s2 = 0.0;
    double m4 = 0.0;
    for (double v : x) {
      s2 += (v - m) * (v - m);
      m4 += std::pow(v - m, 4);
    }
    s2 /= n;
    m4 /= n;
    EXPECT_LT(std::fabs(m - mean), 3.0 * std::sqrt(var / n)) << format_alternative(spec);
    EXPECT_LT(std::fabs(s2 - var), 3.0 * std::sqrt((m4 - s2 * s2) / n)) << format_alternative(spec);
  };
  check({Family::InverseGaussian, 0.5}, 1.0, 2.0, 1);
  check({Family::InverseGaussian, 3.0}, 1.0, 1.0 / 3.0, 2);
  check({Family::Gamma, 0.5}, 0.5, 0.5, 3);
  check({Family::Gamma, 2.0}, 2.0, 2.0, 4);
  check({Family::Gamma, 5.0}, 5.0, 5.0, 5);
}

TEST(Expectation, KnownMoments) {
  EXPECT_NEAR(expectation({Family::LogNormal, 0.8}, [](double x) { return x; }), std::exp(0.32), 1e-9);
  EXPECT_NEAR(expectation({Family::LogNormal, 0.8}, [](double x) { return std::log(x); }), 0.0, 1e-10);
  EXPECT_NEAR(expectation({Family::InverseGaussian, 0.5}, [](double x) { return x; }), 1.0, 1e-9);
  EXPECT_NEAR(expectation({Family::ShiftedPareto, 2.0}, [](double x) { return x; }), 1.0, 1e-8);
}
