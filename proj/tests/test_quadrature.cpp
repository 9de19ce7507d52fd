#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "gammagof/quadrature.hpp"

using namespace gammagof;

TEST(Integrate, PolynomialsAreExact) {
  const auto r = integrate([](double x) { return x * x * x - 2.0 * x; }, -1.0, 3.0);
  EXPECT_NEAR(r.value, (81.0 / 4 - 9.0) - (1.0 / 4 - 1.0), 1e-13);
  EXPECT_TRUE(r.converged);
}

TEST(Integrate, ReversedBoundsFlipSign) {
  const auto a = integrate([](double x) { return std::exp(x); }, 0.0, 1.0).value;
  const auto b = integrate([](double x) { return std::exp(x); }, 1.0, 0.0).value;
  EXPECT_DOUBLE_EQ(a, -b);
}

TEST(Integrate, HandlesEndpointSingularity) {
  const auto r = integrate([](double x) { return x > 0.0 ? 1.0 / std::sqrt(x) : 0.0; }, 0.0, 1.0);
  EXPECT_NEAR(r.value, 2.0, 1e-9);
}

TEST(IntegrateToInfinity, ExponentialAndGaussian) {
  EXPECT_NEAR(integrate_to_infinity([](double x) { return std::exp(-x); }, 0.0).value, 1.0, 1e-12);
  EXPECT_NEAR(integrate_to_infinity([](double x) { return std::exp(-x * x); }, 0.0).value,
              0.5 * std::sqrt(std::numbers::pi), 1e-12);
}

TEST(Integrate, ThrowsWhenAskedAndUnconverged) {
  QuadratureOptions opts;
  opts.max_intervals = 2;
  opts.throw_on_failure = true;
  EXPECT_THROW(integrate([](double x) { return std::sin(1.0 / (x + 1e-4)); }, 0.0, 1.0, opts), NumericError);
}

TEST(GaussLegendre, IntegratesPolynomialsOfDegree2mMinus1) {
  const auto rule = gauss_legendre(8, 0.0, 2.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], 15);
  EXPECT_NEAR(sum, std::pow(2.0, 16) / 16.0, 1e-9);
  double wsum = 0.0;
  for (double w : rule.weights) wsum += w;
  EXPECT_NEAR(wsum, 2.0, 1e-14);
}
