#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "gammagof/distributions.hpp"
#include "gammagof/estimators.hpp"

using namespace gammagof;

namespace {

std::vector<double> gamma_sample(double k, double lambda, std::size_t n, std::uint64_t stream) {
  RngStream rng(31, stream);
  auto x = sample({Family::Gamma, k}, n, rng);
  for (auto& v : x) v *= lambda;
  return x;
}

std::vector<double> scaled(std::vector<double> x, double beta) {
  for (auto& v : x) v *= beta;
  return x;
}

double mean(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

}  // namespace

TEST(LogRatio, Examples) {
  EXPECT_EQ(log_ratio(std::vector<double>{2.5, 2.5, 2.5}).r_n, 0.0);
  EXPECT_NEAR(log_ratio(std::vector<double>{1, 2, 3}).r_n, std::log(2.0) - std::log(6.0) / 3.0, 1e-15);
  const auto x = gamma_sample(1.5, 1.0, 50, 1);
  EXPECT_NEAR(log_ratio(scaled(x, 7.3)).r_n, log_ratio(x).r_n, 1e-14);
  EXPECT_THROW(log_ratio(std::vector<double>{1.0, -2.0}), DomainError);
  EXPECT_THROW(log_ratio(std::vector<double>{1.0}), DomainError);
}

TEST(ApproxMle, PublishedBranches) {
  EXPECT_NEAR(approx_mle_shape(0.5), (0.500876 + 0.1648852 * 0.5 - 0.0544274 * 0.25) / 0.5, 1e-15);
  EXPECT_NEAR(approx_mle_shape(0.5), 1.1394235, 1e-7);
  EXPECT_DOUBLE_EQ(approx_mle_shape(20.0), 0.05);
  EXPECT_THROW(approx_mle_shape(0.0), EstimationError);
}

TEST(ApproxMle, AgreesWithNewtonWithinTwoPercent) {
  for (double r : {0.1, 1.0, 5.0}) {
    const double exact = solve_shape_equation(r, approx_mle_shape(r));
    EXPECT_LT(std::fabs(approx_mle_shape(r) - exact) / exact, 0.02) << r;
  }
  for (double r = 0.01; r <= 17.0; r *= 1.1) {
    const double exact = solve_shape_equation(r, approx_mle_shape(r));
    EXPECT_LT(std::fabs(approx_mle_shape(r) - exact) / exact, 0.02) << r;
  }
}

TEST(NewtonMle, SolvesShapeEquation) {
  for (double r = 1e-8; r <= 1e4; r *= 3.7) {
    const double k = solve_shape_equation(r, approx_mle_shape(r));
    EXPECT_LT(std::fabs(log_minus_digamma(k) - r), 1e-12 * std::max(1.0, r)) << r;
  }
  EXPECT_NEAR(solve_shape_equation(0.5772156649015329, 1.3), 1.0, 1e-10);
}

TEST(NewtonMle, LargeSampleConsistency) {
  const auto x = gamma_sample(3.0, 1.0, 100000, 2);
  const auto f = mle_newton(x);
  EXPECT_NEAR(f.k_hat, 3.0, 0.05);
  EXPECT_NEAR(mean(f.y), f.k_hat, 1e-9 * f.k_hat);
}

TEST(Moment, Examples) {
  const auto f = moment_fit(std::vector<double>{1, 2, 3});
  EXPECT_NEAR(f.k_hat, 6.0, 1e-14);
  EXPECT_NEAR(f.lambda_hat, 1.0 / 3.0, 1e-15);
  EXPECT_THROW(moment_fit(std::vector<double>{4, 4, 4}), EstimationError);
  const auto g = moment_fit(gamma_sample(5.0, 2.0, 100000, 3));
  EXPECT_NEAR(g.k_hat, 5.0, 0.15);
  EXPECT_NEAR(g.lambda_hat, 2.0, 0.06);
}

TEST(Mle, DegenerateSampleRejected) {
  EXPECT_THROW(mle_approx(std::vector<double>{3, 3, 3}), EstimationError);
  EXPECT_THROW(mle_newton(std::vector<double>{3, 3}), EstimationError);
  EXPECT_THROW(mle_approx(std::vector<double>{3, 0}), DomainError);
}

TEST(AllEstimators, ScaleEquivariance) {
  RngStream betas(5, 5);
  for (auto kind : {EstimatorKind::MleApprox, EstimatorKind::MleNewton, EstimatorKind::Moment}) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto x = gamma_sample(0.5 + rep * 0.3, 1.0, 40, 100 + rep);
      const double beta = std::exp(std::log(0.01) + betas.uniform() * std::log(1e4));
      const auto a = fit(x, kind);
      const auto b = fit(scaled(x, beta), kind);
      EXPECT_NEAR(b.k_hat, a.k_hat, 1e-12 * a.k_hat);
      EXPECT_NEAR(b.lambda_hat, beta * a.lambda_hat, 1e-12 * beta * a.lambda_hat);
      for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(b.y[i], a.y[i], 1e-12 * a.y[i]);
    }
  }
}

TEST(Mle, ScaledSampleKeepsLogRatio) {
  const auto x = gamma_sample(2.0, 3.0, 60, 9);
  for (auto kind : {EstimatorKind::MleApprox, EstimatorKind::MleNewton}) {
    const auto f = fit(x, kind);
    EXPECT_NEAR(log_ratio(f.y).r_n, log_ratio(x).r_n, 1e-14);
    EXPECT_NEAR(mean(f.y), f.k_hat, 1e-9 * f.k_hat);
  }
}

TEST(Tokens, Estimators) {
  for (auto kind : {EstimatorKind::MleApprox, EstimatorKind::MleNewton, EstimatorKind::Moment}) {
    EXPECT_EQ(parse_estimator(estimator_token(kind)), kind);
  }
  EXPECT_THROW(parse_estimator("mle"), ParseError);
}
