#include <gtest/gtest.h>

#include <cmath>

#include "fbp/distributions.hpp"
#include "fbp/error.hpp"
#include "fbp/numeric.hpp"
#include "fbp/random.hpp"
#include "testing.hpp"

namespace {

using namespace fbp;
namespace ft = fbp::testing;

TEST(SkewNormal, GammaZeroIsStandardNormal) {
  const StdSkewNormalDist d(0.0);
  EXPECT_NEAR(d.density(0.0), 0.39894, 1e-5);
  for (double x : {-2.0, -0.3, 1.7}) EXPECT_NEAR(d.cdf(x), ft::oracle_normal_cdf(x), 1e-10);
}

TEST(SkewNormal, CdfMatchesQuadratureOracle) {
  for (double gamma : {-5.0, -1.0, 2.5}) {
    const StdSkewNormalDist d(gamma);
    for (double x : {-3.0, -1.3, 0.0, 0.4, 1.1, 2.5}) EXPECT_NEAR(d.cdf(x), ft::oracle_skew_normal_cdf(gamma, x), 1e-7);
  }
}

TEST(SkewNormal, Standardized) {
  const StdSkewNormalDist d(-5.0);
  Random rng(17);
  std::vector<double> x(1'000'000);
  for (auto& v : x) v = d.sample(rng);
  EXPECT_NEAR(mean(x), 0.0, 0.01);
  EXPECT_NEAR(variance(x), 1.0, 0.02);
  EXPECT_NEAR(d.mean(), 0.0, 1e-12);
  EXPECT_NEAR(d.sd(), 1.0, 1e-12);
}

TEST(SkewNormal, QuantileInvertsCdf) {
  const StdSkewNormalDist d(-5.0);
  EXPECT_NEAR(d.quantile(d.cdf(-1.3)), -1.3, 1e-6);
  for (double p : {0.001, 0.1, 0.5, 0.9, 0.999}) EXPECT_NEAR(d.cdf(d.quantile(p)), p, 1e-9);
}

TEST(EmpiricalCdf, Examples) {
  EXPECT_DOUBLE_EQ(EmpiricalCdf({1, 2, 3}).cdf(2.0), 0.5);
  const double tie = EmpiricalCdf({0, 0, 0}).cdf(0.0);
  EXPECT_GE(tie, 0.25);
  EXPECT_LE(tie, 0.75);
  EXPECT_THROW(EmpiricalCdf({1.0}), InvalidInput);
}

TEST(EmpiricalCdf, LargeNormalSample) {
  Random rng(3);
  std::vector<double> x(1'000'000);
  for (auto& v : x) v = rng.normal();
  const EmpiricalCdf f(std::move(x));
  EXPECT_NEAR(f.cdf(0.0), 0.5, 0.002);
  EXPECT_NEAR(f.cdf(-1.2816), 0.1, 0.002);
}

TEST(EmpiricalCdf, MonotoneAndBounded) {
  Random rng(5);
  std::vector<double> x(500);
  for (auto& v : x) v = rng.normal();
  const EmpiricalCdf f(x);
  double prev = 0.0;
  for (double t = -5; t <= 5; t += 0.01) {
    const double c = f.cdf(t);
    EXPECT_GE(c, prev);
    EXPECT_GT(c, 0.0);
    EXPECT_LT(c, 1.0);
    prev = c;
  }
}

TEST(Mixture, Degenerate) {
  auto a = std::make_shared<GaussianDist>(-1.0, 1.0);
  auto b = std::make_shared<GaussianDist>(1.0, 1.0);
  const MixtureDist m({0.5, 0.5}, {a, b});
  EXPECT_NEAR(m.density(0.0), 0.24197, 1e-5);
  EXPECT_NEAR(m.quantile(0.5), 0.0, 1e-9);
  const MixtureDist only_a({1.0, 0.0}, {a, b});
  for (double x : {-2.0, 0.0, 3.0}) EXPECT_NEAR(only_a.density(x), a->density(x), 1e-14);
  EXPECT_THROW(MixtureDist({0.7, 0.7}, {a, b}), InvalidParameter);
}

TEST(Gaussian, Basics) {
  const GaussianDist g(1.0, 2.0);
  EXPECT_NEAR(g.cdf(1.0), 0.5, 1e-15);
  EXPECT_NEAR(g.quantile(0.975), 1.0 + 2.0 * 1.959963985, 1e-8);
  EXPECT_THROW(GaussianDist(0.0, 0.0), InvalidParameter);
}

void check_distribution_properties(const Distribution& d) {
  double prev_cdf = 0.0;
  for (int i = 1; i <= 101; ++i) {
    const double p = i / 102.0;
    const double x = d.quantile(p);
    EXPECT_NEAR(d.cdf(x), p, 1e-6) << "p=" << p;
    EXPECT_GE(d.density(x), 0.0);
    EXPECT_GE(d.cdf(x), prev_cdf);
    prev_cdf = d.cdf(x);
  }
}

TEST(Properties, QuantileCdfIdentityAndMonotone) {
  check_distribution_properties(GaussianDist(-0.3, 1.7));
  check_distribution_properties(StdSkewNormalDist(-5.0));
  check_distribution_properties(StdSkewNormalDist(3.0));
  check_distribution_properties(LocationScaleDist(1.0, 0.4, std::make_shared<StdSkewNormalDist>(-2.0)));
  auto a = std::make_shared<GaussianDist>(-1.0, 0.5);
  auto b = std::make_shared<LocationScaleDist>(0.5, 1.2, std::make_shared<StdSkewNormalDist>(-5.0));
  check_distribution_properties(MixtureDist({0.3, 0.7}, {a, b}));
}

TEST(Properties, EmpiricalQuantileRoundTrip) {
  Random rng(21);
  std::vector<double> x(5000);
  for (auto& v : x) v = rng.normal();
  const EmpiricalCdf f(x);
  // Piecewise-constant between order statistics: the round trip lands
  // within one plotting-position step.
  for (int i = 1; i <= 101; ++i) {
    const double p = i / 102.0;
    EXPECT_NEAR(f.cdf(f.quantile(p)), p, 1.0 / 5001.0 + 1e-12);
  }
}

TEST(Properties, SkewNormalGammaZeroPointwise) {
  const StdSkewNormalDist d(0.0);
  for (double x = -5.0; x <= 5.0; x += 0.05) EXPECT_NEAR(d.density(x), ft::oracle_normal_pdf(x), 1e-10);
}

TEST(Properties, MixtureIntegratesToOne) {
  auto a = std::make_shared<GaussianDist>(-2.0, 0.3);
  auto b = std::make_shared<LocationScaleDist>(1.0, 2.0, std::make_shared<StdSkewNormalDist>(-5.0));
  const MixtureDist m({0.4, 0.6}, {a, b});
  const double area = ft::simpson([&](double x) { return m.density(x); }, m.mean() - 12 * m.sd(), m.mean() + 12 * m.sd(), 20000);
  EXPECT_NEAR(area, 1.0, 1e-4);
}

}  // namespace
