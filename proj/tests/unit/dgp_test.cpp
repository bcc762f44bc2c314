#include <gtest/gtest.h>

#include <cmath>

#include "fbp/dgp.hpp"
#include "fbp/error.hpp"
#include "fbp/numeric.hpp"
#include "fbp/random.hpp"

namespace {

using namespace fbp;

SvSkewConfig collapse() {
  SvSkewConfig c;
  c.a = 0.0;
  c.sigma_h = 0.0;
  c.gamma = 0.0;
  c.fz_sample_size = 200'000;
  return c;
}

double skewness(const std::vector<double>& x) {
  const double m = mean(x), s = std::sqrt(variance(x));
  double k = 0.0;
  for (double v : x) k += std::pow((v - m) / s, 3);
  return k / x.size();
}

double jarque_bera(const std::vector<double>& x) {
  const double m = mean(x);
  double m2 = 0, m3 = 0, m4 = 0;
  for (double v : x) {
    const double d = v - m;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  const double n = x.size();
  m2 /= n;
  m3 /= n;
  m4 /= n;
  const double s = m3 / std::pow(m2, 1.5), k = m4 / (m2 * m2);
  return n / 6.0 * (s * s + (k - 3) * (k - 3) / 4.0);
}

TEST(SvSkew, CollapseIsGaussian) {
  const auto proc = SvSkewProcess::cached(collapse());
  int pass = 0;
  for (std::uint64_t s = 1; s <= 100; ++s) pass += jarque_bera(proc->simulate(10'000, s).y.values) < 9.21;
  EXPECT_GE(pass, 95);
}

TEST(SvSkew, NegativeSkew) {
  const auto y = simulate_sv_skew(SvSkewConfig{}, 100'000, 1).y.values;
  EXPECT_LT(skewness(y), 0.0);
}

TEST(SvSkew, VolatilityClustering) {
  const auto y = simulate_sv_skew(SvSkewConfig{}, 2500, 2).y.values;
  std::vector<double> sq(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) sq[i] = y[i] * y[i];
  const double m = mean(sq);
  double den = 0.0;
  for (double v : sq) den += (v - m) * (v - m);
  double q = 0.0;
  const double n = sq.size();
  for (std::size_t k = 1; k <= 10; ++k) {
    double num = 0.0;
    for (std::size_t t = k; t < sq.size(); ++t) num += (sq[t] - m) * (sq[t - k] - m);
    const double r = num / den;
    q += r * r / (n - k);
  }
  q *= n * (n + 2);
  EXPECT_GT(q, 18.307);  // chi-square(10) 95%
}

TEST(SvSkew, ConditionalSampleCollapse) {
  const auto c = collapse();
  const auto x = true_conditional_predictive(c, c.h_bar, 1'000'000, 3);
  EXPECT_NEAR(mean(x), 0.0, 3.0 / 1000.0);
  EXPECT_NEAR(std::sqrt(variance(x)), 1.0, 0.02);
  EXPECT_NEAR(sample_es(x, 0.1, Tail::lower), 1.755, 0.02);
  EXPECT_EQ(x, true_conditional_predictive(c, c.h_bar, 1'000'000, 3));
}

TEST(SvSkew, ConditionalQuantileMatchesSample) {
  const auto proc = SvSkewProcess::cached(SvSkewConfig{});
  for (double h : {-1.5, -0.4581, 0.5}) {
    auto x = proc->conditional_sample(h, 400'000, 9);
    for (double p : {0.1, 0.5, 0.9}) EXPECT_NEAR(proc->conditional_quantile(h, p), quantile_type7(x, p), 0.01);
  }
}

TEST(SvSkew, Validation) {
  SvSkewConfig c;
  c.a = 1.0;
  EXPECT_THROW(c.validate(), InvalidParameter);
  c = SvSkewConfig{};
  c.sigma_h = -1;
  EXPECT_THROW(c.validate(), InvalidParameter);
}

}  // namespace
