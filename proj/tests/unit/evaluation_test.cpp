#include <gtest/gtest.h>

#include <cmath>

#include "fbp/error.hpp"
#include "fbp/evaluation.hpp"
#include "fbp/numeric.hpp"
#include "fbp/random.hpp"

namespace {

using namespace fbp;

TEST(MeanPredictive, Basics) {
  const MeanPredictive same({std::make_shared<GaussianDist>(0.5, 2.0), std::make_shared<GaussianDist>(0.5, 2.0)});
  const GaussianDist g(0.5, 2.0);
  for (double x : {-3.0, 0.0, 4.0}) EXPECT_NEAR(same.density(x), g.density(x), 1e-15);
  const MeanPredictive two({std::make_shared<GaussianDist>(-1, 1), std::make_shared<GaussianDist>(1, 1)});
  EXPECT_NEAR(two.density(0.0), 0.24197, 1e-5);
  EXPECT_NEAR(two.cdf(60.0), 1.0, 1e-6);
  EXPECT_NEAR(mean_predictive_quantile(two, 0.5), 0.0, 1e-8);
  const MeanPredictive one({std::make_shared<GaussianDist>(0, 1)});
  EXPECT_NEAR(mean_predictive_quantile(one, 0.1), -1.28155, 1e-5);
}

TEST(MeanPredictive, MonteCarloEs) {
  const MeanPredictive one({std::make_shared<GaussianDist>(0, 1)});
  const double es = mean_predictive_es(one, 0.1, Tail::lower, 1'000'000, 5);
  EXPECT_NEAR(es, 1.755, 0.02);
  EXPECT_DOUBLE_EQ(es, mean_predictive_es(one, 0.1, Tail::lower, 1'000'000, 5));
  EXPECT_NEAR(mean_predictive_es(one, 0.9, Tail::upper, 1'000'000, 6), 1.755, 0.02);
}

TEST(Exceedance, Counting) {
  auto rate = [](std::vector<int> h) {
    ExceedanceRecord r;
    r.hits = std::move(h);
    return var_exceedance(r);
  };
  EXPECT_DOUBLE_EQ(rate(std::vector<int>(50, 0)), 0.0);
  EXPECT_DOUBLE_EQ(rate(std::vector<int>(50, 1)), 1.0);
  std::vector<int> h(200, 0);
  for (int i = 0; i < 20; ++i) h[i * 10] = 1;
  EXPECT_DOUBLE_EQ(rate(h), 0.1);
  std::vector<int> alt(100);
  for (int i = 0; i < 100; ++i) alt[i] = i % 2;
  EXPECT_DOUBLE_EQ(rate(alt), 0.5);
  const auto rec = make_exceedances(std::vector{0.0, 0.0, 0.0}, std::vector{-1.0, 1.0, 0.0}, 0.9, Tail::upper);
  EXPECT_EQ(rec.hits, (std::vector<int>{0, 1, 0}));
}

TEST(Christoffersen, Examples) {
  ExceedanceRecord zeros;
  zeros.hits.assign(100, 0);
  zeros.alpha = 0.1;
  const auto r = christoffersen_test(zeros);
  EXPECT_NEAR(r.lr_uc, -200.0 * std::log(0.9), 1e-10);
  EXPECT_NEAR(r.lr_uc, 21.07, 0.01);
  EXPECT_TRUE(r.reject_1pct);

  ExceedanceRecord clustered;
  clustered.alpha = 0.1;
  clustered.hits.assign(1000, 0);
  for (int i = 400; i < 500; ++i) clustered.hits[i] = 1;
  const auto c = christoffersen_test(clustered);
  EXPECT_NEAR(c.lr_uc, 0.0, 1e-9);
  EXPECT_GT(c.lr_ind, 100.0);
  EXPECT_TRUE(c.reject_1pct);

  ExceedanceRecord tiny;
  tiny.hits.assign(5, 0);
  EXPECT_THROW(christoffersen_test(tiny), InvalidInput);
}

TEST(Christoffersen, Size) {
  int rejections = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    Random rng(derive_seed(71, {s}));
    ExceedanceRecord r;
    r.alpha = 0.1;
    r.hits.resize(10'000);
    for (auto& h : r.hits) h = rng.uniform() < 0.1;
    rejections += christoffersen_test(r).reject_1pct;
  }
  EXPECT_LE(rejections, 4);
}

TEST(EsScore, Examples) {
  EXPECT_DOUBLE_EQ(es_consistent_score(-1, 2, -2, 0.1, 0.0), -11.0);
  EXPECT_DOUBLE_EQ(es_consistent_score(-1, -2, -3, 0.1, 5.0), 0.0);
}

TEST(EsScore, ConsistencyForGaussian) {
  // True N(0,1) lower-tail pair versus the N(0,4) pair: expected scores.
  const double alpha = 0.1;
  const double q = normal_quantile(alpha);
  const double es1 = -normal_pdf(q) / alpha, es2 = 2 * es1;
  Random rng(1);
  std::vector<double> y(400'000);
  for (auto& v : y) v = rng.normal();
  for (double eta : {-2.0, -1.0, 0.0, 1.0}) {
    double a = 0.0, b = 0.0;
    for (double v : y) {
      a += es_consistent_score(q, es1, v, alpha, eta);
      b += es_consistent_score(2 * q, es2, v, alpha, eta);
    }
    EXPECT_GE(a / y.size(), b / y.size() - 1e-3) << eta;
    if (eta == -2.0) EXPECT_GT(a / y.size(), b / y.size() + 0.01);
  }
}

TEST(Murphy, AntisymmetryAndIdentity) {
  Random rng(3);
  const std::size_t T = 300;
  TailForecasts a, b;
  std::vector<double> y(T);
  for (std::size_t t = 0; t < T; ++t) {
    y[t] = rng.normal();
    a.var.push_back(-1.3 + 0.1 * rng.normal());
    a.es.push_back(1.7 + 0.1 * rng.normal());
    b.var.push_back(-1.1 + 0.1 * rng.normal());
    b.es.push_back(1.5 + 0.1 * rng.normal());
  }
  const auto grid = default_eta_grid(y);
  EXPECT_EQ(grid.size(), 101u);
  const auto ab = murphy_diagram(a, b, y, 0.1, Tail::lower, grid, {});
  const auto ba = murphy_diagram(b, a, y, 0.1, Tail::lower, grid, {});
  const auto aa = murphy_diagram(a, a, y, 0.1, Tail::lower, grid, {});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_EQ(ab.delta[i], -ba.delta[i]);
    EXPECT_EQ(aa.delta[i], 0.0);
    EXPECT_LE(ab.lower[i], ab.delta[i] + 1e-12);
    EXPECT_GE(ab.upper[i], ab.delta[i] - 1e-12);
  }
}

TEST(Bootstrap, IidWidthAndCoverage) {
  Random rng(8);
  std::vector<double> x(1000);
  for (auto& v : x) v = rng.normal();
  const auto ci = block_bootstrap_ci(x, 10, 1000, 0.95, 2);
  const double width = ci.upper - ci.lower;
  EXPECT_NEAR(width / (2 * 1.96 / std::sqrt(1000.0)), 1.0, 0.25);
  EXPECT_LE(ci.lower, 0.0);
  EXPECT_GE(ci.upper, 0.0);
  const auto same = block_bootstrap_ci(x, 10, 1000, 0.95, 2);
  EXPECT_EQ(ci.lower, same.lower);
  EXPECT_EQ(ci.upper, same.upper);
  EXPECT_THROW(block_bootstrap_ci(x, 2000, 10, 0.95, 1), InvalidInput);
}

TEST(KernelDensity, IntegratesToOne) {
  Random rng(4);
  std::vector<double> x(2000);
  for (auto& v : x) v = rng.normal();
  const auto d = kernel_density(x, 401);
  double area = 0.0;
  for (std::size_t i = 1; i < d.x.size(); ++i) area += 0.5 * (d.density[i] + d.density[i - 1]) * (d.x[i] - d.x[i - 1]);
  EXPECT_NEAR(area, 1.0, 0.01);
}

}  // namespace
