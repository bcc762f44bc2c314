#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "fbp/error.hpp"
#include "fbp/models.hpp"
#include "fbp/numeric.hpp"
#include "fbp/posterior.hpp"
#include "fbp/random.hpp"
#include "fbp/scoring.hpp"
#include "testing.hpp"

namespace {

using namespace fbp;
namespace ft = fbp::testing;

ChainSettings short_chain(std::uint64_t seed) {
  ChainSettings c;
  c.burn_in = 1000;
  c.iterations = 4000;
  c.thin = 4;
  c.seed = seed;
  return c;
}

TEST(Kernel, PriorOnlyAtZeroWeight) {
  const auto y = ft::simulate_arch({0, 0.5, 0.3}, 300, 1);
  const auto cls = PredictiveClass::arch1();
  for (const auto& th : {std::vector{0.0, 0.5, 0.3}, std::vector{0.2, 1.4, 0.1}})
    EXPECT_DOUBLE_EQ(log_posterior_kernel(cls, th, y, ScoringRule::log_score(), 0.0), log_prior(cls, th));
  EXPECT_DOUBLE_EQ(log_prior(cls, std::vector{0.0, 2.0, 0.3}), -std::log(2.0));
  EXPECT_EQ(log_posterior_kernel(cls, std::vector{0.0, 1.0, 1.2}, y, ScoringRule::log_score(), 1.0),
            -std::numeric_limits<double>::infinity());
}

TEST(Kernel, ExactBayesReduction) {
  const auto y = ft::simulate_arch({0, 0.5, 0.3}, 300, 2);
  const auto cls = PredictiveClass::arch1();
  const std::vector<double> a{0.1, 0.6, 0.2}, b{-0.05, 0.4, 0.5};
  const double dk = log_posterior_kernel(cls, a, y, ScoringRule::log_score(), 1.0) -
                    log_posterior_kernel(cls, b, y, ScoringRule::log_score(), 1.0);
  const double dl = arch1_log_likelihood({a[0], a[1], a[2]}, y) - std::log(a[1]) -
                    (arch1_log_likelihood({b[0], b[1], b[2]}, y) - std::log(b[1]));
  EXPECT_NEAR(dk, dl, 1e-9);
}

TEST(Sampler, Deterministic) {
  const auto y = ft::simulate_arch({0, 0.5, 0.3}, 400, 3);
  const auto a = sample_arch(y, ScoringRule::log_score(), {}, short_chain(9));
  const auto b = sample_arch(y, ScoringRule::log_score(), {}, short_chain(9));
  EXPECT_EQ(a.draws, b.draws);
  EXPECT_EQ(a.size(), 1000u);
  const auto g1 = sample_garch(ft::simulate_garch({0, 0.1, 0.1, 0.8}, 400, 4), ScoringRule::crps(), {}, short_chain(5));
  const auto g2 = sample_garch(ft::simulate_garch({0, 0.1, 0.1, 0.8}, 400, 4), ScoringRule::crps(), {}, short_chain(5));
  EXPECT_EQ(g1.draws, g2.draws);
  for (const auto& th : g1.draws) EXPECT_LT(th[2] + th[3], 1.0);
}

TEST(Sampler, SingleDraw) {
  const auto y = ft::simulate_arch({0, 0.5, 0.3}, 200, 5);
  ChainSettings c;
  c.burn_in = 0;
  c.iterations = 1;
  c.thin = 1;
  const auto d = sample_arch(y, ScoringRule::log_score(), {}, c);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_TRUE(PredictiveClass::arch1().in_support(d.draws[0]));
}

TEST(Sampler, AcceptanceAfterAdaptation) {
  const auto y = ft::simulate_arch({0, 0.5, 0.3}, 1000, 6);
  const auto d = sample_arch(y, ScoringRule::log_score(), {}, short_chain(1));
  EXPECT_GT(d.acceptance_rate, 0.2);
  EXPECT_LT(d.acceptance_rate, 0.8);
}

TEST(Sampler, WarmStartResumes) {
  const auto y = ft::simulate_arch({0, 0.5, 0.3}, 600, 7);
  const auto first = sample_arch(std::span(y).first(599), ScoringRule::log_score(), {}, short_chain(1));
  const auto warm = first.warm_start();
  EXPECT_EQ(warm.theta, first.draws.back());
  const auto next = sample_arch(y, ScoringRule::log_score(), {}, short_chain(2), &warm);
  EXPECT_NEAR(next.mean(1), first.mean(1), 4 * first.sd(1));
}

TEST(Sampler, EtsDimension) {
  EtsSpec spec;
  spec.level0 = 1.0;
  const std::vector<double> y{1.0, 1.2, 0.9, 1.4, 1.1, 1.3, 1.0, 1.5, 1.2, 1.6};
  const auto d = sample_ets(y, spec, ScoringRule::msis({0.05, 3}), {}, short_chain(3));
  EXPECT_EQ(d.names.size(), 1u);
  for (const auto& th : d.draws) {
    ASSERT_EQ(th.size(), 1u);
    EXPECT_GT(th[0], 0.0);
    EXPECT_LT(th[0], 1.0);
  }
  EXPECT_EQ(d.draws, sample_ets(y, spec, ScoringRule::msis({0.05, 3}), {}, short_chain(3)).draws);
}

TEST(Grid, FlatPosteriorIsUniform) {
  const std::size_t m = 20000;
  const auto d = grid_posterior(1000, [](double) { return 0.0; }, m, 4);
  std::vector<int> groups(10, 0);
  for (const auto& th : d.draws) groups[std::min<std::size_t>(9, static_cast<std::size_t>(th[0] * 10))]++;
  for (int g : groups) EXPECT_NEAR(g / double(m), 0.1, 4 / std::sqrt(double(m)));
}

TEST(Grid, ConcentratedKernel) {
  const auto d = grid_posterior(100, [](double t) { return std::abs(t - 0.425) < 1e-9 ? 0.0 : -std::numeric_limits<double>::infinity(); }, 50, 1);
  for (const auto& th : d.draws) EXPECT_DOUBLE_EQ(th[0], 0.425);
  EXPECT_THROW(grid_posterior(10, [](double) { return -std::numeric_limits<double>::infinity(); }, 5, 1), SamplerFailure);
}

TEST(Grid, RefinementOracle) {
  const auto y = ft::simulate_arch({0, 0.5, 0.3}, 400, 11);
  const MixtureConstituents c{{0.0, 0.5, 0.3, -2.0}, {0.0, 0.1, 0.1, 0.7}};
  const auto coarse = grid_posterior_mixture(y, c, ScoringRule::log_score(), {}, 1000, 10, 1);
  const auto fine = grid_posterior_mixture(y, c, ScoringRule::log_score(), {}, 10000, 10, 1);
  EXPECT_LT(std::abs(coarse.mean(0) - fine.mean(0)), 2e-3);
}

TEST(Scale, CrpsRatio) {
  const std::vector<double> s{-3.0, -4.5, -2.0};
  EXPECT_DOUBLE_EQ(scale_from_score_sums(s, s).w, 1.0);
  const std::vector<double> ls{-300, -310}, cr{-40, -42}, ls2{-600, -620}, cr2{-80, -84};
  EXPECT_DOUBLE_EQ(scale_from_score_sums(ls, cr).w, scale_from_score_sums(ls2, cr2).w);
  EXPECT_THROW(scale_from_score_sums(ls, std::vector{0.0, 0.0}), CalibrationError);
}

TEST(Scale, CrpsCalibrationStable) {
  const auto y = ft::simulate_arch({0, 0.5, 0.3}, 500, 12);
  auto c = short_chain(1);
  const double w1 = calibrate_w_crps(y, PredictiveClass::arch1(), c).w;
  c.seed = 2;
  const double w2 = calibrate_w_crps(y, PredictiveClass::arch1(), c).w;
  EXPECT_GT(w1, 0.0);
  EXPECT_TRUE(std::isfinite(w1));
  EXPECT_LT(std::abs(w1 / w2 - 1.0), 0.05);
}

TEST(Scale, MsisFormula) {
  EXPECT_DOUBLE_EQ(msis_scale(50, 3, -75.0).w, 1.0);
  EXPECT_DOUBLE_EQ(msis_scale(50, 3, -37.5).w, 2.0);
  EXPECT_THROW(msis_scale(50, 3, 0.0), CalibrationError);
  const auto y = ft::simulate_annual(30, 3);
  const auto spec = ets_fit({y, 1, "a"}, EtsTrend::additive);
  EXPECT_GT(calibrate_w_msis(y, spec).w, 0.0);
}

TEST(Optimize, MatchesMle) {
  const auto y = ft::simulate_arch({0, 0.5, 0.3}, 1500, 13);
  const auto cls = PredictiveClass::arch1();
  const auto fit = fit_mle(ModelClass::arch1, {y, 1, "x"});
  const auto th = optimize_score(cls, y, ScoringRule::log_score());
  const double crit = score_sum(ScoringRule::log_score(), cls, th, y);
  EXPECT_NEAR(crit, fit.log_likelihood, 1e-6);
  const auto whole = optimize_score(cls, y, ScoringRule::censored({std::numeric_limits<double>::infinity(), CensorSide::below}));
  EXPECT_NEAR(score_sum(ScoringRule::log_score(), cls, whole, y), crit, 1e-6);
}

TEST(Optimize, CrpsLocation) {
  Random rng(14);
  std::vector<double> y(5000);
  for (auto& v : y) v = 0.7 + rng.normal();
  const auto th = optimize_score(PredictiveClass::arch1(), y, ScoringRule::crps());
  EXPECT_NEAR(th[0], 0.7, 3.0 / std::sqrt(5000.0));
}

}  // namespace
