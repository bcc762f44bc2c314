#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "fbp/error.hpp"
#include "fbp/models.hpp"
#include "fbp/numeric.hpp"
#include "fbp/random.hpp"
#include "fbp/scoring.hpp"
#include "testing.hpp"

namespace {

using namespace fbp;
namespace ft = fbp::testing;
constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(LogScore, Examples) {
  EXPECT_NEAR(log_score(GaussianDist(0, 1), 0.0), -0.91894, 1e-5);
  EXPECT_NEAR(log_score(GaussianDist(0, 2), 0.0), -1.61209, 1e-5);
}

TEST(CensoredScore, Examples) {
  const GaussianDist g(0, 1);
  EXPECT_NEAR(censored_score(g, 1.0, {0.0, CensorSide::below}), -0.69315, 1e-5);
  EXPECT_NEAR(censored_score(g, -1.0, {0.0, CensorSide::below}), -1.41894, 1e-5);
  for (double y : {-3.0, 0.2, 4.0}) EXPECT_DOUBLE_EQ(censored_score(g, y, {kInf, CensorSide::below}), log_score(g, y));
}

TEST(CensoredScore, MixtureLogSumMatchesDirect) {
  auto a = std::make_shared<LocationScaleDist>(0.1, 0.8, skew_normal(-4.0));
  auto b = std::make_shared<GaussianDist>(-0.2, 1.4);
  const MixtureDist m({0.3, 0.7}, {a, b});
  for (auto side : {CensorSide::below, CensorSide::above}) {
    const CensorRegion r{0.5, side};
    for (double y : {-6.0, -1.0, 0.5, 0.9, 7.0}) {
      const double direct = r.contains(y) ? std::log(m.density(y))
                                          : std::log(side == CensorSide::below ? 1 - m.cdf(0.5) : m.cdf(0.5));
      EXPECT_NEAR(censored_score(m, y, r), direct, 1e-10);
      const Distribution& generic = m;
      EXPECT_DOUBLE_EQ(censored_score(generic, y, r), censored_score(m, y, r));
    }
  }
}

TEST(Crps, GaussianClosedFormAgainstOracle) {
  EXPECT_NEAR(crps(GaussianDist(0, 1), 0.0), -0.23370, 1e-5);
  EXPECT_NEAR(crps(GaussianDist(0, 1), 0.0), ft::oracle_crps(ft::oracle_normal_cdf, 0.0, -10, 10), 1e-8);
  EXPECT_GT(crps(GaussianDist(2.0, 1e-6), 2.0), -1e-6);
}

TEST(Crps, QuadratureAgreesWithClosedForm) {
  Random rng(2);
  for (int i = 0; i < 30; ++i) {
    const GaussianDist g(rng.normal(), 0.2 + 2 * rng.uniform());
    const double y = g.mean() + 3 * g.sd() * rng.normal();
    EXPECT_NEAR(crps_quadrature(g, y), crps(g, y), 1e-6);
  }
}

TEST(Crps, SkewPredictiveAgainstOracle) {
  const LocationScaleDist d(0.3, 1.5, skew_normal(-5.0));
  for (double y : {-4.0, -0.5, 0.3, 2.0}) {
    const double o = ft::oracle_crps([&](double x) { return d.cdf(x); }, y, d.mean() - 10 * d.sd(), d.mean() + 10 * d.sd());
    EXPECT_NEAR(crps(d, y), o, 1e-6);
  }
}

TEST(Msis, Examples) {
  EXPECT_DOUBLE_EQ(msis_update_score(std::vector{-1.0}, std::vector{1.0}, std::vector{0.0}, 0.05), -2.0);
  EXPECT_DOUBLE_EQ(msis_update_score(std::vector{-1.0}, std::vector{1.0}, std::vector{2.0}, 0.05), -42.0);
  EXPECT_DOUBLE_EQ(msis_update_score(std::vector{-1.0, -2.0}, std::vector{1.0, 2.0}, std::vector{0.0, 0.0}, 0.05), -3.0);
  EXPECT_THROW(msis_update_score(std::vector<double>{}, std::vector<double>{}, std::vector<double>{}, 0.05), InvalidInput);
}

TEST(Msis, Competition) {
  const std::vector<double> unit_steps{0, 1, 2, 3, 4, 5};  // mean |diff| = 1
  const std::vector<double> lo{-1, 0}, hi{1, 3}, act{0, 5};
  EXPECT_DOUBLE_EQ(msis_competition(unit_steps, lo, hi, act, 0.05), msis_update_score(lo, hi, act, 0.05));
  EXPECT_DOUBLE_EQ(msis_competition(unit_steps, std::vector{0.0, 1.0}, std::vector{2.5, 3.5}, std::vector{1.0, 2.0}, 0.05), -2.5);
  EXPECT_THROW(msis_competition(std::vector(5, 1.0), lo, hi, act, 0.05), DegenerateScale);
}

TEST(Threshold, Type7) {
  std::vector<double> h(100);
  for (int i = 0; i < 100; ++i) h[i] = i + 1;
  EXPECT_DOUBLE_EQ(threshold_from_empirical_quantile(h, 0.5), 50.5);
  const std::vector<double> ten{10, 3, 7, 1, 2, 9, 4, 6, 5, 8};
  EXPECT_NEAR(threshold_from_empirical_quantile(ten, 0.1), 1.9, 1e-12);
  EXPECT_DOUBLE_EQ(threshold_from_empirical_quantile(std::vector(20, 4.2), 0.3), 4.2);
  EXPECT_THROW(threshold_from_empirical_quantile(h, 1.0), InvalidInput);
  Random rng(6);
  std::vector<double> r(57);
  for (auto& v : r) v = rng.normal();
  for (double p : {0.01, 0.1, 0.37, 0.9, 0.99})
    EXPECT_NEAR(threshold_from_empirical_quantile(r, p), ft::oracle_type7(r, p), 1e-14);
}

TEST(RuleId, Parse) {
  EXPECT_EQ(RuleId::parse("ls").kind, RuleKind::log_score);
  EXPECT_EQ(RuleId::parse("crps").kind, RuleKind::crps);
  const auto r = RuleId::parse("cs>90");
  EXPECT_EQ(r.kind, RuleKind::censored);
  EXPECT_EQ(r.side, CensorSide::above);
  EXPECT_DOUBLE_EQ(r.percentile, 90.0);
  EXPECT_EQ(RuleId::parse("cs<10").side, CensorSide::below);
  EXPECT_THROW(RuleId::parse("cs>100"), InvalidInput);
  EXPECT_THROW(RuleId::parse("brier"), InvalidInput);
}

TEST(ScoreSum, ReducesToGaussianLikelihood) {
  Random rng(10);
  std::vector<double> y(200);
  for (auto& v : y) v = rng.normal();
  const auto cls = PredictiveClass::arch1();
  const std::vector<double> theta{0.0, 1.0, 0.0};
  double ll = 0.0;
  for (std::size_t t = 1; t < y.size(); ++t) ll += std::log(ft::oracle_normal_pdf(y[t]));
  EXPECT_NEAR(score_sum(ScoringRule::log_score(), cls, theta, y), ll, 1e-9);
  EXPECT_NEAR(score_sum(ScoringRule::censored({kInf, CensorSide::below}), cls, theta, y), ll, 1e-9);
  const std::vector<double> two{0.4, -1.1};
  EXPECT_DOUBLE_EQ(score_sum(ScoringRule::crps(), cls, theta, two), crps(GaussianDist(0, 1), -1.1));
}

TEST(ScoreSum, MixtureCriterionMatchesPredictives) {
  Random rng(13);
  std::vector<double> y(120);
  for (auto& v : y) v = 0.8 * rng.normal();
  const MixtureConstituents c{{0.0, 0.4, 0.3, -3.0}, {0.0, 0.05, 0.1, 0.8}};
  const auto cls = PredictiveClass::linear_pool(c);
  for (const auto& rule : {ScoringRule::log_score(), ScoringRule::crps(),
                           ScoringRule::censored({0.9, CensorSide::above}, "cs>")}) {
    const ScoreCriterion crit(cls, rule, y);
    const std::vector<double> theta{0.35};
    // GARCH constituent filtered from the window's sample variance
    const auto s2 = garch11_filter(c.psi2, y, variance(y));
    double direct = 0.0;
    for (std::size_t t = 1; t < y.size(); ++t) {
      auto p1 = std::make_shared<LocationScaleDist>(skew_arch_predictive(c.psi1, y[t - 1]));
      auto p2 = std::make_shared<GaussianDist>(c.psi2.theta1, std::sqrt(s2[t]));
      direct += rule(MixtureDist({0.35, 0.65}, {p1, p2}), y[t]);
    }
    EXPECT_NEAR(crit(theta), direct, 1e-6 * std::abs(direct) + 1e-8) << rule.name;
  }
}

TEST(ScoreSum, EtsMsisCriterion) {
  EtsSpec spec;
  spec.theta1 = 0.3;
  spec.sigma2 = 1.0;
  const std::vector<double> y{1.0, 1.5, 0.7, 1.2, 2.0};
  const auto cls = PredictiveClass::exponential_smoothing(spec);
  const IntervalLevel lvl{0.05, 2};
  const ScoreCriterion crit(cls, ScoringRule::msis(lvl), y);
  double total = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const auto origin = ets_filter(spec, std::span(y).first(t));
    std::vector<double> lo, hi, act;
    for (int h = 1; h <= 2 && t + h <= y.size(); ++h) {
      const auto m = ets_forecast_moments(spec, origin, h);
      const double z = normal_quantile(0.975) * std::sqrt(m.variance);
      lo.push_back(m.mean - z);
      hi.push_back(m.mean + z);
      act.push_back(y[t + h - 1]);
    }
    total += msis_update_score(lo, hi, act, 0.05);
  }
  EXPECT_NEAR(crit(std::vector{0.3}), total, 1e-10);
}

}  // namespace
