#include <benchmark/benchmark.h>

#include <vector>

#include "fbp/evaluation.hpp"
#include "fbp/models.hpp"
#include "fbp/posterior.hpp"
#include "fbp/random.hpp"
#include "fbp/scoring.hpp"

namespace {

using namespace fbp;

std::vector<double> arch_path(std::size_t n) {
  Random rng(1);
  std::vector<double> y(n);
  double prev = 0.0;
  for (auto& v : y) {
    v = std::sqrt(0.5 + 0.3 * prev * prev) * rng.normal();
    prev = v;
  }
  return y;
}

void BM_ScoreCriterion(benchmark::State& state, ScoringRule rule) {
  const auto y = arch_path(static_cast<std::size_t>(state.range(0)));
  const auto window = y;
  if (rule.kind == RuleKind::censored) rule.region.threshold = threshold_from_empirical_quantile(window, 0.9);
  const ScoreCriterion crit(PredictiveClass::arch1(), rule, y);
  const std::vector<double> theta{0.0, 0.5, 0.3};
  for (auto _ : state) benchmark::DoNotOptimize(crit(theta));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK_CAPTURE(BM_ScoreCriterion, ls, ScoringRule::log_score())->Arg(500)->Arg(5000);
BENCHMARK_CAPTURE(BM_ScoreCriterion, cs, ScoringRule::censored({0.0, CensorSide::above}))->Arg(500)->Arg(5000);
BENCHMARK_CAPTURE(BM_ScoreCriterion, crps, ScoringRule::crps())->Arg(500)->Arg(5000);

void BM_CrpsQuadrature(benchmark::State& state) {
  const LocationScaleDist d(0.0, 1.0, skew_normal(-5.0));
  double y = -0.7;
  for (auto _ : state) benchmark::DoNotOptimize(crps(d, y));
}
BENCHMARK(BM_CrpsQuadrature);

void BM_ArchChain(benchmark::State& state) {
  const auto y = arch_path(500);
  ChainSettings c;
  c.burn_in = 1000;
  c.iterations = 4000;
  c.thin = 10;
  for (auto _ : state) benchmark::DoNotOptimize(sample_arch(y, ScoringRule::log_score(), {}, c));
  state.SetItemsProcessed(state.iterations() * 5000);
}
BENCHMARK(BM_ArchChain)->Unit(benchmark::kMillisecond);

void BM_MeanPredictiveQuantile(benchmark::State& state) {
  std::vector<DistributionPtr> comps;
  Random rng(2);
  for (int i = 0; i < state.range(0); ++i)
    comps.push_back(std::make_shared<GaussianDist>(0.05 * rng.normal(), 1.0 + 0.05 * rng.uniform()));
  const MeanPredictive mp(std::move(comps));
  for (auto _ : state) benchmark::DoNotOptimize(mean_predictive_quantile(mp, 0.1));
}
BENCHMARK(BM_MeanPredictiveQuantile)->Arg(1000)->Arg(4000);

}  // namespace

BENCHMARK_MAIN();
