#include "fbp/backtest.hpp"

#include <algorithm>
#include <cmath>

#include "fbp/error.hpp"
#include "fbp/numeric.hpp"
#include "fbp/random.hpp"

namespace fbp {

void BacktestConfig::validate(std::size_t len) const {
  if (n0 < 30) throw InvalidInput("backtest: n0 must be at least 30");
  if (len <= n0) throw InvalidInput("backtest: series is not longer than n0");
  const std::size_t last = last_target(len);
  if (last > len - 1) throw InvalidInput("backtest: final_index exceeds the series length - 1");
  if (last < n0) throw InvalidInput("backtest: final_index must be at least n0");
  if (update_rules.empty() || eval_rules.empty())
    throw InvalidInput("backtest: update and evaluation rules must be nonempty");
  for (const auto& r : update_rules)
    if (RuleId::parse(r).kind == RuleKind::msis)
      throw InvalidInput("backtest: msis is not a one-step update rule");
  for (const auto& r : eval_rules)
    if (RuleId::parse(r).kind == RuleKind::msis)
      throw InvalidInput("backtest: msis is not a one-step evaluation rule");
  for (double a : var_levels)
    if (!(a > 0.0 && a < 1.0)) throw InvalidInput("backtest: VaR levels must lie in (0, 1)");
  for (double a : es_levels)
    if (!(a > 0.0 && a < 1.0)) throw InvalidInput("backtest: ES levels must lie in (0, 1)");
  if (!es_levels.empty() && es_mc_draws < 10'000)
    throw InvalidInput("backtest: es_mc_draws must be at least 10000");
  if (warm_burn_in < 0) throw InvalidInput("backtest: warm_burn_in must be nonnegative");
  if (w_recalibrate_every < 0) throw InvalidInput("backtest: w_recalibrate_every must be nonnegative");
  chain.validate();
}

std::size_t BacktestConfig::last_target(std::size_t len) const {
  return final_index == 0 ? len - 1 : final_index;
}

const UpdateTrack& EvaluationReport::track(const std::string& update_rule) const {
  for (const auto& t : tracks)
    if (t.update_rule == update_rule) return t;
  throw InvalidInput("no track for update rule " + update_rule);
}

double EvaluationReport::average(const std::string& update_rule, const std::string& eval_rule) const {
  const auto& t = track(update_rule);
  for (std::size_t j = 0; j < eval_rules.size(); ++j)
    if (eval_rules[j] == eval_rule) return t.average[j];
  throw InvalidInput("no evaluation rule " + eval_rule);
}

namespace {

Tail tail_of(double level) { return level < 0.5 ? Tail::lower : Tail::upper; }

void aggregate(UpdateTrack& track, const BacktestConfig& cfg, std::size_t n_eval) {
  track.average.assign(n_eval, 0.0);
  track.cumulative.assign(n_eval, {});
  std::vector<double> sums(n_eval, 0.0);
  std::size_t ok = 0;
  for (const auto& w : track.windows) {
    if (w.failed) continue;
    ++ok;
    for (std::size_t j = 0; j < n_eval; ++j) {
      sums[j] += w.scores[j];
      track.cumulative[j].push_back(sums[j] / static_cast<double>(ok));
    }
  }
  for (std::size_t j = 0; j < n_eval; ++j)
    track.average[j] = ok ? sums[j] / static_cast<double>(ok) : std::nan("");

  for (std::size_t l = 0; l < cfg.var_levels.size(); ++l) {
    std::vector<double> var, act;
    for (const auto& w : track.windows) {
      if (w.failed) continue;
      var.push_back(w.var[l]);
      act.push_back(w.actual);
    }
    track.exceedances.push_back(
        make_exceedances(var, act, cfg.var_levels[l], tail_of(cfg.var_levels[l])));
    if (var.size() >= 20) track.christoffersen.emplace_back(christoffersen_test(track.exceedances.back()));
    else track.christoffersen.emplace_back(std::nullopt);
  }
}

}  // namespace

EvaluationReport expanding_backtest(const TimeSeries& series, ModelClass model,
                                    const BacktestConfig& cfg) {
  const auto y = series.view();
  cfg.validate(y.size());
  EvaluationReport report;
  report.model = std::string(to_string(model));
  report.config = cfg;
  report.eval_rules = cfg.eval_rules;

  PredictiveClass cls;
  switch (model) {
    case ModelClass::arch1: cls = PredictiveClass::arch1(); break;
    case ModelClass::garch11: cls = PredictiveClass::garch11(); break;
    case ModelClass::mixture: {
      TimeSeries first{std::vector<double>(y.begin(), y.begin() + static_cast<long>(cfg.n0)), series.frequency, series.name};
      report.constituents = fit_mixture_constituents(first);
      cls = PredictiveClass::linear_pool(*report.constituents);
      break;
    }
    case ModelClass::ets: {
      TimeSeries first{std::vector<double>(y.begin(), y.begin() + static_cast<long>(cfg.n0)), series.frequency, series.name};
      cls = PredictiveClass::exponential_smoothing(ets_select_and_fit(first));
      break;
    }
    case ModelClass::skew_arch1:
      throw InvalidInput("skew_arch1 is a mixture constituent, not a predictive class");
  }

  const std::size_t last = cfg.last_target(y.size());
  const std::size_t n_windows = last - cfg.n0 + 1;
  std::vector<RuleId> eval_ids;
  for (const auto& r : cfg.eval_rules) eval_ids.push_back(RuleId::parse(r));

  report.tracks.resize(cfg.update_rules.size());
  parallel_for(cfg.update_rules.size(), cfg.threads, [&](std::size_t u) {
    UpdateTrack& track = report.tracks[u];
    track.update_rule = cfg.update_rules[u];
    const RuleId id = RuleId::parse(track.update_rule);
    const std::uint64_t rule_tag = hash_tag(track.update_rule);
    std::optional<WarmStart> warm;
    ScaleFactor w;
    bool have_w = false;

    for (std::size_t k = 0; k < n_windows; ++k) {
      const std::size_t n = cfg.n0 + k;
      const auto window = y.first(n);
      WindowRecord rec;
      rec.target = n;
      rec.actual = y[n];
      try {
        if (id.kind == RuleKind::crps) {
          const bool recal = cfg.w_recalibrate_every > 0 && k % static_cast<std::size_t>(cfg.w_recalibrate_every) == 0;
          if (!have_w || recal) {
            ChainSettings cs = cfg.chain;
            cs.seed = derive_seed(cfg.seed, {hash_tag("calibrate"), rule_tag, k});
            w = calibrate_w_crps(window, cls, cs);
            have_w = true;
          }
        }
        const ScoringRule rule = resolve_rule(id, window);
        ChainSettings cs = cfg.chain;
        cs.seed = derive_seed(cfg.seed, {hash_tag("chain"), rule_tag, k});
        if (warm) cs.burn_in = cfg.warm_burn_in;
        const auto draws = sample_posterior(cls, window, rule, w, cs, warm ? &*warm : nullptr);
        rec.w = w.w;
        rec.acceptance = draws.acceptance_rate;

        const auto mp = mean_predictive(draws, cls, window);
        for (const auto& eid : eval_ids)
          rec.scores.push_back(resolve_rule(eid, window)(mp.mixture(), rec.actual));
        for (double a : cfg.var_levels) rec.var.push_back(mean_predictive_quantile(mp, a));
        for (std::size_t l = 0; l < cfg.es_levels.size(); ++l) {
          const double a = cfg.es_levels[l];
          rec.es.push_back(mean_predictive_es(mp, a, tail_of(a), cfg.es_mc_draws,
                                              derive_seed(cfg.seed, {hash_tag("es"), rule_tag, k, l})));
        }
        if (std::find(cfg.es_density_windows.begin(), cfg.es_density_windows.end(), k) !=
            cfg.es_density_windows.end()) {
          for (double a : cfg.es_levels) {
            const auto values = es_posterior_distribution(
                draws, cls, window, a, tail_of(a), derive_seed(cfg.seed, {hash_tag("es-density"), rule_tag, k}));
            track.es_densities.push_back({n, a, tail_of(a), kernel_density(values)});
          }
        }
        warm = draws.warm_start();
      } catch (const NumericalError& e) {
        rec.failed = true;
        rec.failure = e.what();
        rec.scores.clear();
        rec.var.clear();
        rec.es.clear();
        ++track.failures;
      }
      track.windows.push_back(std::move(rec));
    }
    aggregate(track, cfg, eval_ids.size());
  });

  for (const auto& t : report.tracks)
    if (static_cast<double>(t.failures) > 0.05 * static_cast<double>(n_windows)) report.valid = false;
  return report;
}

MsisOutcome msis_backtest(const TimeSeries& series, const MsisConfig& config) {
  config.level.validate();
  const auto y = series.view();
  const auto H = static_cast<std::size_t>(config.level.horizon_cap);
  if (y.size() < 12) throw InvalidInput("msis_backtest: series needs at least 12 observations");
  if (y.size() < H + 8) throw InvalidInput("msis_backtest: training portion shorter than 8 observations");
  const auto train = y.first(y.size() - H);
  const auto test = y.last(H);
  TimeSeries train_series{std::vector<double>(train.begin(), train.end()), series.frequency, series.name};

  MsisOutcome out;
  out.name = series.name;
  out.spec = ets_select_and_fit(train_series);
  out.w = calibrate_w_msis(train, out.spec, config.level);
  ChainSettings cs = config.chain;
  cs.seed = config.seed;
  const auto draws = sample_ets(train, out.spec, ScoringRule::msis(config.level), out.w, cs);
  out.acceptance = draws.acceptance_rate;

  std::vector<EtsSpec> specs;
  std::vector<EtsState> states;
  for (const auto& th : draws.draws) {
    specs.push_back(out.spec.with_smoothing(th));
    states.push_back(ets_filter(specs.back(), train));
  }
  const EtsState mle_state = ets_filter(out.spec, train);
  const double a = config.level.alpha;
  for (std::size_t h = 1; h <= H; ++h) {
    std::vector<DistributionPtr> comps;
    comps.reserve(specs.size());
    for (std::size_t j = 0; j < specs.size(); ++j) {
      const auto m = ets_forecast_moments(specs[j], states[j], static_cast<int>(h));
      comps.push_back(std::make_shared<GaussianDist>(m.mean, std::sqrt(m.variance)));
    }
    const MeanPredictive mp(std::move(comps));
    out.fbp_lower.push_back(mean_predictive_quantile(mp, a / 2.0));
    out.fbp_upper.push_back(mean_predictive_quantile(mp, 1.0 - a / 2.0));
    const auto m = ets_forecast_moments(out.spec, mle_state, static_cast<int>(h));
    const GaussianDist g(m.mean, std::sqrt(m.variance));
    out.mle_lower.push_back(g.quantile(a / 2.0));
    out.mle_upper.push_back(g.quantile(1.0 - a / 2.0));
  }
  out.actuals.assign(test.begin(), test.end());
  out.fbp_msis = msis_competition(train, out.fbp_lower, out.fbp_upper, out.actuals, a, config.m);
  out.mle_msis = msis_competition(train, out.mle_lower, out.mle_upper, out.actuals, a, config.m);
  return out;
}

}  // namespace fbp
