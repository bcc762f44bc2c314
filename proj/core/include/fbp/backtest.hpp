#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fbp/evaluation.hpp"
#include "fbp/models.hpp"
#include "fbp/posterior.hpp"
#include "fbp/scoring.hpp"
#include "fbp/series.hpp"

namespace fbp {

struct BacktestConfig {
  std::size_t n0 = 500;           // first estimation window
  std::size_t final_index = 0;    // last forecast target (0-based); 0 means the series end
  std::vector<std::string> update_rules{"ls"};
  std::vector<std::string> eval_rules{"ls"};
  ChainSettings chain;
  int warm_burn_in = 1000;        // burn-in of warm-started windows
  int w_recalibrate_every = 0;    // CRPS w: 0 calibrates on the first window only
  std::vector<double> var_levels{0.1, 0.2, 0.8, 0.9};
  std::vector<double> es_levels{0.1, 0.9};  // below 0.5 is the lower tail
  std::size_t es_mc_draws = 100'000;
  std::vector<std::size_t> es_density_windows;  // window indices with ES posterior densities
  std::uint64_t seed = 1;
  unsigned threads = 1;

  void validate(std::size_t series_length) const;
  std::size_t last_target(std::size_t series_length) const;
};

struct WindowRecord {
  std::size_t target = 0;  // 0-based index of the forecast observation
  double actual = 0.0;
  bool failed = false;
  std::string failure;
  double w = 1.0;
  double acceptance = 0.0;
  std::vector<double> scores;  // per evaluation rule
  std::vector<double> var;     // per VaR level
  std::vector<double> es;      // per ES level
};

struct EsDensity {
  std::size_t target = 0;
  double level = 0.0;
  Tail tail = Tail::lower;
  DensityGrid grid;
};

struct UpdateTrack {
  std::string update_rule;
  std::vector<WindowRecord> windows;
  std::size_t failures = 0;
  std::vector<double> average;                    // per evaluation rule
  std::vector<std::vector<double>> cumulative;    // per evaluation rule, per successful window
  std::vector<ExceedanceRecord> exceedances;      // per VaR level
  std::vector<std::optional<ChristoffersenResult>> christoffersen;
  std::vector<EsDensity> es_densities;
};

struct EvaluationReport {
  std::string model;
  BacktestConfig config;
  std::vector<std::string> eval_rules;
  std::vector<UpdateTrack> tracks;
  std::optional<MixtureConstituents> constituents;
  bool valid = true;  // at most 5% of windows failed in every track

  const UpdateTrack& track(const std::string& update_rule) const;
  double average(const std::string& update_rule, const std::string& eval_rule) const;
};

// Expanding-window out-of-sample evaluation: each window y_1..y_n is updated
// under every update rule and its mean predictive scored at y_{n+1}.
EvaluationReport expanding_backtest(const TimeSeries& series, ModelClass model,
                                    const BacktestConfig& config);

struct MsisConfig {
  IntervalLevel level{0.05, 6};
  int m = 1;  // seasonal lag of the scale denominator
  ChainSettings chain;
  std::uint64_t seed = 1;
};

struct MsisOutcome {
  std::string name;
  EtsSpec spec;
  ScaleFactor w;
  double acceptance = 0.0;
  std::vector<double> actuals;
  std::vector<double> fbp_lower, fbp_upper;
  std::vector<double> mle_lower, mle_upper;
  double fbp_msis = 0.0;  // negated, larger is better
  double mle_msis = 0.0;
};

// Fits ETS on all but the last H observations, samples the MSIS-focused
// posterior and scores both FBP and plug-in MLE intervals on the held-out H.
MsisOutcome msis_backtest(const TimeSeries& series, const MsisConfig& config);

}  // namespace fbp
