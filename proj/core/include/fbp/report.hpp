#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fbp/backtest.hpp"
#include "fbp/evaluation.hpp"

namespace fbp {

// Resolved key/value settings echoed into every output.
using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

// scores.csv, cumavg.csv, exceedances.csv, es_forecasts.csv,
// es_posterior_density.csv and summary.json.
void write_backtest_outputs(const EvaluationReport& report, const std::filesystem::path& dir,
                            const ConfigEcho& echo);

// eta,delta,lo,hi preceded by "# key=value" lines.
void write_murphy_csv(const std::filesystem::path& path, const MurphyGrid& grid,
                      const ConfigEcho& echo);

struct MsisSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double sd = 0.0;
  std::vector<std::pair<int, double>> quantiles;  // percent -> value
};

// Mean, median, sd and the 1,10,25,50,75,90,99% quantiles.
MsisSummary summarize_msis(std::span<const double> values);

struct MsisFailure {
  std::string name;
  std::string reason;
};

// msis_results.csv and summary.json.
void write_msis_outputs(const std::filesystem::path& dir, const std::vector<MsisOutcome>& results,
                        const std::vector<MsisFailure>& failures, const ConfigEcho& echo);

void write_config_echo(const std::filesystem::path& path, const ConfigEcho& echo);

}  // namespace fbp
