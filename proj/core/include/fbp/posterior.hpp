#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fbp/models.hpp"
#include "fbp/optimize.hpp"
#include "fbp/scoring.hpp"

namespace fbp {

enum class ScaleMethod { unit, crps_ratio, msis_formula, manual };

std::string_view to_string(ScaleMethod method);

struct ScaleFactor {
  double w = 1.0;
  ScaleMethod method = ScaleMethod::unit;

  void validate() const;
};

struct ChainSettings {
  int burn_in = 10000;
  int iterations = 40000;  // after burn-in
  int thin = 10;
  double initial_step = 0.05;
  int adapt_interval = 50;
  double accept_low = 0.3;
  double accept_high = 0.7;
  std::size_t grid_size = 1000;  // mixture weight grid
  std::uint64_t seed = 1;

  void validate() const;
  std::size_t retained() const { return static_cast<std::size_t>(iterations / thin); }
};

// Where a chain resumes: the previous window's last draw and adapted steps.
struct WarmStart {
  std::vector<double> theta;
  std::vector<double> steps;
};

struct PosteriorDraws {
  std::vector<std::string> names;
  std::vector<std::vector<double>> draws;
  ScaleFactor w;
  double acceptance_rate = 0.0;  // post burn-in
  int chain_length = 0;
  int burn_in = 0;
  int thin = 1;
  std::uint64_t seed = 0;
  std::vector<double> steps;  // proposal scales at the end of adaptation
  // grid posterior only
  std::vector<double> grid;
  std::vector<double> grid_weights;

  std::size_t size() const noexcept { return draws.size(); }
  std::vector<double> column(std::size_t i) const;
  double mean(std::size_t i) const;
  double sd(std::size_t i) const;
  WarmStart warm_start() const;
};

// ln pi(theta): -ln theta2 for ARCH/GARCH, flat for the mixture weight and
// the ETS box; -inf off the support.
double log_prior(const PredictiveClass& cls, std::span<const double> theta);

// w S_n(theta) + ln pi(theta), -inf off the support.
double log_posterior_kernel(const PredictiveClass& cls, std::span<const double> theta,
                            std::span<const double> series, const ScoringRule& rule, double w);

// Random-walk Metropolis-Hastings with truncated-normal proposals. ARCH
// moves all three parameters jointly with one shared step; GARCH and ETS
// update random pairs with per-parameter steps. Steps adapt during burn-in
// only. A cold start begins at optimize_score's estimate.
PosteriorDraws sample_arch(std::span<const double> series, const ScoringRule& rule, ScaleFactor w,
                           const ChainSettings& settings, const WarmStart* warm = nullptr);
PosteriorDraws sample_garch(std::span<const double> series, const ScoringRule& rule, ScaleFactor w,
                            const ChainSettings& settings, const WarmStart* warm = nullptr);
PosteriorDraws sample_ets(std::span<const double> series, const EtsSpec& spec,
                          const ScoringRule& rule, ScaleFactor w, const ChainSettings& settings,
                          const WarmStart* warm = nullptr);

// Kernel evaluated on theta1 = (i - 0.5)/G, normalised, then `draws`
// i.i.d. samples from the discrete approximation.
PosteriorDraws grid_posterior_mixture(std::span<const double> series,
                                      const MixtureConstituents& constituents,
                                      const ScoringRule& rule, ScaleFactor w,
                                      std::size_t grid_size, std::size_t draws,
                                      std::uint64_t seed);
PosteriorDraws grid_posterior(std::size_t grid_size,
                              const std::function<double(double)>& log_kernel,
                              std::size_t draws, std::uint64_t seed);

PosteriorDraws sample_posterior(const PredictiveClass& cls, std::span<const double> series,
                                const ScoringRule& rule, ScaleFactor w,
                                const ChainSettings& settings, const WarmStart* warm = nullptr);

// Maximiser of S_n over the class support.
std::vector<double> optimize_score(const PredictiveClass& cls, std::span<const double> series,
                                   const ScoringRule& rule, const SimplexOptions& options = {});

// w = sum_j sum_t LS / sum_j sum_t CRPS over exact-Bayes draws.
ScaleFactor scale_from_score_sums(std::span<const double> ls_sums,
                                  std::span<const double> crps_sums);
ScaleFactor calibrate_w_crps(std::span<const double> series, const PredictiveClass& cls,
                             const ChainSettings& settings);

// w = -n d / (2 S_n(theta_hat)).
ScaleFactor msis_scale(std::size_t n, std::size_t d, double criterion_at_estimate);
ScaleFactor calibrate_w_msis(std::span<const double> series, const EtsSpec& spec,
                             IntervalLevel level = {});

void write_draws_csv(const std::filesystem::path& path, const PosteriorDraws& draws);

}  // namespace fbp
