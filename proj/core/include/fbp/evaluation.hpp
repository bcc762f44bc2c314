#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "fbp/distributions.hpp"
#include "fbp/models.hpp"
#include "fbp/posterior.hpp"

namespace fbp {

// Equally weighted average of the per-draw predictives.
class MeanPredictive {
 public:
  explicit MeanPredictive(std::vector<DistributionPtr> components);

  const MixtureDist& mixture() const noexcept { return *mix_; }
  std::shared_ptr<const MixtureDist> shared() const noexcept { return mix_; }
  std::size_t size() const noexcept { return mix_->components().size(); }
  double density(double x) const { return mix_->density(x); }
  double cdf(double x) const { return mix_->cdf(x); }

 private:
  std::shared_ptr<const MixtureDist> mix_;
};

MeanPredictive mean_predictive(const PosteriorDraws& draws, const PredictiveClass& cls,
                               std::span<const double> history);

// Bisection on the averaged CDF to 1e-8.
double mean_predictive_quantile(const MeanPredictive& mp, double p);

// Monte Carlo ES from `mc_draws` samples of the mean predictive, with the
// conventions of gaussian_es.
double mean_predictive_es(const MeanPredictive& mp, double alpha, Tail tail,
                          std::size_t mc_draws, std::uint64_t seed);

// One ES value per retained draw: closed form for Gaussian predictives,
// otherwise 10^4 Monte Carlo draws from that predictive.
std::vector<double> es_posterior_distribution(const PosteriorDraws& draws,
                                              const PredictiveClass& cls,
                                              std::span<const double> history, double alpha,
                                              Tail tail, std::uint64_t seed = 1);

// --- VaR backtesting -----------------------------------------------------------

struct ExceedanceRecord {
  std::vector<int> hits;
  double alpha = 0.1;  // quantile level of the VaR forecast
  Tail tail = Tail::lower;

  // Nominal probability of a hit: alpha (lower) or 1 - alpha (upper).
  double hit_probability() const noexcept { return tail == Tail::lower ? alpha : 1.0 - alpha; }
};

// hit = 1 when y < VaR (lower) or y > VaR (upper).
ExceedanceRecord make_exceedances(std::span<const double> var, std::span<const double> actuals,
                                  double alpha, Tail tail);

double var_exceedance(const ExceedanceRecord& record);

struct ChristoffersenResult {
  double lr_uc = 0.0;
  double lr_ind = 0.0;
  double lr_cc = 0.0;
  bool reject_1pct = false;
};

inline constexpr double kChiSquare2Crit1pct = 9.210;

ChristoffersenResult christoffersen_test(const ExceedanceRecord& record);

// --- ES scoring ----------------------------------------------------------------

// Elementary consistent score for the (VaR, ES) pair at level alpha, with ES
// the signed lower-tail conditional mean E[y | y <= VaR]:
// -1{eta <= es}[(1/alpha) 1{y <= var}(var - y) - (var - eta)] - 1{eta <= y}(y - eta).
double es_consistent_score(double var, double es, double y, double alpha, double eta);

// Aligned VaR/ES forecasts in the reporting convention (gaussian_es).
struct TailForecasts {
  std::vector<double> var;
  std::vector<double> es;
};

struct BootstrapSettings {
  std::size_t block_length = 10;
  std::size_t replications = 1000;
  double level = 0.95;
  std::uint64_t seed = 1;
};

struct MurphyGrid {
  std::vector<double> eta;
  std::vector<double> delta;
  std::vector<double> lower;
  std::vector<double> upper;
};

// 101 points spanning [min - sd, max + sd] of the actuals.
std::vector<double> default_eta_grid(std::span<const double> actuals, std::size_t points = 101);

// Mean score difference A - B per eta with moving-block bootstrap bands.
// Upper-tail forecasts are scored after reflecting y -> -y (level 1 - alpha);
// eta stays in the units of the data.
MurphyGrid murphy_diagram(const TailForecasts& a, const TailForecasts& b,
                          std::span<const double> actuals, double alpha, Tail tail,
                          std::span<const double> eta_grid, const BootstrapSettings& bootstrap);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

// Moving-block bootstrap percentile interval for the mean.
Interval block_bootstrap_ci(std::span<const double> series, std::size_t block_length,
                            std::size_t replications, double level, std::uint64_t seed);

// Gaussian-kernel density on an equally spaced grid (Silverman bandwidth).
struct DensityGrid {
  std::vector<double> x;
  std::vector<double> density;
};

DensityGrid kernel_density(std::span<const double> values, std::size_t points = 201);

}  // namespace fbp
