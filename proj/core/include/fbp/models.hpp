#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fbp/distributions.hpp"
#include "fbp/optimize.hpp"
#include "fbp/series.hpp"

namespace fbp {

enum class ModelClass { arch1, garch11, skew_arch1, mixture, ets };

std::string_view to_string(ModelClass model);
ModelClass parse_model_class(std::string_view name);

// y_t = theta1 + sigma_t eps_t, sigma_t^2 = theta2 + theta3 (y_{t-1} - theta1)^2.
struct ArchParams {
  double theta1 = 0.0;
  double theta2 = 1.0;
  double theta3 = 0.0;

  void validate() const;
};

// GARCH(1,1): sigma_t^2 = theta2 + theta3 (y_{t-1} - theta1)^2 + theta4 sigma_{t-1}^2.
struct GarchParams {
  double theta1 = 0.0;
  double theta2 = 1.0;
  double theta3 = 0.0;
  double theta4 = 0.0;

  void validate() const;
};

// ARCH(1) with standardized skew-normal innovations of shape `gamma`.
struct SkewArchParams {
  double theta1 = 0.0;
  double theta2 = 1.0;
  double theta3 = 0.0;
  double gamma = 0.0;

  void validate() const;
};

// Constituents of the two-model linear pool, held fixed (MLE values).
struct MixtureConstituents {
  SkewArchParams psi1;
  GarchParams psi2;
};

struct MixtureWeight {
  double theta1 = 0.5;  // weight on the skew-normal ARCH constituent
  MixtureConstituents constituents;
};

GaussianDist arch1_predictive(const ArchParams& params, double y_prev);

// Conditional variances sigma_1^2 .. sigma_{n+1}^2 (sigma_1^2 = sigma2_init);
// the last element is the variance of the one-step predictive for y_{n+1}.
std::vector<double> garch11_filter(const GarchParams& params, std::span<const double> y,
                                   double sigma2_init);

LocationScaleDist skew_arch_predictive(const SkewArchParams& params, double y_prev);

// Linear pool theta1 * p1 + (1 - theta1) * p2 for the observation after
// `history`; p2's variance recursion is seeded with the sample variance of
// `history`.
MixtureDist mixture_predictive(const MixtureWeight& weight, std::span<const double> history);

// Shared standardized skew-normal for a shape value (cached, immutable).
std::shared_ptr<const StdSkewNormalDist> skew_normal(double gamma);

// --- maximum likelihood ------------------------------------------------------

struct FittedModel {
  ModelClass model = ModelClass::arch1;
  std::vector<std::string> names;
  std::vector<double> theta;
  double log_likelihood = 0.0;
  int iterations = 0;
  bool boundary = false;  // an estimate sits on a constraint boundary
};

// Gaussian (or skew-normal innovation) log-likelihood conditional on the
// first observation: sum over t = 2..n of ln p(y_t | y_1..y_{t-1}, theta).
double arch1_log_likelihood(const ArchParams& params, std::span<const double> y);
double garch11_log_likelihood(const GarchParams& params, std::span<const double> y);
double skew_arch1_log_likelihood(const SkewArchParams& params, std::span<const double> y);

// Simplex MLE over an unconstrained reparameterisation (log for positive,
// logit for unit-interval parameters). Supports arch1, garch11, skew_arch1.
FittedModel fit_mle(ModelClass model, const TimeSeries& series, const SimplexOptions& options = {});

MixtureConstituents fit_mixture_constituents(const TimeSeries& series,
                                             const SimplexOptions& options = {});

// --- ETS -----------------------------------------------------------------------

enum class EtsTrend { none, additive, damped };

std::string_view to_string(EtsTrend trend);

// Additive-error, non-seasonal exponential smoothing. theta1 = level
// smoothing, theta2 = trend smoothing, theta4 = damping.
struct EtsSpec {
  EtsTrend trend = EtsTrend::none;
  double theta1 = 0.5;
  double theta2 = 0.1;
  double theta4 = 0.9;
  double level0 = 0.0;
  double trend0 = 0.0;
  double sigma2 = 1.0;
  double log_likelihood = 0.0;
  double aic = 0.0;

  void validate() const;
  // Number of active smoothing/damping parameters (1, 2 or 3).
  std::size_t dim() const noexcept;
  std::size_t state_count() const noexcept;
  std::vector<double> smoothing() const;
  EtsSpec with_smoothing(std::span<const double> theta) const;
  std::vector<std::string> smoothing_names() const;
  std::string label() const;  // "ANN", "AAN", "AAdN"
};

struct EtsState {
  double level = 0.0;
  double trend = 0.0;
};

// Filters y through the recursions from its level0/trend0 initial states. Returns
// the state after the last observation; residuals (optional) receive the
// one-step innovations.
EtsState ets_filter(const EtsSpec& spec, std::span<const double> y,
                    std::vector<double>* residuals = nullptr);

struct ForecastMoments {
  double mean = 0.0;
  double variance = 0.0;
};

// h-step mean and class-1 analytic variance from a forecast-origin state.
ForecastMoments ets_forecast_moments(const EtsSpec& spec, const EtsState& origin, int horizon);

// h-step Gaussian predictive at the end of `history`.
GaussianDist ets_predictive(const EtsSpec& spec, std::span<const double> history, int horizon);

// Gaussian MLE of one trend type with initial states estimated jointly.
EtsSpec ets_fit(const TimeSeries& series, EtsTrend trend, const SimplexOptions& options = {});

// Fits ANN, AAN and AAdN and returns the AIC minimiser.
EtsSpec ets_select_and_fit(const TimeSeries& series, const SimplexOptions& options = {});

// --- expected shortfall ------------------------------------------------------

enum class Tail { lower, upper };

std::string_view to_string(Tail tail);

// Gaussian ES. lower: -(mu - sigma phi(z_a)/a), the negated mean below the
// alpha quantile. upper: mu + sigma phi(z_a)/(1 - a), the mean above it.
double gaussian_es(double mu, double sigma, double alpha, Tail tail);

// --- predictive classes --------------------------------------------------------

// A parametric predictive class P^t together with whatever it holds fixed
// (mixture constituents, ETS initial states and variance).
struct PredictiveClass {
  ModelClass model = ModelClass::arch1;
  std::optional<MixtureConstituents> mixture;
  std::optional<EtsSpec> ets;

  static PredictiveClass arch1();
  static PredictiveClass garch11();
  static PredictiveClass linear_pool(MixtureConstituents constituents);
  static PredictiveClass exponential_smoothing(EtsSpec spec);

  std::size_t dim() const;
  std::vector<std::string> param_names() const;
  bool in_support(std::span<const double> theta) const;
  // One-step predictive for the observation following `history`.
  DistributionPtr predictive(std::span<const double> theta, std::span<const double> history) const;
};

}  // namespace fbp
