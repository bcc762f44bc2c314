#include <algorithm>
#include <cmath>
#include <limits>

#include "fbp/error.hpp"
#include "fbp/models.hpp"
#include "fbp/numeric.hpp"

namespace fbp {

namespace {

constexpr double kPhiLo = 0.8;
constexpr double kPhiHi = 0.98;

// sum_{i=1}^{j} phi^i
double damped_sum(double phi, int j) {
  double s = 0.0;
  double p = 1.0;
  for (int i = 1; i <= j; ++i) {
    p *= phi;
    s += p;
  }
  return s;
}

}  // namespace

std::string_view to_string(EtsTrend trend) {
  switch (trend) {
    case EtsTrend::none: return "none";
    case EtsTrend::additive: return "additive";
    case EtsTrend::damped: return "damped";
  }
  return "?";
}

void EtsSpec::validate() const {
  if (!(theta1 > 0.0 && theta1 < 1.0))
    throw InvalidParameter("ETS level smoothing must lie in (0, 1)");
  if (trend != EtsTrend::none && !(theta2 > 0.0 && theta2 < 1.0))
    throw InvalidParameter("ETS trend smoothing must lie in (0, 1)");
  if (trend == EtsTrend::damped && !(theta4 > kPhiLo && theta4 < kPhiHi))
    throw InvalidParameter("ETS damping must lie in (0.8, 0.98)");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
    throw InvalidParameter("ETS sigma2 must be positive");
  if (!std::isfinite(level0) || !std::isfinite(trend0))
    throw InvalidParameter("ETS initial states must be finite");
}

std::size_t EtsSpec::dim() const noexcept {
  switch (trend) {
    case EtsTrend::none: return 1;
    case EtsTrend::additive: return 2;
    case EtsTrend::damped: return 3;
  }
  return 1;
}

std::size_t EtsSpec::state_count() const noexcept { return trend == EtsTrend::none ? 1 : 2; }

std::vector<double> EtsSpec::smoothing() const {
  std::vector<double> th{theta1};
  if (trend != EtsTrend::none) th.push_back(theta2);
  if (trend == EtsTrend::damped) th.push_back(theta4);
  return th;
}

EtsSpec EtsSpec::with_smoothing(std::span<const double> th) const {
  if (th.size() != dim()) throw InvalidInput("ETS smoothing vector has the wrong length");
  EtsSpec s = *this;
  s.theta1 = th[0];
  if (trend != EtsTrend::none) s.theta2 = th[1];
  if (trend == EtsTrend::damped) s.theta4 = th[2];
  return s;
}

std::vector<std::string> EtsSpec::smoothing_names() const {
  std::vector<std::string> n{"theta1"};
  if (trend != EtsTrend::none) n.emplace_back("theta2");
  if (trend == EtsTrend::damped) n.emplace_back("theta4");
  return n;
}

std::string EtsSpec::label() const {
  switch (trend) {
    case EtsTrend::none: return "ANN";
    case EtsTrend::additive: return "AAN";
    case EtsTrend::damped: return "AAdN";
  }
  return "?";
}

EtsState ets_filter(const EtsSpec& spec, std::span<const double> y, std::vector<double>* residuals) {
  const double phi = spec.trend == EtsTrend::damped ? spec.theta4 : 1.0;
  const bool trended = spec.trend != EtsTrend::none;
  EtsState s{spec.level0, trended ? spec.trend0 : 0.0};
  if (residuals) residuals->resize(y.size());
  for (std::size_t t = 0; t < y.size(); ++t) {
    const double damped = trended ? phi * s.trend : 0.0;
    const double e = y[t] - (s.level + damped);
    s.level = s.level + damped + spec.theta1 * e;
    if (trended) s.trend = damped + spec.theta2 * e;
    if (residuals) (*residuals)[t] = e;
  }
  return s;
}

ForecastMoments ets_forecast_moments(const EtsSpec& spec, const EtsState& origin, int horizon) {
  if (horizon < 1) throw InvalidInput("forecast horizon must be at least 1");
  ForecastMoments m;
  double c2 = 0.0;
  switch (spec.trend) {
    case EtsTrend::none:
      m.mean = origin.level;
      c2 = (horizon - 1) * spec.theta1 * spec.theta1;
      break;
    case EtsTrend::additive:
      m.mean = origin.level + horizon * origin.trend;
      for (int j = 1; j < horizon; ++j) {
        const double c = spec.theta1 + spec.theta2 * j;
        c2 += c * c;
      }
      break;
    case EtsTrend::damped:
      m.mean = origin.level + damped_sum(spec.theta4, horizon) * origin.trend;
      for (int j = 1; j < horizon; ++j) {
        const double c = spec.theta1 + spec.theta2 * damped_sum(spec.theta4, j);
        c2 += c * c;
      }
      break;
  }
  m.variance = spec.sigma2 * (1.0 + c2);
  return m;
}

GaussianDist ets_predictive(const EtsSpec& spec, std::span<const double> history, int horizon) {
  const auto m = ets_forecast_moments(spec, ets_filter(spec, history), horizon);
  return GaussianDist(m.mean, std::sqrt(m.variance));
}

EtsSpec ets_fit(const TimeSeries& series, EtsTrend trend, const SimplexOptions& options) {
  const auto y = series.view();
  const std::size_t n = y.size();
  if (n < 8) throw InvalidInput("ETS fitting requires at least 8 observations");
  const double sd = std::sqrt(variance(y));
  const double scale = sd > 0.0 ? sd : 1e-8 * (std::abs(mean(y)) + 1.0);
  const double floor = 1e-12 * scale * scale;

  EtsSpec base;
  base.trend = trend;
  const bool trended = trend != EtsTrend::none;
  const std::size_t k = base.dim();
  const std::size_t take = std::min<std::size_t>(n, 4);
  const double slope0 = (y[take - 1] - y[0]) / static_cast<double>(take - 1);

  // u = [logit theta1, (logit theta2), (damping), level0, (trend0)], states in sd units
  std::vector<double> u0{logit(0.5)};
  if (trended) u0.push_back(logit(0.1));
  if (trend == EtsTrend::damped) u0.push_back(from_interval(0.9, kPhiLo, kPhiHi));
  u0.push_back(0.0);
  if (trended) u0.push_back(slope0 / scale);

  auto decode = [&](std::span<const double> u) {
    EtsSpec s = base;
    s.theta1 = logistic(u[0]);
    if (trended) s.theta2 = logistic(u[1]);
    if (trend == EtsTrend::damped) s.theta4 = to_interval(u[2], kPhiLo, kPhiHi);
    s.level0 = y[0] + scale * u[k];
    s.trend0 = trended ? scale * u[k + 1] : 0.0;
    return s;
  };
  std::vector<double> resid;
  auto mse_of = [&](const EtsSpec& s) {
    ets_filter(s, y, &resid);
    double ss = 0.0;
    for (double e : resid) ss += e * e;
    return std::max(ss / static_cast<double>(n), floor);
  };
  auto objective = [&](std::span<const double> u) { return std::log(mse_of(decode(u))); };

  std::vector<double> best_u;
  try {
    best_u = nelder_mead(objective, u0, options).x;
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(std::string("ETS ") + std::string(to_string(trend)) + ": " + e.what(),
                           e.best_value(), e.best_point());
  }
  EtsSpec s = decode(best_u);
  s.sigma2 = mse_of(s);
  const double dn = static_cast<double>(n);
  s.log_likelihood = -0.5 * dn * (std::log(2.0 * kPi * s.sigma2) + 1.0);
  const double params = static_cast<double>(k + s.state_count() + 1);
  s.aic = -2.0 * s.log_likelihood + 2.0 * params;
  return s;
}

EtsSpec ets_select_and_fit(const TimeSeries& series, const SimplexOptions& options) {
  std::optional<EtsSpec> best;
  std::string failures;
  for (EtsTrend trend : {EtsTrend::none, EtsTrend::additive, EtsTrend::damped}) {
    try {
      EtsSpec s = ets_fit(series, trend, options);
      if (!best || s.aic < best->aic) best = s;
    } catch (const ConvergenceError& e) {
      failures += std::string(e.what()) + "; ";
    }
  }
  if (!best)
    throw ConvergenceError("all ETS fits failed: " + failures,
                           std::numeric_limits<double>::infinity(), {});
  return *best;
}

}  // namespace fbp
