#include "fbp/models.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>

#include "fbp/error.hpp"
#include "fbp/numeric.hpp"

namespace fbp {

std::string_view to_string(ModelClass model) {
  switch (model) {
    case ModelClass::arch1: return "arch1";
    case ModelClass::garch11: return "garch11";
    case ModelClass::skew_arch1: return "skew_arch1";
    case ModelClass::mixture: return "mixture";
    case ModelClass::ets: return "ets";
  }
  return "?";
}

ModelClass parse_model_class(std::string_view name) {
  if (name == "arch1" || name == "arch") return ModelClass::arch1;
  if (name == "garch11" || name == "garch") return ModelClass::garch11;
  if (name == "skew_arch1") return ModelClass::skew_arch1;
  if (name == "mixture") return ModelClass::mixture;
  if (name == "ets") return ModelClass::ets;
  throw InvalidInput("unknown model class: " + std::string(name));
}

std::string_view to_string(Tail tail) { return tail == Tail::lower ? "lower" : "upper"; }

void ArchParams::validate() const {
  if (!std::isfinite(theta1) || !(theta2 > 0.0) || !std::isfinite(theta2) || !(theta3 >= 0.0) ||
      !(theta3 < 1.0))
    throw InvalidParameter("ARCH(1) parameters require theta2 > 0 and theta3 in [0, 1)");
}

void GarchParams::validate() const {
  if (!std::isfinite(theta1) || !(theta2 > 0.0) || !std::isfinite(theta2) || !(theta3 >= 0.0) ||
      !(theta3 < 1.0) || !(theta4 >= 0.0) || !(theta4 < 1.0) || !(theta3 + theta4 < 1.0))
    throw InvalidParameter(
        "GARCH(1,1) parameters require theta2 > 0, theta3, theta4 in [0, 1), theta3 + theta4 < 1");
}

void SkewArchParams::validate() const {
  ArchParams{theta1, theta2, theta3}.validate();
  if (!std::isfinite(gamma)) throw InvalidParameter("skew shape must be finite");
}

GaussianDist arch1_predictive(const ArchParams& params, double y_prev) {
  params.validate();
  const double d = y_prev - params.theta1;
  return GaussianDist(params.theta1, std::sqrt(params.theta2 + params.theta3 * d * d));
}

std::vector<double> garch11_filter(const GarchParams& params, std::span<const double> y,
                                   double sigma2_init) {
  params.validate();
  if (!(sigma2_init > 0.0) || !std::isfinite(sigma2_init))
    throw InvalidInput("garch11_filter: sigma2_init must be positive");
  std::vector<double> s2(y.size() + 1);
  s2[0] = sigma2_init;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const double d = y[t] - params.theta1;
    s2[t + 1] = params.theta2 + params.theta3 * d * d + params.theta4 * s2[t];
  }
  return s2;
}

std::shared_ptr<const StdSkewNormalDist> skew_normal(double gamma) {
  static std::mutex mu;
  static std::map<double, std::shared_ptr<const StdSkewNormalDist>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[gamma];
  if (!slot) slot = std::make_shared<StdSkewNormalDist>(gamma);
  return slot;
}

LocationScaleDist skew_arch_predictive(const SkewArchParams& params, double y_prev) {
  params.validate();
  const double d = y_prev - params.theta1;
  return LocationScaleDist(params.theta1, std::sqrt(params.theta2 + params.theta3 * d * d),
                           skew_normal(params.gamma));
}

namespace {

double window_variance(std::span<const double> history) {
  if (history.size() < 2) throw InvalidInput("conditioning window needs at least 2 observations");
  const double v = variance(history);
  if (!(v > 0.0)) throw InvalidInput("conditioning window has zero variance");
  return v;
}

}  // namespace

MixtureDist mixture_predictive(const MixtureWeight& weight, std::span<const double> history) {
  if (!(weight.theta1 >= 0.0 && weight.theta1 <= 1.0))
    throw InvalidParameter("mixture weight must lie in [0, 1]");
  if (history.empty()) throw InvalidInput("mixture_predictive: empty history");
  auto p1 = std::make_shared<LocationScaleDist>(
      skew_arch_predictive(weight.constituents.psi1, history.back()));
  const auto s2 = garch11_filter(weight.constituents.psi2, history, window_variance(history));
  auto p2 = std::make_shared<GaussianDist>(weight.constituents.psi2.theta1, std::sqrt(s2.back()));
  return MixtureDist({weight.theta1, 1.0 - weight.theta1}, {p1, p2});
}

// --- likelihoods -------------------------------------------------------------

double arch1_log_likelihood(const ArchParams& p, std::span<const double> y) {
  double ll = 0.0;
  for (std::size_t t = 1; t < y.size(); ++t) {
    const double d = y[t - 1] - p.theta1;
    const double s2 = p.theta2 + p.theta3 * d * d;
    const double e = y[t] - p.theta1;
    ll += -kLogSqrt2Pi - 0.5 * std::log(s2) - 0.5 * e * e / s2;
  }
  return ll;
}

double garch11_log_likelihood(const GarchParams& p, std::span<const double> y) {
  double s2 = window_variance(y);
  double ll = 0.0;
  for (std::size_t t = 1; t < y.size(); ++t) {
    const double d = y[t - 1] - p.theta1;
    s2 = p.theta2 + p.theta3 * d * d + p.theta4 * s2;
    const double e = y[t] - p.theta1;
    ll += -kLogSqrt2Pi - 0.5 * std::log(s2) - 0.5 * e * e / s2;
  }
  return ll;
}

double skew_arch1_log_likelihood(const SkewArchParams& p, std::span<const double> y) {
  const auto base = skew_normal(p.gamma);
  double ll = 0.0;
  for (std::size_t t = 1; t < y.size(); ++t) {
    const double d = y[t - 1] - p.theta1;
    const double s = std::sqrt(p.theta2 + p.theta3 * d * d);
    ll += base->log_density((y[t] - p.theta1) / s) - std::log(s);
  }
  return ll;
}

// --- MLE -----------------------------------------------------------------------

namespace {

constexpr double kBoundaryTol = 1e-6;
constexpr double kGammaBound = 50.0;

struct Reparam {
  std::vector<double> u0;
  std::function<std::vector<double>(std::span<const double>)> to_theta;
  std::function<double(std::span<const double>)> loglik;
};

Reparam make_reparam(ModelClass model, std::span<const double> y) {
  const double m = mean(y);
  const double v = variance(y);
  Reparam r;
  switch (model) {
    case ModelClass::arch1:
      r.u0 = {m, std::log(0.8 * v), logit(0.2)};
      r.to_theta = [](std::span<const double> u) {
        return std::vector<double>{u[0], std::exp(u[1]), logistic(u[2])};
      };
      r.loglik = [y](std::span<const double> th) {
        return arch1_log_likelihood({th[0], th[1], th[2]}, y);
      };
      break;
    case ModelClass::garch11:
      // theta3 = persistence * share, theta4 = persistence * (1 - share).
      r.u0 = {m, std::log(0.1 * v), logit(0.9), logit(0.1 / 0.9)};
      r.to_theta = [](std::span<const double> u) {
        const double pers = logistic(u[2]);
        const double share = logistic(u[3]);
        return std::vector<double>{u[0], std::exp(u[1]), pers * share, pers * (1.0 - share)};
      };
      r.loglik = [y](std::span<const double> th) {
        return garch11_log_likelihood({th[0], th[1], th[2], th[3]}, y);
      };
      break;
    case ModelClass::skew_arch1:
      r.u0 = {m, std::log(0.8 * v), logit(0.2), from_interval(-1.0, -kGammaBound, kGammaBound)};
      r.to_theta = [](std::span<const double> u) {
        return std::vector<double>{u[0], std::exp(u[1]), logistic(u[2]),
                                   to_interval(u[3], -kGammaBound, kGammaBound)};
      };
      r.loglik = [y](std::span<const double> th) {
        return skew_arch1_log_likelihood({th[0], th[1], th[2], th[3]}, y);
      };
      break;
    default:
      throw InvalidInput("fit_mle supports arch1, garch11 and skew_arch1");
  }
  return r;
}

std::vector<std::string> names_for(ModelClass model) {
  switch (model) {
    case ModelClass::arch1: return {"theta1", "theta2", "theta3"};
    case ModelClass::garch11: return {"theta1", "theta2", "theta3", "theta4"};
    case ModelClass::skew_arch1: return {"theta1", "theta2", "theta3", "gamma"};
    case ModelClass::mixture: return {"theta1"};
    case ModelClass::ets: return {};
  }
  return {};
}

}  // namespace

FittedModel fit_mle(ModelClass model, const TimeSeries& series, const SimplexOptions& options) {
  const auto y = series.view();
  if (y.size() < 30) throw InvalidInput("fit_mle requires at least 30 observations");
  if (!(variance(y) > 0.0))
    throw ConvergenceError("fit_mle: constant series has no interior likelihood maximum",
                           std::numeric_limits<double>::infinity(), {});
  Reparam r = make_reparam(model, y);
  auto objective = [&](std::span<const double> u) { return -r.loglik(r.to_theta(u)); };

  SimplexResult res;
  try {
    res = nelder_mead(objective, r.u0, options);
  } catch (const ConvergenceError& e) {
    const auto& bp = e.best_point();
    throw ConvergenceError(e.what(), -e.best_value(),
                           bp.empty() ? std::vector<double>{} : r.to_theta(bp));
  }

  FittedModel fit;
  fit.model = model;
  fit.names = names_for(model);
  fit.theta = r.to_theta(res.x);
  fit.log_likelihood = -res.value;
  fit.iterations = res.iterations;
  const auto& th = fit.theta;
  fit.boundary = th[2] < kBoundaryTol || th[2] > 1.0 - kBoundaryTol;
  if (model == ModelClass::garch11)
    fit.boundary = fit.boundary || th[3] < kBoundaryTol || th[2] + th[3] > 1.0 - kBoundaryTol;
  return fit;
}

MixtureConstituents fit_mixture_constituents(const TimeSeries& series,
                                             const SimplexOptions& options) {
  const auto a = fit_mle(ModelClass::skew_arch1, series, options).theta;
  const auto g = fit_mle(ModelClass::garch11, series, options).theta;
  return {{a[0], a[1], a[2], a[3]}, {g[0], g[1], g[2], g[3]}};
}

// --- expected shortfall ------------------------------------------------------

double gaussian_es(double mu, double sigma, double alpha, Tail tail) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("gaussian_es: alpha must lie in (0, 1)");
  if (!(sigma > 0.0)) throw InvalidInput("gaussian_es: sigma must be positive");
  const double phi = normal_pdf(normal_quantile(alpha));
  if (tail == Tail::lower) return -(mu - sigma * phi / alpha);
  return mu + sigma * phi / (1.0 - alpha);
}

// --- predictive classes ------------------------------------------------------

PredictiveClass PredictiveClass::arch1() { return {ModelClass::arch1, std::nullopt, std::nullopt}; }

PredictiveClass PredictiveClass::garch11() {
  return {ModelClass::garch11, std::nullopt, std::nullopt};
}

PredictiveClass PredictiveClass::linear_pool(MixtureConstituents constituents) {
  constituents.psi1.validate();
  constituents.psi2.validate();
  return {ModelClass::mixture, constituents, std::nullopt};
}

PredictiveClass PredictiveClass::exponential_smoothing(EtsSpec spec) {
  spec.validate();
  return {ModelClass::ets, std::nullopt, spec};
}

std::size_t PredictiveClass::dim() const {
  switch (model) {
    case ModelClass::arch1: return 3;
    case ModelClass::garch11: return 4;
    case ModelClass::mixture: return 1;
    case ModelClass::ets: return ets->dim();
    case ModelClass::skew_arch1: break;
  }
  throw InvalidInput("skew_arch1 is a mixture constituent, not a predictive class");
}

std::vector<std::string> PredictiveClass::param_names() const {
  if (model == ModelClass::ets) return ets->smoothing_names();
  return names_for(model);
}

bool PredictiveClass::in_support(std::span<const double> th) const {
  if (th.size() != dim()) return false;
  for (double v : th)
    if (!std::isfinite(v)) return false;
  switch (model) {
    case ModelClass::arch1:
      return th[1] > 0.0 && th[2] >= 0.0 && th[2] < 1.0;
    case ModelClass::garch11:
      return th[1] > 0.0 && th[2] >= 0.0 && th[3] >= 0.0 && th[2] + th[3] < 1.0;
    case ModelClass::mixture:
      return th[0] > 0.0 && th[0] < 1.0;
    case ModelClass::ets: {
      for (std::size_t i = 0; i < th.size(); ++i) {
        const bool damping = ets->trend == EtsTrend::damped && i == 2;
        const double lo = damping ? 0.8 : 0.0;
        const double hi = damping ? 0.98 : 1.0;
        if (!(th[i] > lo && th[i] < hi)) return false;
      }
      return true;
    }
    case ModelClass::skew_arch1: break;
  }
  return false;
}

DistributionPtr PredictiveClass::predictive(std::span<const double> th,
                                            std::span<const double> history) const {
  if (!in_support(th)) throw InvalidParameter("parameter vector outside the class support");
  if (history.empty()) throw InvalidInput("predictive: empty history");
  switch (model) {
    case ModelClass::arch1:
      return std::make_shared<GaussianDist>(arch1_predictive({th[0], th[1], th[2]}, history.back()));
    case ModelClass::garch11: {
      const auto s2 =
          garch11_filter({th[0], th[1], th[2], th[3]}, history, window_variance(history));
      return std::make_shared<GaussianDist>(th[0], std::sqrt(s2.back()));
    }
    case ModelClass::mixture:
      return std::make_shared<MixtureDist>(mixture_predictive({th[0], *mixture}, history));
    case ModelClass::ets:
      return std::make_shared<GaussianDist>(ets_predictive(ets->with_smoothing(th), history, 1));
    case ModelClass::skew_arch1: break;
  }
  throw InvalidInput("unsupported predictive class");
}

}  // namespace fbp
