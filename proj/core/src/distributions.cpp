#include "fbp/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/special_functions/owens_t.hpp>

#include "fbp/error.hpp"
#include "fbp/numeric.hpp"

namespace fbp {

double Distribution::log_density(double x) const {
  const double d = density(x);
  return d > 0.0 ? std::log(d) : -std::numeric_limits<double>::infinity();
}

// --- GaussianDist ----------------------------------------------------------

GaussianDist::GaussianDist(double mu, double sigma) : mu_(mu), sigma_(sigma) {
  if (!std::isfinite(mu) || !std::isfinite(sigma) || !(sigma > 0.0)) {
    throw InvalidParameter("GaussianDist requires finite mu and sigma > 0");
  }
}

double GaussianDist::density(double x) const { return normal_pdf((x - mu_) / sigma_) / sigma_; }

double GaussianDist::log_density(double x) const {
  return normal_log_pdf((x - mu_) / sigma_) - std::log(sigma_);
}

double GaussianDist::cdf(double x) const { return normal_cdf((x - mu_) / sigma_); }

double GaussianDist::quantile(double p) const { return mu_ + sigma_ * normal_quantile(p); }

double GaussianDist::sample(Random& rng) const { return mu_ + sigma_ * rng.normal(); }

// --- StdSkewNormalDist -----------------------------------------------------

StdSkewNormalDist::StdSkewNormalDist(double gamma) : gamma_(gamma) {
  if (!std::isfinite(gamma)) throw InvalidParameter("skew-normal shape must be finite");
  delta_ = gamma / std::sqrt(1.0 + gamma * gamma);
  mean_raw_ = delta_ * std::sqrt(2.0 / kPi);
  sd_raw_ = std::sqrt(1.0 - 2.0 * delta_ * delta_ / kPi);
}

double StdSkewNormalDist::density(double x) const {
  const double z = mean_raw_ + sd_raw_ * x;
  return sd_raw_ * 2.0 * normal_pdf(z) * normal_cdf(gamma_ * z);
}

double StdSkewNormalDist::log_density(double x) const {
  const double z = mean_raw_ + sd_raw_ * x;
  return std::log(2.0 * sd_raw_) + normal_log_pdf(z) + normal_log_cdf(gamma_ * z);
}

double StdSkewNormalDist::cdf(double x) const {
  const double z = mean_raw_ + sd_raw_ * x;
  if (gamma_ == 0.0) return normal_cdf(z);
  const double v = normal_cdf(z) - 2.0 * boost::math::owens_t(z, gamma_);
  return std::clamp(v, 0.0, 1.0);
}

double StdSkewNormalDist::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw InvalidInput("skew-normal quantile: probability outside [0,1]");
  }
  double lo = -40.0;
  double hi = 40.0;
  double x = std::clamp(normal_quantile(p), lo + 1.0, hi - 1.0);
  for (int iter = 0; iter < 200; ++iter) {
    const double f = cdf(x) - p;
    if (f < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double d = density(x);
    double next = (d > 0.0) ? x - f / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) < 1e-13 * (1.0 + std::abs(x)) || hi - lo < 1e-10) {
      return next;
    }
    x = next;
  }
  return x;
}

double StdSkewNormalDist::sample(Random& rng) const {
  const double u0 = rng.normal();
  const double u1 = rng.normal();
  const double z = delta_ * std::abs(u0) + std::sqrt(1.0 - delta_ * delta_) * u1;
  return (z - mean_raw_) / sd_raw_;
}

// --- EmpiricalCdf ----------------------------------------------------------

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples) : n_(samples.size()) {
  if (samples.size() < 2) throw InvalidInput("empirical_cdf needs at least 2 samples");
  for (double v : samples) {
    if (!std::isfinite(v)) throw InvalidInput("empirical_cdf samples must be finite");
  }
  mean_ = fbp::mean(samples);
  sd_ = std::sqrt(fbp::variance(samples));
  std::sort(samples.begin(), samples.end());
  const double denom = static_cast<double>(n_) + 1.0;
  std::size_t i = 0;
  while (i < n_) {
    std::size_t j = i;
    while (j + 1 < n_ && samples[j + 1] == samples[i]) ++j;
    // positions i+1 .. j+1 share their average
    const double avg_pos = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    values_.push_back(samples[i]);
    probs_.push_back(avg_pos / denom);
    i = j + 1;
  }
}

double EmpiricalCdf::cdf(double x) const {
  const double denom = static_cast<double>(n_) + 1.0;
  if (x < values_.front()) return 1.0 / denom;
  if (x > values_.back()) return static_cast<double>(n_) / denom;
  const auto it = std::lower_bound(values_.begin(), values_.end(), x);
  const auto k = static_cast<std::size_t>(it - values_.begin());
  if (*it == x) return probs_[k];
  const double x0 = values_[k - 1];
  const double x1 = values_[k];
  return probs_[k - 1] + (probs_[k] - probs_[k - 1]) * (x - x0) / (x1 - x0);
}

double EmpiricalCdf::density(double x) const {
  if (values_.size() < 2 || x < values_.front() || x >= values_.back()) return 0.0;
  const auto it = std::upper_bound(values_.begin(), values_.end(), x);
  const auto k = static_cast<std::size_t>(it - values_.begin());
  return (probs_[k] - probs_[k - 1]) / (values_[k] - values_[k - 1]);
}

double EmpiricalCdf::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("empirical quantile: p outside [0,1]");
  if (p <= probs_.front()) return values_.front();
  if (p >= probs_.back()) return values_.back();
  const auto it = std::lower_bound(probs_.begin(), probs_.end(), p);
  const auto k = static_cast<std::size_t>(it - probs_.begin());
  if (*it == p) return values_[k];
  const double p0 = probs_[k - 1];
  const double p1 = probs_[k];
  return values_[k - 1] + (values_[k] - values_[k - 1]) * (p - p0) / (p1 - p0);
}

double EmpiricalCdf::sample(Random& rng) const {
  const double u = rng.uniform();
  return quantile(probs_.front() + u * (probs_.back() - probs_.front()));
}

// --- LocationScaleDist -----------------------------------------------------

LocationScaleDist::LocationScaleDist(double mu, double sigma, DistributionPtr base)
    : mu_(mu), sigma_(sigma), base_(std::move(base)) {
  if (!base_) throw InvalidParameter("LocationScaleDist needs a base distribution");
  if (!std::isfinite(mu) || !std::isfinite(sigma) || !(sigma > 0.0)) {
    throw InvalidParameter("LocationScaleDist requires finite mu and sigma > 0");
  }
}

double LocationScaleDist::density(double x) const {
  return base_->density((x - mu_) / sigma_) / sigma_;
}

double LocationScaleDist::log_density(double x) const {
  return base_->log_density((x - mu_) / sigma_) - std::log(sigma_);
}

double LocationScaleDist::cdf(double x) const { return base_->cdf((x - mu_) / sigma_); }

double LocationScaleDist::quantile(double p) const { return mu_ + sigma_ * base_->quantile(p); }

double LocationScaleDist::sample(Random& rng) const { return mu_ + sigma_ * base_->sample(rng); }

double LocationScaleDist::mean() const { return mu_ + sigma_ * base_->mean(); }

double LocationScaleDist::sd() const { return sigma_ * base_->sd(); }

// --- MixtureDist -----------------------------------------------------------

MixtureDist::MixtureDist(std::vector<double> weights, std::vector<DistributionPtr> components)
    : weights_(std::move(weights)), components_(std::move(components)) {
  if (weights_.empty() || weights_.size() != components_.size()) {
    throw InvalidParameter("mixture needs one weight per component");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i])) {
      throw InvalidParameter("mixture weights must be nonnegative");
    }
    if (!components_[i]) throw InvalidParameter("mixture component is null");
    total += weights_[i];
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidParameter("mixture weights must sum to 1");

  cumulative_.resize(weights_.size());
  std::partial_sum(weights_.begin(), weights_.end(), cumulative_.begin());
  double m = 0.0;
  double second = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const double mu = components_[i]->mean();
    const double s = components_[i]->sd();
    m += weights_[i] * mu;
    second += weights_[i] * (s * s + mu * mu);
  }
  mean_ = m;
  sd_ = std::sqrt(std::max(second - m * m, 0.0));
}

MixtureDist MixtureDist::equally_weighted(std::vector<DistributionPtr> components) {
  if (components.empty()) throw InvalidParameter("mixture needs at least one component");
  const double w = 1.0 / static_cast<double>(components.size());
  std::vector<double> weights(components.size(), w);
  // Absorb rounding so the weights sum to exactly 1 within the 1e-12 check.
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  weights.back() += 1.0 - total;
  return MixtureDist(std::move(weights), std::move(components));
}

double MixtureDist::density(double x) const {
  double d = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) d += weights_[i] * components_[i]->density(x);
  return d;
}

double MixtureDist::log_density(double x) const {
  const double d = density(x);
  if (d > std::numeric_limits<double>::min()) return std::log(d);
  std::vector<double> terms;
  terms.reserve(weights_.size());
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (weights_[i] > 0.0) terms.push_back(std::log(weights_[i]) + components_[i]->log_density(x));
  }
  return log_sum_exp(terms);
}

double MixtureDist::cdf(double x) const {
  double c = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) c += weights_[i] * components_[i]->cdf(x);
  return std::clamp(c, 0.0, 1.0);
}

double MixtureDist::quantile(double p, double tol) const {
  if (!(p > 0.0 && p < 1.0)) throw InvalidInput("mixture quantile: p outside (0,1)");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (weights_[i] == 0.0) continue;
    const double q = components_[i]->quantile(p);
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    throw NumericalError("mixture quantile bracket is not finite");
  }
  if (hi - lo <= tol) return 0.5 * (lo + hi);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double MixtureDist::sample(Random& rng) const {
  const double u = rng.uniform() * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  return components_[static_cast<std::size_t>(it - cumulative_.begin())]->sample(rng);
}

}  // namespace fbp
