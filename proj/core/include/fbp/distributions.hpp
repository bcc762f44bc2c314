#pragma once

#include <memory>
#include <span>
#include <vector>

#include "fbp/random.hpp"

namespace fbp {

// Contract shared by every predictive distribution: density, CDF, quantile and
// sampling. Implementations are immutable once constructed.
class Distribution {
 public:
  virtual ~Distribution() = default;

  virtual double density(double x) const = 0;
  virtual double log_density(double x) const;
  virtual double cdf(double x) const = 0;
  virtual double quantile(double p) const = 0;
  virtual double sample(Random& rng) const = 0;
  virtual double mean() const = 0;
  virtual double sd() const = 0;
};

using DistributionPtr = std::shared_ptr<const Distribution>;

class GaussianDist final : public Distribution {
 public:
  GaussianDist(double mu, double sigma);

  double mu() const noexcept { return mu_; }
  double sigma() const noexcept { return sigma_; }

  double density(double x) const override;
  double log_density(double x) const override;
  double cdf(double x) const override;
  double quantile(double p) const override;
  double sample(Random& rng) const override;
  double mean() const override { return mu_; }
  double sd() const override { return sigma_; }

 private:
  double mu_;
  double sigma_;
};

// Azzalini skew-normal with shape gamma, shifted and scaled to zero mean and
// unit variance. gamma = 0 is the standard normal.
class StdSkewNormalDist final : public Distribution {
 public:
  explicit StdSkewNormalDist(double gamma);

  double gamma() const noexcept { return gamma_; }
  double delta() const noexcept { return delta_; }
  double mean_raw() const noexcept { return mean_raw_; }
  double sd_raw() const noexcept { return sd_raw_; }

  double density(double x) const override;
  double log_density(double x) const override;
  double cdf(double x) const override;
  // Safeguarded Newton iteration on the CDF, bracketed, tolerance 1e-10.
  double quantile(double p) const override;
  double sample(Random& rng) const override;
  double mean() const override { return 0.0; }
  double sd() const override { return 1.0; }

 private:
  double gamma_;
  double delta_;
  double mean_raw_;
  double sd_raw_;
};

// Piecewise-linear CDF through plotting positions i/(N+1) of the order
// statistics, tied values sharing the average of their positions. Outside the
// sample range the CDF is clamped to the first/last knot.
class EmpiricalCdf final : public Distribution {
 public:
  explicit EmpiricalCdf(std::vector<double> samples);

  std::size_t sample_size() const noexcept { return n_; }
  std::span<const double> knots() const noexcept { return values_; }
  std::span<const double> knot_probabilities() const noexcept { return probs_; }

  double density(double x) const override;
  double cdf(double x) const override;
  double quantile(double p) const override;
  double sample(Random& rng) const override;
  double mean() const override { return mean_; }
  double sd() const override { return sd_; }

 private:
  std::size_t n_;
  std::vector<double> values_;  // distinct order statistics
  std::vector<double> probs_;   // plotting position of each distinct value
  double mean_;
  double sd_;
};

// mu + sigma * X for a base distribution X.
class LocationScaleDist final : public Distribution {
 public:
  LocationScaleDist(double mu, double sigma, DistributionPtr base);

  double location() const noexcept { return mu_; }
  double scale() const noexcept { return sigma_; }
  const Distribution& base() const noexcept { return *base_; }

  double density(double x) const override;
  double log_density(double x) const override;
  double cdf(double x) const override;
  double quantile(double p) const override;
  double sample(Random& rng) const override;
  double mean() const override;
  double sd() const override;

 private:
  double mu_;
  double sigma_;
  DistributionPtr base_;
};

class MixtureDist final : public Distribution {
 public:
  MixtureDist(std::vector<double> weights, std::vector<DistributionPtr> components);

  // Equal weights 1/M.
  static MixtureDist equally_weighted(std::vector<DistributionPtr> components);

  std::span<const double> weights() const noexcept { return weights_; }
  const std::vector<DistributionPtr>& components() const noexcept { return components_; }

  double density(double x) const override;
  double log_density(double x) const override;
  double cdf(double x) const override;
  // Bisection on the mixture CDF to `tol`, bracketed by the extreme component
  // quantiles at the same level.
  double quantile(double p) const override { return quantile(p, 1e-10); }
  double quantile(double p, double tol) const;
  double sample(Random& rng) const override;
  double mean() const override { return mean_; }
  double sd() const override { return sd_; }

 private:
  std::vector<double> weights_;
  std::vector<DistributionPtr> components_;
  std::vector<double> cumulative_;
  double mean_;
  double sd_;
};

}  // namespace fbp
