#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "fbp/distributions.hpp"
#include "fbp/models.hpp"
#include "fbp/series.hpp"

namespace fbp {

// Latent AR(1) log-variance h_t, z_t = exp(h_t / 2) eps_t, and
// y_t = D^{-1}(F_z(z_t)) with D the standardized skew-normal and F_z the
// simulated marginal of z.
struct SvSkewConfig {
  double a = 0.9;
  double h_bar = -0.4581;
  double sigma_h = 0.4173;
  double gamma = -5.0;
  std::size_t fz_sample_size = 1'000'000;
  std::uint64_t fz_seed = 0x5eed5eedULL;

  void validate() const;
};

struct SvSkewPath {
  TimeSeries y;
  std::vector<double> h;  // h_1..h_n
};

class SvSkewProcess {
 public:
  explicit SvSkewProcess(const SvSkewConfig& config);

  // Shared instance per configuration; building F_z is the expensive part.
  static std::shared_ptr<const SvSkewProcess> cached(const SvSkewConfig& config);

  const SvSkewConfig& config() const noexcept { return config_; }
  const EmpiricalCdf& fz() const noexcept { return *fz_; }
  const StdSkewNormalDist& skew() const noexcept { return *skew_; }

  // y = D^{-1}(F_z(z)).
  double transform(double z) const;
  SvSkewPath simulate(std::size_t n, std::uint64_t seed) const;
  // Draws of y_{n+1} given h_n.
  std::vector<double> conditional_sample(double h_n, std::size_t size, std::uint64_t seed) const;
  // p-quantile of y_{n+1} given h_n: the z quantile solves
  // E[Phi(q exp(-h/2))] = p over h | h_n, then maps through the transform.
  double conditional_quantile(double h_n, double p) const;
  // Stationary law of h: N(h_bar, sigma_h^2 / (1 - a^2)).
  double stationary_sd() const;

 private:
  SvSkewConfig config_;
  std::shared_ptr<const EmpiricalCdf> fz_;
  std::shared_ptr<const StdSkewNormalDist> skew_;
};

SvSkewPath simulate_sv_skew(const SvSkewConfig& config, std::size_t n, std::uint64_t seed);

std::vector<double> true_conditional_predictive(const SvSkewConfig& config, double h_n,
                                                std::size_t sample_size, std::uint64_t seed);

// ES of a sample under the reporting conventions of gaussian_es.
double sample_es(std::vector<double> sample, double alpha, Tail tail);

}  // namespace fbp
