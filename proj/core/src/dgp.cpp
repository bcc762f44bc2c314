#include "fbp/dgp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "fbp/error.hpp"
#include "fbp/numeric.hpp"
#include "fbp/random.hpp"

namespace fbp {

void SvSkewConfig::validate() const {
  if (!(std::abs(a) < 1.0)) throw InvalidParameter("DGP: |a| must be below 1");
  if (!(sigma_h >= 0.0)) throw InvalidParameter("DGP: sigma_h must be nonnegative");
  if (!std::isfinite(h_bar) || !std::isfinite(gamma)) throw InvalidParameter("DGP: h_bar and gamma must be finite");
  if (fz_sample_size < 100'000) throw InvalidParameter("DGP: fz_sample_size must be at least 100000");
}

SvSkewProcess::SvSkewProcess(const SvSkewConfig& config) : config_(config) {
  config_.validate();
  skew_ = skew_normal(config_.gamma);
  Random rng(derive_seed(config_.fz_seed, {hash_tag("fz")}));
  const double sd = stationary_sd();
  std::vector<double> z(config_.fz_sample_size);
  for (auto& v : z) {
    const double h = config_.h_bar + sd * rng.normal();
    v = std::exp(0.5 * h) * rng.normal();
  }
  fz_ = std::make_shared<EmpiricalCdf>(std::move(z));
}

std::shared_ptr<const SvSkewProcess> SvSkewProcess::cached(const SvSkewConfig& c) {
  using Key = std::tuple<double, double, double, double, std::size_t, std::uint64_t>;
  static std::mutex mu;
  static std::map<Key, std::shared_ptr<const SvSkewProcess>> cache;
  const Key key{c.a, c.h_bar, c.sigma_h, c.gamma, c.fz_sample_size, c.fz_seed};
  std::lock_guard lock(mu);
  auto& slot = cache[key];
  if (!slot) slot = std::make_shared<SvSkewProcess>(c);
  return slot;
}

double SvSkewProcess::stationary_sd() const {
  return config_.sigma_h / std::sqrt(1.0 - config_.a * config_.a);
}

double SvSkewProcess::transform(double z) const { return skew_->quantile(fz_->cdf(z)); }

SvSkewPath SvSkewProcess::simulate(std::size_t n, std::uint64_t seed) const {
  if (n < 1) throw InvalidInput("simulate: n must be at least 1");
  Random rng(seed);
  SvSkewPath path;
  path.y.values.resize(n);
  path.h.resize(n);
  double h = config_.h_bar + stationary_sd() * rng.normal();
  for (std::size_t t = 0; t < n; ++t) {
    h = config_.h_bar + config_.a * (h - config_.h_bar) + config_.sigma_h * rng.normal();
    const double z = std::exp(0.5 * h) * rng.normal();
    path.h[t] = h;
    path.y.values[t] = transform(z);
  }
  path.y.name = "y";
  return path;
}

std::vector<double> SvSkewProcess::conditional_sample(double h_n, std::size_t size,
                                                      std::uint64_t seed) const {
  Random rng(seed);
  std::vector<double> out(size);
  const double m = config_.h_bar + config_.a * (h_n - config_.h_bar);
  for (auto& v : out) {
    const double h = m + config_.sigma_h * rng.normal();
    v = transform(std::exp(0.5 * h) * rng.normal());
  }
  return out;
}

double SvSkewProcess::conditional_quantile(double h_n, double p) const {
  if (!(p > 0.0 && p < 1.0)) throw InvalidInput("conditional_quantile: p must lie in (0, 1)");
  const double m = config_.h_bar + config_.a * (h_n - config_.h_bar);
  const double s = config_.sigma_h;
  const auto& gl = gauss_legendre(64);
  auto cdf_z = [&](double q) {
    if (s == 0.0) return normal_cdf(q * std::exp(-0.5 * m));
    double acc = 0.0;
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
      const double u = 8.0 * gl.nodes[k];
      acc += 8.0 * gl.weights[k] * normal_pdf(u) * normal_cdf(q * std::exp(-0.5 * (m + s * u)));
    }
    return acc;
  };
  const double scale = std::exp(0.5 * (m + 8.0 * s));
  const double q = bisect_monotone(cdf_z, p, -40.0 * scale, 40.0 * scale, 1e-12 * scale);
  return transform(q);
}

SvSkewPath simulate_sv_skew(const SvSkewConfig& config, std::size_t n, std::uint64_t seed) {
  return SvSkewProcess::cached(config)->simulate(n, seed);
}

std::vector<double> true_conditional_predictive(const SvSkewConfig& config, double h_n,
                                                std::size_t sample_size, std::uint64_t seed) {
  return SvSkewProcess::cached(config)->conditional_sample(h_n, sample_size, seed);
}

double sample_es(std::vector<double> x, double alpha, Tail tail) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("ES level must lie in (0, 1)");
  std::sort(x.begin(), x.end());
  const double share = tail == Tail::lower ? alpha : 1.0 - alpha;
  const auto k = static_cast<std::size_t>(std::floor(share * static_cast<double>(x.size())));
  if (k == 0) throw NumericalError("ES: tail sample is empty");
  double s = 0.0;
  if (tail == Tail::lower) {
    for (std::size_t i = 0; i < k; ++i) s += x[i];
    return -s / static_cast<double>(k);
  }
  for (std::size_t i = x.size() - k; i < x.size(); ++i) s += x[i];
  return s / static_cast<double>(k);
}

}  // namespace fbp
