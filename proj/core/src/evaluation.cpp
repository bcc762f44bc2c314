#include "fbp/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "fbp/dgp.hpp"
#include "fbp/error.hpp"
#include "fbp/numeric.hpp"
#include "fbp/random.hpp"

namespace fbp {

MeanPredictive::MeanPredictive(std::vector<DistributionPtr> components)
    : mix_(std::make_shared<MixtureDist>(MixtureDist::equally_weighted(std::move(components)))) {}

MeanPredictive mean_predictive(const PosteriorDraws& draws, const PredictiveClass& cls,
                               std::span<const double> history) {
  if (draws.draws.empty()) throw InvalidInput("mean_predictive: no posterior draws");
  std::vector<DistributionPtr> comps;
  comps.reserve(draws.size());
  if (cls.model == ModelClass::mixture) {
    // Every draw shares the two constituents; only the weight varies.
    const auto base = cls.predictive(std::vector<double>{0.5}, history);
    const auto& pool = dynamic_cast<const MixtureDist&>(*base);
    for (const auto& th : draws.draws)
      comps.push_back(std::make_shared<MixtureDist>(
          std::vector<double>{th[0], 1.0 - th[0]}, pool.components()));
  } else {
    for (const auto& th : draws.draws) comps.push_back(cls.predictive(th, history));
  }
  return MeanPredictive(std::move(comps));
}

double mean_predictive_quantile(const MeanPredictive& mp, double p) {
  return mp.mixture().quantile(p, 1e-8);
}

double mean_predictive_es(const MeanPredictive& mp, double alpha, Tail tail,
                          std::size_t mc_draws, std::uint64_t seed) {
  if (mc_draws < 10'000) throw InvalidInput("mean_predictive_es needs at least 10^4 draws");
  Random rng(seed);
  std::vector<double> x(mc_draws);
  for (auto& v : x) v = mp.mixture().sample(rng);
  return sample_es(std::move(x), alpha, tail);
}

std::vector<double> es_posterior_distribution(const PosteriorDraws& draws,
                                              const PredictiveClass& cls,
                                              std::span<const double> history, double alpha,
                                              Tail tail, std::uint64_t seed) {
  std::vector<double> out;
  out.reserve(draws.size());
  std::uint64_t j = 0;
  for (const auto& th : draws.draws) {
    const auto pred = cls.predictive(th, history);
    if (auto g = dynamic_cast<const GaussianDist*>(pred.get())) {
      out.push_back(gaussian_es(g->mu(), g->sigma(), alpha, tail));
    } else {
      Random rng(derive_seed(seed, {j}));
      std::vector<double> x(10'000);
      for (auto& v : x) v = pred->sample(rng);
      out.push_back(sample_es(std::move(x), alpha, tail));
    }
    ++j;
  }
  return out;
}

ExceedanceRecord make_exceedances(std::span<const double> var, std::span<const double> actuals,
                                  double alpha, Tail tail) {
  if (var.size() != actuals.size()) throw InvalidInput("VaR forecasts and actuals must be aligned");
  ExceedanceRecord r;
  r.alpha = alpha;
  r.tail = tail;
  r.hits.resize(var.size());
  for (std::size_t t = 0; t < var.size(); ++t)
    r.hits[t] = tail == Tail::lower ? actuals[t] < var[t] : actuals[t] > var[t];
  return r;
}

double var_exceedance(const ExceedanceRecord& record) {
  if (record.hits.empty()) throw InvalidInput("empty exceedance record");
  double s = 0.0;
  for (int h : record.hits) s += h;
  return s / static_cast<double>(record.hits.size());
}

namespace {

// n ln p with 0 ln 0 = 0.
double xlogy(double n, double p) { return n == 0.0 ? 0.0 : n * std::log(p); }

}  // namespace

ChristoffersenResult christoffersen_test(const ExceedanceRecord& record) {
  const auto& h = record.hits;
  if (h.size() < 20) throw InvalidInput("Christoffersen test needs at least 20 observations");
  const double p = record.hit_probability();
  const double total = static_cast<double>(h.size());
  double n1 = 0.0;
  for (int v : h) n1 += v;
  const double n0 = total - n1;
  const double phat = n1 / total;
  ChristoffersenResult r;
  r.lr_uc = -2.0 * ((xlogy(n0, 1.0 - p) + xlogy(n1, p)) - (xlogy(n0, 1.0 - phat) + xlogy(n1, phat)));

  double n00 = 0, n01 = 0, n10 = 0, n11 = 0;
  for (std::size_t t = 1; t < h.size(); ++t) {
    if (h[t - 1] == 0) (h[t] ? n01 : n00) += 1.0;
    else (h[t] ? n11 : n10) += 1.0;
  }
  const double pi01 = n00 + n01 > 0 ? n01 / (n00 + n01) : 0.0;
  const double pi11 = n10 + n11 > 0 ? n11 / (n10 + n11) : 0.0;
  const double pi = (n01 + n11) / (n00 + n01 + n10 + n11);
  const double l1 = xlogy(n00, 1.0 - pi01) + xlogy(n01, pi01) + xlogy(n10, 1.0 - pi11) + xlogy(n11, pi11);
  const double l0 = xlogy(n00 + n10, 1.0 - pi) + xlogy(n01 + n11, pi);
  r.lr_ind = std::max(0.0, 2.0 * (l1 - l0));
  r.lr_cc = r.lr_uc + r.lr_ind;
  r.reject_1pct = r.lr_cc > kChiSquare2Crit1pct;
  return r;
}

double es_consistent_score(double var, double es, double y, double alpha, double eta) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("ES score: alpha must lie in (0, 1)");
  double f = 0.0;
  if (eta <= es) f -= (1.0 / alpha) * (y <= var ? var - y : 0.0) - (var - eta);
  if (eta <= y) f -= y - eta;
  return f;
}

std::vector<double> default_eta_grid(std::span<const double> actuals, std::size_t points) {
  if (actuals.empty()) throw InvalidInput("eta grid needs actuals");
  if (points < 2) throw InvalidInput("eta grid needs at least 2 points");
  const auto [mn, mx] = std::minmax_element(actuals.begin(), actuals.end());
  const double sd = actuals.size() > 1 ? std::sqrt(variance(actuals)) : 1.0;
  const double lo = *mn - sd;
  const double hi = *mx + sd;
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i)
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  return g;
}

namespace {

struct BlockPlan {
  std::size_t length = 0;
  std::size_t blocks = 0;
  std::vector<std::size_t> starts;  // replications x blocks
};

BlockPlan plan_blocks(std::size_t n, std::size_t b, std::size_t reps, std::uint64_t seed) {
  if (b < 1 || n < b) throw InvalidInput("block bootstrap needs 1 <= block length <= series length");
  if (reps < 1) throw InvalidInput("block bootstrap needs at least one replication");
  BlockPlan plan;
  plan.length = n;
  plan.blocks = (n + b - 1) / b;
  plan.starts.resize(reps * plan.blocks);
  Random rng(seed);
  for (auto& s : plan.starts) s = rng.index(n - b + 1);
  return plan;
}

Interval percentile_interval(const BlockPlan& plan, std::size_t b, std::span<const double> x,
                             double level) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidInput("bootstrap level must lie in (0, 1)");
  std::vector<double> prefix(x.size() + 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) prefix[i + 1] = prefix[i] + x[i];
  const std::size_t reps = plan.starts.size() / plan.blocks;
  std::vector<double> means(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    double s = 0.0;
    std::size_t left = plan.length;
    for (std::size_t k = 0; k < plan.blocks; ++k) {
      const std::size_t start = plan.starts[r * plan.blocks + k];
      const std::size_t len = std::min(b, left);
      s += prefix[start + len] - prefix[start];
      left -= len;
    }
    means[r] = s / static_cast<double>(plan.length);
  }
  std::sort(means.begin(), means.end());
  return {quantile_sorted(means, 0.5 * (1.0 - level)), quantile_sorted(means, 0.5 * (1.0 + level))};
}

}  // namespace

Interval block_bootstrap_ci(std::span<const double> series, std::size_t block_length,
                            std::size_t replications, double level, std::uint64_t seed) {
  const auto plan = plan_blocks(series.size(), block_length, replications, seed);
  return percentile_interval(plan, block_length, series, level);
}

MurphyGrid murphy_diagram(const TailForecasts& a, const TailForecasts& b,
                          std::span<const double> actuals, double alpha, Tail tail,
                          std::span<const double> eta_grid, const BootstrapSettings& bootstrap) {
  const std::size_t n = actuals.size();
  if (n == 0) throw InvalidInput("murphy_diagram: no actuals");
  if (a.var.size() != n || a.es.size() != n || b.var.size() != n || b.es.size() != n)
    throw InvalidInput("murphy_diagram: forecast series and actuals must have equal length");
  if (eta_grid.empty()) throw InvalidInput("murphy_diagram: empty eta grid");
  if (!std::is_sorted(eta_grid.begin(), eta_grid.end()))
    throw InvalidInput("murphy_diagram: eta grid must be ascending");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("murphy_diagram: alpha must lie in (0, 1)");

  // Reported ES is the negated lower-tail mean; the upper tail is mapped onto
  // the lower tail of -y.
  const double sign = tail == Tail::lower ? 1.0 : -1.0;
  const double level = tail == Tail::lower ? alpha : 1.0 - alpha;
  const bool bands = n >= bootstrap.block_length && bootstrap.replications > 0;
  BlockPlan plan;
  if (bands) plan = plan_blocks(n, bootstrap.block_length, bootstrap.replications, bootstrap.seed);

  MurphyGrid g;
  g.eta.assign(eta_grid.begin(), eta_grid.end());
  std::vector<double> diff(n);
  for (double eta : eta_grid) {
    const double e = sign * eta;
    double s = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double y = sign * actuals[t];
      const double fa = es_consistent_score(sign * a.var[t], -a.es[t], y, level, e);
      const double fb = es_consistent_score(sign * b.var[t], -b.es[t], y, level, e);
      diff[t] = fa - fb;
      s += diff[t];
    }
    const double d = s / static_cast<double>(n);
    g.delta.push_back(d);
    if (bands) {
      const auto ci = percentile_interval(plan, bootstrap.block_length, diff, bootstrap.level);
      g.lower.push_back(ci.lower);
      g.upper.push_back(ci.upper);
    } else {
      g.lower.push_back(d);
      g.upper.push_back(d);
    }
  }
  return g;
}

DensityGrid kernel_density(std::span<const double> values, std::size_t points) {
  if (values.empty()) throw InvalidInput("kernel_density: no values");
  if (points < 2) throw InvalidInput("kernel_density: need at least 2 grid points");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  const double sd = v.size() > 1 ? std::sqrt(variance(v)) : 0.0;
  const double iqr = v.size() > 1 ? quantile_sorted(v, 0.75) - quantile_sorted(v, 0.25) : 0.0;
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = sd > 0.0 ? sd : 1e-3 * (std::abs(v.front()) + 1.0);
  const double bw = 0.9 * spread * std::pow(n, -0.2);
  DensityGrid g;
  const double lo = v.front() - 3.0 * bw;
  const double hi = v.back() + 3.0 * bw;
  for (std::size_t i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    double s = 0.0;
    for (double xi : v) s += normal_pdf((x - xi) / bw);
    g.x.push_back(x);
    g.density.push_back(s / (n * bw));
  }
  return g;
}

}  // namespace fbp
