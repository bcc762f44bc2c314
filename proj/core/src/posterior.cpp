#include "fbp/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "fbp/error.hpp"
#include "fbp/numeric.hpp"
#include "fbp/random.hpp"

namespace fbp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kMaxProposalTries = 1000;

// ln(Phi(b) - Phi(a)) for a < b.
double log_normal_mass(double a, double b) {
  if (!(b > a)) return kNegInf;
  if (a > 0.0) return std::log(normal_cdf(-a) - normal_cdf(-b));
  return std::log(normal_cdf(b) - normal_cdf(a));
}

// Proposal mass of N(c, s^2) on (lo, hi).
double log_box_mass(double c, double s, double lo, double hi) {
  return log_normal_mass((lo - c) / s, (hi - c) / s);
}

// Mass of the bivariate proposal N(c3, s3^2) x N(c4, s4^2) on the triangle
// x >= 0, z >= 0, x + z < 1.
double log_triangle_mass(double c3, double s3, double c4, double s4) {
  const double lo = std::max(0.0, c3 - 8.5 * s3);
  const double hi = std::min(1.0, c3 + 8.5 * s3);
  if (!(hi > lo)) return kNegInf;
  const auto& gl = gauss_legendre(16);
  constexpr int panels = 8;
  const double width = (hi - lo) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + width * p;
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
      const double x = a + 0.5 * width * (gl.nodes[k] + 1.0);
      const double inner = normal_cdf((1.0 - x - c4) / s4) - normal_cdf(-c4 / s4);
      total += 0.5 * width * gl.weights[k] * normal_pdf((x - c3) / s3) / s3 * inner;
    }
  }
  return total > 0.0 ? std::log(total) : kNegInf;
}

struct Chain {
  std::size_t dim = 0;
  bool shared_step = false;  // one joint block with a single step size
  std::function<double(std::span<const double>)> log_target;
  std::function<bool(std::span<const double>)> in_support;
  std::function<double(std::span<const std::size_t>, std::span<const double>,
                       std::span<const double>)>
      log_mass;
};

PosteriorDraws run_chain(const Chain& chain, std::vector<double> theta, std::vector<double> steps,
                         const ChainSettings& settings, std::uint64_t seed) {
  Random rng(seed);
  const std::size_t d = chain.dim;
  double lp = chain.log_target(theta);
  if (!std::isfinite(lp)) throw SamplerFailure("chain start has zero posterior density");

  PosteriorDraws out;
  out.chain_length = settings.burn_in + settings.iterations;
  out.burn_in = settings.burn_in;
  out.thin = settings.thin;
  out.seed = seed;
  out.draws.reserve(settings.retained());

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> window_prop(d, 0), window_acc(d, 0);
  long total_acc = 0, post_prop = 0, post_acc = 0;
  std::vector<double> prop(theta);

  auto update_block = [&](std::span<const std::size_t> block) -> bool {
    bool inside = false;
    for (int tries = 0; tries < kMaxProposalTries && !inside; ++tries) {
      prop = theta;
      for (std::size_t i : block) prop[i] = theta[i] + steps[i] * rng.normal();
      inside = chain.in_support(prop);
    }
    if (!inside) return false;
    const double lp_prop = chain.log_target(prop);
    if (!std::isfinite(lp_prop)) return false;
    const double log_ratio = lp_prop - lp + chain.log_mass(block, theta, steps) -
                             chain.log_mass(block, prop, steps);
    if (std::log(rng.uniform()) < log_ratio) {
      theta = prop;
      lp = lp_prop;
      return true;
    }
    return false;
  };

  const int total = settings.burn_in + settings.iterations;
  std::vector<std::size_t> block;
  for (int it = 0; it < total; ++it) {
    const bool burning = it < settings.burn_in;
    std::vector<std::vector<std::size_t>> blocks;
    if (chain.shared_step || d == 1) {
      blocks.push_back(order);
    } else {
      for (std::size_t i = d; i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
      for (std::size_t i = 0; i < d; i += 2)
        blocks.emplace_back(order.begin() + static_cast<long>(i),
                            order.begin() + static_cast<long>(std::min(d, i + 2)));
    }
    for (const auto& b : blocks) {
      const bool accepted = update_block(b);
      total_acc += accepted;
      for (std::size_t i : b) {
        ++window_prop[i];
        window_acc[i] += accepted;
      }
      if (!burning) {
        ++post_prop;
        post_acc += accepted;
      }
    }
    if (burning && (it + 1) % settings.adapt_interval == 0) {
      for (std::size_t i = 0; i < d; ++i) {
        if (window_prop[i] == 0) continue;
        const double rate = static_cast<double>(window_acc[i]) / window_prop[i];
        if (rate > settings.accept_high) steps[i] *= 1.1;
        else if (rate < settings.accept_low) steps[i] *= 0.9;
        window_prop[i] = window_acc[i] = 0;
      }
    }
    if (!burning && (it - settings.burn_in + 1) % settings.thin == 0) out.draws.push_back(theta);
  }
  if (total_acc == 0)
    throw SamplerFailure("no proposal accepted in " + std::to_string(total) +
                         " iterations (step " + format_double(steps[0]) + ")");
  out.acceptance_rate = post_prop ? static_cast<double>(post_acc) / static_cast<double>(post_prop) : 0.0;
  out.steps = steps;
  return out;
}

std::vector<double> initial_steps(std::size_t d, const ChainSettings& s, const WarmStart* warm) {
  if (warm && warm->steps.size() == d) return warm->steps;
  return std::vector<double>(d, s.initial_step);
}

std::vector<double> start_point(const PredictiveClass& cls, std::span<const double> y,
                                const ScoringRule& rule, const WarmStart* warm) {
  if (warm && cls.in_support(warm->theta)) return warm->theta;
  try {
    return optimize_score(cls, y, rule);
  } catch (const ConvergenceError& e) {
    if (cls.in_support(e.best_point())) return e.best_point();
    throw;
  }
}

PosteriorDraws sample_mh(const PredictiveClass& cls, std::span<const double> y,
                         const ScoringRule& rule, ScaleFactor w, const ChainSettings& settings,
                         const WarmStart* warm) {
  settings.validate();
  w.validate();
  if (y.size() < 30 && cls.model != ModelClass::ets)
    throw InvalidInput("posterior sampling requires at least 30 observations");
  auto criterion = std::make_shared<ScoreCriterion>(cls, rule, y);
  Chain chain;
  chain.dim = cls.dim();
  chain.in_support = [&cls](std::span<const double> th) { return cls.in_support(th); };
  chain.log_target = [&cls, criterion, wv = w.w](std::span<const double> th) {
    if (!cls.in_support(th)) return kNegInf;
    const double s = (*criterion)(th);
    return wv * s + log_prior(cls, th);
  };
  switch (cls.model) {
    case ModelClass::arch1:
      chain.shared_step = true;
      chain.log_mass = [](std::span<const std::size_t>, std::span<const double> c,
                          std::span<const double> s) {
        return log_box_mass(c[1], s[1], 0.0, std::numeric_limits<double>::infinity()) +
               log_box_mass(c[2], s[2], 0.0, 1.0);
      };
      break;
    case ModelClass::garch11:
      chain.log_mass = [](std::span<const std::size_t> block, std::span<const double> c,
                          std::span<const double> s) {
        const bool has3 = std::find(block.begin(), block.end(), 2) != block.end();
        const bool has4 = std::find(block.begin(), block.end(), 3) != block.end();
        double lm = 0.0;
        if (std::find(block.begin(), block.end(), 1) != block.end())
          lm += log_box_mass(c[1], s[1], 0.0, std::numeric_limits<double>::infinity());
        if (has3 && has4) lm += log_triangle_mass(c[2], s[2], c[3], s[3]);
        else if (has3) lm += log_box_mass(c[2], s[2], 0.0, 1.0 - c[3]);
        else if (has4) lm += log_box_mass(c[3], s[3], 0.0, 1.0 - c[2]);
        return lm;
      };
      break;
    case ModelClass::ets: {
      const bool damped = cls.ets->trend == EtsTrend::damped;
      chain.log_mass = [damped](std::span<const std::size_t> block, std::span<const double> c,
                                std::span<const double> s) {
        double lm = 0.0;
        for (std::size_t i : block) {
          const bool damping = damped && i == 2;
          lm += log_box_mass(c[i], s[i], damping ? 0.8 : 0.0, damping ? 0.98 : 1.0);
        }
        return lm;
      };
      break;
    }
    default:
      throw InvalidInput("Metropolis-Hastings sampling is not defined for this class");
  }
  auto theta = start_point(cls, y, rule, warm);
  auto steps = initial_steps(chain.dim, settings, warm);
  PosteriorDraws out = run_chain(chain, std::move(theta), std::move(steps), settings, settings.seed);
  out.names = cls.param_names();
  out.w = w;
  return out;
}

}  // namespace

std::string_view to_string(ScaleMethod method) {
  switch (method) {
    case ScaleMethod::unit: return "unit";
    case ScaleMethod::crps_ratio: return "crps_ratio";
    case ScaleMethod::msis_formula: return "msis_formula";
    case ScaleMethod::manual: return "manual";
  }
  return "?";
}

void ScaleFactor::validate() const {
  if (!(w > 0.0) || !std::isfinite(w)) throw InvalidInput("scale factor w must be finite and positive");
}

void ChainSettings::validate() const {
  if (burn_in < 0 || iterations < 1 || thin < 1 || iterations < thin)
    throw InvalidInput("chain settings need iterations >= thin >= 1 and burn_in >= 0");
  if (!(initial_step > 0.0) || adapt_interval < 1)
    throw InvalidInput("chain settings need a positive step and adaptation interval");
  if (grid_size < 2) throw InvalidInput("grid size must be at least 2");
}

std::vector<double> PosteriorDraws::column(std::size_t i) const {
  std::vector<double> c;
  c.reserve(draws.size());
  for (const auto& d : draws) c.push_back(d.at(i));
  return c;
}

double PosteriorDraws::mean(std::size_t i) const {
  if (!grid.empty() && i == 0) {
    double m = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) m += grid[k] * grid_weights[k];
    return m;
  }
  return fbp::mean(column(i));
}

double PosteriorDraws::sd(std::size_t i) const {
  if (!grid.empty() && i == 0) {
    const double m = mean(0);
    double v = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) v += (grid[k] - m) * (grid[k] - m) * grid_weights[k];
    return std::sqrt(v);
  }
  return draws.size() < 2 ? 0.0 : std::sqrt(variance(column(i)));
}

WarmStart PosteriorDraws::warm_start() const {
  if (draws.empty()) return {};
  return {draws.back(), steps};
}

double log_prior(const PredictiveClass& cls, std::span<const double> th) {
  if (!cls.in_support(th)) return kNegInf;
  if (cls.model == ModelClass::arch1 || cls.model == ModelClass::garch11) return -std::log(th[1]);
  return 0.0;
}

double log_posterior_kernel(const PredictiveClass& cls, std::span<const double> th,
                            std::span<const double> series, const ScoringRule& rule, double w) {
  if (!cls.in_support(th)) return kNegInf;
  const double prior = log_prior(cls, th);
  if (w == 0.0) return prior;
  return w * ScoreCriterion(cls, rule, series)(th) + prior;
}

PosteriorDraws sample_arch(std::span<const double> series, const ScoringRule& rule, ScaleFactor w,
                           const ChainSettings& settings, const WarmStart* warm) {
  return sample_mh(PredictiveClass::arch1(), series, rule, w, settings, warm);
}

PosteriorDraws sample_garch(std::span<const double> series, const ScoringRule& rule, ScaleFactor w,
                            const ChainSettings& settings, const WarmStart* warm) {
  return sample_mh(PredictiveClass::garch11(), series, rule, w, settings, warm);
}

PosteriorDraws sample_ets(std::span<const double> series, const EtsSpec& spec,
                          const ScoringRule& rule, ScaleFactor w, const ChainSettings& settings,
                          const WarmStart* warm) {
  return sample_mh(PredictiveClass::exponential_smoothing(spec), series, rule, w, settings, warm);
}

PosteriorDraws grid_posterior(std::size_t grid_size, const std::function<double(double)>& log_kernel,
                              std::size_t draws, std::uint64_t seed) {
  if (grid_size < 2) throw InvalidInput("grid size must be at least 2");
  if (draws < 1) throw InvalidInput("grid posterior needs at least one draw");
  PosteriorDraws out;
  out.names = {"theta1"};
  out.grid.resize(grid_size);
  std::vector<double> lk(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i) {
    out.grid[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(grid_size);
    const double v = log_kernel(out.grid[i]);
    lk[i] = std::isnan(v) ? kNegInf : v;
  }
  const double norm = log_sum_exp(lk);
  if (!std::isfinite(norm)) throw SamplerFailure("grid posterior: kernel is -inf at every grid point");
  out.grid_weights.resize(grid_size);
  std::vector<double> cumulative(grid_size);
  double acc = 0.0;
  for (std::size_t i = 0; i < grid_size; ++i) {
    out.grid_weights[i] = std::exp(lk[i] - norm);
    acc += out.grid_weights[i];
    cumulative[i] = acc;
  }
  Random rng(seed);
  out.draws.reserve(draws);
  for (std::size_t j = 0; j < draws; ++j) {
    const double u = rng.uniform() * acc;
    auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    out.draws.push_back({out.grid[static_cast<std::size_t>(it - cumulative.begin())]});
  }
  out.acceptance_rate = 1.0;
  out.seed = seed;
  return out;
}

PosteriorDraws grid_posterior_mixture(std::span<const double> series,
                                      const MixtureConstituents& constituents,
                                      const ScoringRule& rule, ScaleFactor w,
                                      std::size_t grid_size, std::size_t draws,
                                      std::uint64_t seed) {
  w.validate();
  const ScoreCriterion criterion(PredictiveClass::linear_pool(constituents), rule, series);
  auto out = grid_posterior(
      grid_size,
      [&](double t) {
        const double th[1] = {t};
        return w.w * criterion(th);
      },
      draws, seed);
  out.w = w;
  return out;
}

PosteriorDraws sample_posterior(const PredictiveClass& cls, std::span<const double> series,
                                const ScoringRule& rule, ScaleFactor w,
                                const ChainSettings& settings, const WarmStart* warm) {
  if (cls.model == ModelClass::mixture) {
    settings.validate();
    return grid_posterior_mixture(series, *cls.mixture, rule, w, settings.grid_size,
                                  settings.retained(), settings.seed);
  }
  return sample_mh(cls, series, rule, w, settings, warm);
}

std::vector<double> optimize_score(const PredictiveClass& cls, std::span<const double> y,
                                   const ScoringRule& rule, const SimplexOptions& options) {
  if (y.size() < 30 && cls.model != ModelClass::ets)
    throw InvalidInput("optimize_score requires at least 30 observations");
  const ScoreCriterion criterion(cls, rule, y);
  std::vector<double> u0;
  std::function<std::vector<double>(std::span<const double>)> decode;
  const double m = mean(y);
  const double v = variance(y);
  switch (cls.model) {
    case ModelClass::arch1:
      if (!(v > 0.0)) throw ConvergenceError("optimize_score: constant series", kNegInf, {});
      u0 = {m, std::log(0.8 * v), logit(0.2)};
      decode = [](std::span<const double> u) {
        return std::vector<double>{u[0], std::exp(u[1]), logistic(u[2])};
      };
      break;
    case ModelClass::garch11:
      if (!(v > 0.0)) throw ConvergenceError("optimize_score: constant series", kNegInf, {});
      u0 = {m, std::log(0.1 * v), logit(0.9), logit(0.1 / 0.9)};
      decode = [](std::span<const double> u) {
        const double pers = logistic(u[2]);
        const double share = logistic(u[3]);
        return std::vector<double>{u[0], std::exp(u[1]), pers * share, pers * (1.0 - share)};
      };
      break;
    case ModelClass::mixture:
      u0 = {0.0};
      decode = [](std::span<const double> u) { return std::vector<double>{logistic(u[0])}; };
      break;
    case ModelClass::ets: {
      const bool damped = cls.ets->trend == EtsTrend::damped;
      const auto th0 = cls.ets->smoothing();
      for (std::size_t i = 0; i < th0.size(); ++i)
        u0.push_back(damped && i == 2 ? from_interval(th0[i], 0.8, 0.98) : logit(th0[i]));
      decode = [damped](std::span<const double> u) {
        std::vector<double> th(u.size());
        for (std::size_t i = 0; i < u.size(); ++i)
          th[i] = damped && i == 2 ? to_interval(u[i], 0.8, 0.98) : logistic(u[i]);
        return th;
      };
      break;
    }
    default:
      throw InvalidInput("optimize_score: unsupported class");
  }
  auto objective = [&](std::span<const double> u) {
    const auto th = decode(u);
    if (!cls.in_support(th)) return std::numeric_limits<double>::infinity();
    return -criterion(th);
  };
  try {
    return decode(nelder_mead(objective, u0, options).x);
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(e.what(), -e.best_value(),
                           e.best_point().empty() ? std::vector<double>{} : decode(e.best_point()));
  }
}

ScaleFactor scale_from_score_sums(std::span<const double> ls_sums, std::span<const double> crps_sums) {
  if (ls_sums.empty() || ls_sums.size() != crps_sums.size())
    throw InvalidInput("score sums must be nonempty and aligned");
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < ls_sums.size(); ++j) {
    num += ls_sums[j];
    den += crps_sums[j];
  }
  if (den == 0.0) throw CalibrationError("CRPS score sum is zero");
  const double w = num / den;
  if (!(w > 0.0) || !std::isfinite(w))
    throw CalibrationError("calibrated w is not finite and positive: " + format_double(w));
  return {w, ScaleMethod::crps_ratio};
}

ScaleFactor calibrate_w_crps(std::span<const double> series, const PredictiveClass& cls,
                             const ChainSettings& settings) {
  const auto ls = ScoringRule::log_score();
  const auto draws = sample_posterior(cls, series, ls, {1.0, ScaleMethod::unit}, settings);
  const ScoreCriterion ls_sum(cls, ls, series);
  const ScoreCriterion crps_sum(cls, ScoringRule::crps(), series);
  std::vector<double> a, b;
  a.reserve(draws.size());
  b.reserve(draws.size());
  for (const auto& th : draws.draws) {
    a.push_back(ls_sum(th));
    b.push_back(crps_sum(th));
  }
  return scale_from_score_sums(a, b);
}

ScaleFactor msis_scale(std::size_t n, std::size_t d, double s) {
  if (s == 0.0 || !std::isfinite(s)) throw CalibrationError("MSIS criterion at the estimate is zero");
  const double w = -static_cast<double>(n) * static_cast<double>(d) / (2.0 * s);
  if (!(w > 0.0)) throw CalibrationError("MSIS criterion at the estimate must be negative");
  return {w, ScaleMethod::msis_formula};
}

ScaleFactor calibrate_w_msis(std::span<const double> series, const EtsSpec& spec, IntervalLevel level) {
  const auto cls = PredictiveClass::exponential_smoothing(spec);
  const ScoreCriterion criterion(cls, ScoringRule::msis(level), series);
  return msis_scale(series.size(), spec.dim(), criterion(spec.smoothing()));
}

void write_draws_csv(const std::filesystem::path& path, const PosteriorDraws& draws) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (std::size_t i = 0; i < draws.names.size(); ++i) out << (i ? "," : "") << draws.names[i];
  out << '\n';
  for (const auto& d : draws.draws) {
    for (std::size_t i = 0; i < d.size(); ++i) out << (i ? "," : "") << format_double(d[i]);
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace fbp
