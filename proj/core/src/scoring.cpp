#include "fbp/scoring.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "fbp/error.hpp"
#include "fbp/numeric.hpp"

namespace fbp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInvSqrtPi = 0.56418958354775628695;

double gaussian_ls(double e, double s2) { return -kLogSqrt2Pi - 0.5 * std::log(s2) - 0.5 * e * e / s2; }

double gaussian_cs(double mu, double sigma, double y, const CensorRegion& r) {
  if (r.contains(y)) {
    const double z = (y - mu) / sigma;
    return normal_log_pdf(z) - std::log(sigma);
  }
  if (r.side == CensorSide::below) return normal_log_cdf((mu - r.threshold) / sigma);
  return normal_log_cdf((r.threshold - mu) / sigma);
}

double gaussian_crps(double mu, double sigma, double y) {
  const double z = (y - mu) / sigma;
  return -sigma * (z * (2.0 * normal_cdf(z) - 1.0) + 2.0 * normal_pdf(z) - kInvSqrtPi);
}

// Trapezoid rule on [a, b] with `intervals` panels and the Euler-Maclaurin
// end correction -h^2/12 (f'(b) - f'(a)).
template <class F>
double corrected_trapezoid(F&& f, double fa_prime, double fb_prime, double a, double b,
                           std::size_t intervals) {
  if (!(b > a) || intervals == 0) return 0.0;
  const double h = (b - a) / static_cast<double>(intervals);
  double s = 0.5 * (f(a) + f(b));
  for (std::size_t i = 1; i < intervals; ++i) s += f(a + h * static_cast<double>(i));
  return h * s - h * h / 12.0 * (fb_prime - fa_prime);
}

// Splits points-1 panels between [lo, y] and [y, hi] proportionally.
std::pair<std::size_t, std::size_t> split_panels(double lo, double y, double hi,
                                                 std::size_t points) {
  const std::size_t total = std::max<std::size_t>(points, 3) - 1;
  if (!(y > lo)) return {0, total};
  if (!(hi > y)) return {total, 0};
  auto left = static_cast<std::size_t>(std::llround((y - lo) / (hi - lo) * static_cast<double>(total)));
  left = std::clamp<std::size_t>(left, 1, total - 1);
  return {left, total - left};
}

}  // namespace

void IntervalLevel::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("interval alpha must lie in (0, 1)");
  if (horizon_cap < 1) throw InvalidInput("interval horizon cap must be at least 1");
}

RuleId RuleId::parse(std::string_view text) {
  RuleId id;
  id.name = std::string(text);
  if (text == "ls") {
    id.kind = RuleKind::log_score;
  } else if (text == "crps") {
    id.kind = RuleKind::crps;
  } else if (text == "msis") {
    id.kind = RuleKind::msis;
  } else if (text.size() > 3 && text.substr(0, 2) == "cs" && (text[2] == '<' || text[2] == '>')) {
    id.kind = RuleKind::censored;
    id.side = text[2] == '<' ? CensorSide::below : CensorSide::above;
    const auto digits = text.substr(3);
    double pct = 0.0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), pct);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || !(pct > 0.0 && pct < 100.0))
      throw InvalidInput("bad censoring percentile in rule id: " + id.name);
    id.percentile = pct;
  } else {
    throw InvalidInput("unknown scoring rule: " + id.name);
  }
  return id;
}

ScoringRule ScoringRule::log_score() { return {RuleKind::log_score, {}, {}, "ls"}; }
ScoringRule ScoringRule::crps() { return {RuleKind::crps, {}, {}, "crps"}; }
ScoringRule ScoringRule::censored(CensorRegion region, std::string name) {
  if (std::isnan(region.threshold)) throw InvalidInput("censoring threshold is NaN");
  return {RuleKind::censored, region, {}, std::move(name)};
}
ScoringRule ScoringRule::msis(IntervalLevel level) {
  level.validate();
  return {RuleKind::msis, {}, level, "msis"};
}

double ScoringRule::operator()(const Distribution& pred, double y) const {
  switch (kind) {
    case RuleKind::log_score: return fbp::log_score(pred, y);
    case RuleKind::censored: return censored_score(pred, y, region);
    case RuleKind::crps: return fbp::crps(pred, y);
    case RuleKind::msis: break;
  }
  throw InvalidInput("msis is a multi-horizon interval rule, not a one-step score");
}

ScoringRule resolve_rule(const RuleId& id, std::span<const double> window, IntervalLevel msis_level) {
  switch (id.kind) {
    case RuleKind::log_score: return ScoringRule::log_score();
    case RuleKind::crps: return ScoringRule::crps();
    case RuleKind::msis: return ScoringRule::msis(msis_level);
    case RuleKind::censored: {
      const double thr = threshold_from_empirical_quantile(window, id.percentile / 100.0);
      return ScoringRule::censored({thr, id.side}, id.name);
    }
  }
  throw InvalidInput("unknown rule kind");
}

double log_score(const Distribution& pred, double y) {
  const double v = pred.log_density(y);
  return std::isnan(v) ? kNegInf : v;
}

double censored_score(const GaussianDist& pred, double y, const CensorRegion& region) {
  return gaussian_cs(pred.mu(), pred.sigma(), y, region);
}

double censored_score(const MixtureDist& pred, double y, const CensorRegion& region) {
  const auto w = pred.weights();
  const auto& comps = pred.components();
  std::vector<double> terms;
  terms.reserve(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] <= 0.0) continue;
    terms.push_back(std::log(w[i]) + censored_score(*comps[i], y, region));
  }
  return terms.empty() ? kNegInf : log_sum_exp(terms);
}

double censored_score(const Distribution& pred, double y, const CensorRegion& region) {
  if (auto g = dynamic_cast<const GaussianDist*>(&pred)) return censored_score(*g, y, region);
  if (auto m = dynamic_cast<const MixtureDist*>(&pred)) return censored_score(*m, y, region);
  if (region.contains(y)) return log_score(pred, y);
  const double mass = region.side == CensorSide::below ? 1.0 - pred.cdf(region.threshold)
                                                       : pred.cdf(region.threshold);
  return mass > 0.0 ? std::log(mass) : kNegInf;
}

double crps(const GaussianDist& pred, double y) { return gaussian_crps(pred.mu(), pred.sigma(), y); }

double crps(const Distribution& pred, double y) {
  if (auto g = dynamic_cast<const GaussianDist*>(&pred)) return crps(*g, y);
  return crps_quadrature(pred, y);
}

double crps_quadrature(const Distribution& pred, double y, std::size_t points) {
  const double m = pred.mean();
  const double s = pred.sd();
  const double lo = std::min(m - 10.0 * s, y);
  const double hi = std::max(m + 10.0 * s, y);
  const auto [nl, nr] = split_panels(lo, y, hi, points);
  auto below = [&](double x) {
    const double f = pred.cdf(x);
    return f * f;
  };
  auto above = [&](double x) {
    const double g = 1.0 - pred.cdf(x);
    return g * g;
  };
  auto d_below = [&](double x) { return 2.0 * pred.cdf(x) * pred.density(x); };
  auto d_above = [&](double x) { return -2.0 * (1.0 - pred.cdf(x)) * pred.density(x); };
  double total = 0.0;
  if (nl > 0) total += corrected_trapezoid(below, d_below(lo), d_below(y), lo, y, nl);
  if (nr > 0) total += corrected_trapezoid(above, d_above(y), d_above(hi), y, hi, nr);
  return -total;
}

namespace {

double interval_score(double l, double u, double y, double alpha) {
  double s = u - l;
  if (y < l) s += 2.0 / alpha * (l - y);
  if (y > u) s += 2.0 / alpha * (y - u);
  return s;
}

void check_interval_inputs(std::span<const double> lower, std::span<const double> upper,
                           std::span<const double> actuals, double alpha) {
  if (lower.empty()) throw InvalidInput("interval score needs at least one horizon");
  if (lower.size() != upper.size() || lower.size() != actuals.size())
    throw InvalidInput("interval bounds and actuals must be aligned");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("interval alpha must lie in (0, 1)");
}

}  // namespace

double msis_update_score(std::span<const double> lower, std::span<const double> upper,
                         std::span<const double> actuals, double alpha) {
  check_interval_inputs(lower, upper, actuals, alpha);
  double s = 0.0;
  for (std::size_t h = 0; h < lower.size(); ++h) s += interval_score(lower[h], upper[h], actuals[h], alpha);
  return -s / static_cast<double>(lower.size());
}

double msis_competition(std::span<const double> train, std::span<const double> lower,
                        std::span<const double> upper, std::span<const double> actuals,
                        double alpha, int m) {
  check_interval_inputs(lower, upper, actuals, alpha);
  if (m < 1 || train.size() <= static_cast<std::size_t>(m))
    throw InvalidInput("msis_competition: training series must be longer than the lag m");
  double den = 0.0;
  for (std::size_t t = static_cast<std::size_t>(m); t < train.size(); ++t)
    den += std::abs(train[t] - train[t - static_cast<std::size_t>(m)]);
  den /= static_cast<double>(train.size() - static_cast<std::size_t>(m));
  if (!(den > 0.0)) throw DegenerateScale("msis_competition: zero in-sample scale (constant series)");
  return msis_update_score(lower, upper, actuals, alpha) / den;
}

double threshold_from_empirical_quantile(std::span<const double> series, double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidInput("quantile level must lie in (0, 1)");
  if (series.size() < 10) throw InvalidInput("empirical threshold needs at least 10 observations");
  return quantile_type7(std::vector<double>(series.begin(), series.end()), p);
}

// --- criterion ---------------------------------------------------------------

struct ScoreCriterion::Impl {
  PredictiveClass cls;
  ScoringRule rule;
  std::vector<double> y;
  double var0 = 1.0;
  // mixture: per-observation constituent tables (index t - 1)
  std::vector<double> a, b, c;
  double z = 0.0;  // msis interval multiplier

  double one_step(double mu, double s2, double obs) const {
    switch (rule.kind) {
      case RuleKind::log_score: return gaussian_ls(obs - mu, s2);
      case RuleKind::censored: return gaussian_cs(mu, std::sqrt(s2), obs, rule.region);
      case RuleKind::crps: return gaussian_crps(mu, std::sqrt(s2), obs);
      case RuleKind::msis: break;
    }
    return kNegInf;
  }

  void build_mixture_tables();
  void terms(std::span<const double> th, std::vector<double>& out) const;
};

void ScoreCriterion::Impl::build_mixture_tables() {
  const auto& mc = *cls.mixture;
  const std::size_t n = y.size();
  const auto s2 = garch11_filter(mc.psi2, y, var0);
  a.assign(n - 1, 0.0);
  b.assign(n - 1, 0.0);
  c.assign(n - 1, 0.0);
  for (std::size_t t = 1; t < n; ++t) {
    const LocationScaleDist p1 = skew_arch_predictive(mc.psi1, y[t - 1]);
    const GaussianDist p2(mc.psi2.theta1, std::sqrt(s2[t]));
    const double obs = y[t];
    switch (rule.kind) {
      case RuleKind::log_score:
        a[t - 1] = log_score(p1, obs);
        b[t - 1] = log_score(p2, obs);
        break;
      case RuleKind::censored:
        a[t - 1] = censored_score(p1, obs, rule.region);
        b[t - 1] = censored_score(p2, obs, rule.region);
        break;
      case RuleKind::crps: {
        // A_kl = int (F_k - H)(F_l - H), H the step at the observation.
        const double lo = std::min({p1.mean() - 10.0 * p1.sd(), p2.mean() - 10.0 * p2.sd(), obs});
        const double hi = std::max({p1.mean() + 10.0 * p1.sd(), p2.mean() + 10.0 * p2.sd(), obs});
        const auto [nl, nr] = split_panels(lo, obs, hi, 2001);
        const double hl = nl ? (obs - lo) / static_cast<double>(nl) : 0.0;
        const double hr = nr ? (hi - obs) / static_cast<double>(nr) : 0.0;
        double s11 = 0, s12 = 0, s22 = 0;
        auto accumulate = [&](double x, double step, double weight, double step_h) {
          const double f1 = p1.cdf(x) - step_h;
          const double f2 = p2.cdf(x) - step_h;
          s11 += step * weight * f1 * f1;
          s12 += step * weight * f1 * f2;
          s22 += step * weight * f2 * f2;
        };
        for (std::size_t i = 0; i <= nl && nl > 0; ++i)
          accumulate(lo + hl * static_cast<double>(i), hl, (i == 0 || i == nl) ? 0.5 : 1.0, 0.0);
        for (std::size_t i = 0; i <= nr && nr > 0; ++i)
          accumulate(obs + hr * static_cast<double>(i), hr, (i == 0 || i == nr) ? 0.5 : 1.0, 1.0);
        // end corrections at the split point (outer ends have negligible slope)
        const double g1 = p1.cdf(obs), g2 = p2.cdf(obs);
        const double d1 = p1.density(obs), d2 = p2.density(obs);
        auto correct = [&](double& s, double fa, double fb, double da, double db) {
          // left panel: d/dx (Fk Fl) at obs; right panel: d/dx (Fk-1)(Fl-1) at obs
          if (nl > 0) s -= hl * hl / 12.0 * (da * fb + db * fa);
          if (nr > 0) s += hr * hr / 12.0 * (da * (fb - 1.0) + db * (fa - 1.0));
        };
        correct(s11, g1, g1, d1, d1);
        correct(s12, g1, g2, d1, d2);
        correct(s22, g2, g2, d2, d2);
        a[t - 1] = s11;
        b[t - 1] = s12;
        c[t - 1] = s22;
        break;
      }
      case RuleKind::msis: break;
    }
  }
}

void ScoreCriterion::Impl::terms(std::span<const double> th, std::vector<double>& out) const {
  const std::size_t n = y.size();
  out.clear();
  switch (cls.model) {
    case ModelClass::arch1: {
      for (std::size_t t = 1; t < n; ++t) {
        const double d = y[t - 1] - th[0];
        out.push_back(one_step(th[0], th[1] + th[2] * d * d, y[t]));
      }
      break;
    }
    case ModelClass::garch11: {
      double s2 = var0;
      for (std::size_t t = 1; t < n; ++t) {
        const double d = y[t - 1] - th[0];
        s2 = th[1] + th[2] * d * d + th[3] * s2;
        out.push_back(one_step(th[0], s2, y[t]));
      }
      break;
    }
    case ModelClass::mixture: {
      const double w = th[0];
      if (rule.kind == RuleKind::crps) {
        for (std::size_t i = 0; i + 1 < n; ++i)
          out.push_back(-(w * w * a[i] + 2.0 * w * (1.0 - w) * b[i] + (1.0 - w) * (1.0 - w) * c[i]));
      } else {
        const double lw = std::log(w), l1w = std::log1p(-w);
        for (std::size_t i = 0; i + 1 < n; ++i) out.push_back(log_add_exp(lw + a[i], l1w + b[i]));
      }
      break;
    }
    case ModelClass::ets: {
      const EtsSpec spec = cls.ets->with_smoothing(th);
      if (rule.kind != RuleKind::msis) {
        std::vector<double> resid;
        ets_filter(spec, y, &resid);
        for (std::size_t t = 0; t < n; ++t) out.push_back(one_step(y[t] - resid[t], spec.sigma2, y[t]));
        break;
      }
      const int cap = rule.level.horizon_cap;
      const double alpha = rule.level.alpha;
      std::vector<double> sd(static_cast<std::size_t>(cap)), trend_coef(static_cast<std::size_t>(cap));
      for (int h = 1; h <= cap; ++h) {
        const auto m = ets_forecast_moments(spec, {0.0, 1.0}, h);
        sd[static_cast<std::size_t>(h - 1)] = std::sqrt(m.variance);
        trend_coef[static_cast<std::size_t>(h - 1)] = m.mean;  // level 0, trend 1
      }
      const double phi = spec.trend == EtsTrend::damped ? spec.theta4 : 1.0;
      const bool trended = spec.trend != EtsTrend::none;
      EtsState s{spec.level0, trended ? spec.trend0 : 0.0};
      for (std::size_t t = 0; t < n; ++t) {
        const std::size_t hmax = std::min<std::size_t>(static_cast<std::size_t>(cap), n - t);
        double is = 0.0;
        for (std::size_t h = 1; h <= hmax; ++h) {
          const double mean = s.level + trend_coef[h - 1] * s.trend;
          const double half = z * sd[h - 1];
          is += interval_score(mean - half, mean + half, y[t + h - 1], alpha);
        }
        out.push_back(-is / static_cast<double>(hmax));
        const double damped = trended ? phi * s.trend : 0.0;
        const double e = y[t] - (s.level + damped);
        s.level = s.level + damped + spec.theta1 * e;
        if (trended) s.trend = damped + spec.theta2 * e;
      }
      break;
    }
    case ModelClass::skew_arch1: break;
  }
}

ScoreCriterion::ScoreCriterion(PredictiveClass cls, ScoringRule rule, std::span<const double> y)
    : impl_(std::make_unique<Impl>()) {
  if (y.size() < 2) throw InvalidInput("score criterion needs at least 2 observations");
  impl_->cls = std::move(cls);
  impl_->rule = std::move(rule);
  impl_->y.assign(y.begin(), y.end());
  const bool is_ets = impl_->cls.model == ModelClass::ets;
  if (impl_->rule.kind == RuleKind::msis && !is_ets)
    throw InvalidInput("the msis rule applies to the ETS class only");
  if (impl_->cls.model == ModelClass::skew_arch1)
    throw InvalidInput("skew_arch1 is not a predictive class");
  if (impl_->cls.model == ModelClass::garch11 || impl_->cls.model == ModelClass::mixture) {
    impl_->var0 = variance(y);
    if (!(impl_->var0 > 0.0)) throw InvalidInput("conditioning window has zero variance");
  }
  if (impl_->cls.model == ModelClass::mixture) impl_->build_mixture_tables();
  if (impl_->rule.kind == RuleKind::msis) impl_->z = normal_quantile(1.0 - impl_->rule.level.alpha / 2.0);
}

ScoreCriterion::~ScoreCriterion() = default;
ScoreCriterion::ScoreCriterion(ScoreCriterion&&) noexcept = default;
ScoreCriterion& ScoreCriterion::operator=(ScoreCriterion&&) noexcept = default;

double ScoreCriterion::operator()(std::span<const double> theta) const {
  thread_local std::vector<double> buf;
  impl_->terms(theta, buf);
  double s = 0.0;
  for (double v : buf) s += v;
  return std::isnan(s) ? kNegInf : s;
}

std::vector<double> ScoreCriterion::terms(std::span<const double> theta) const {
  std::vector<double> out;
  impl_->terms(theta, out);
  return out;
}

const PredictiveClass& ScoreCriterion::predictive_class() const noexcept { return impl_->cls; }
const ScoringRule& ScoreCriterion::rule() const noexcept { return impl_->rule; }
std::size_t ScoreCriterion::size() const noexcept { return impl_->y.size(); }

double score_sum(const ScoringRule& rule, const PredictiveClass& cls, std::span<const double> theta,
                 std::span<const double> series) {
  if (!cls.in_support(theta)) throw InvalidParameter("score_sum: parameter outside the class support");
  return ScoreCriterion(cls, rule, series)(theta);
}

}  // namespace fbp
