#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fbp/distributions.hpp"
#include "fbp/models.hpp"

namespace fbp {

// All scores are positively oriented: larger is better.

enum class CensorSide { below, above };

// Region A = {y <= threshold} (below) or {y >= threshold} (above).
struct CensorRegion {
  double threshold = 0.0;
  CensorSide side = CensorSide::below;

  bool contains(double y) const noexcept {
    return side == CensorSide::below ? y <= threshold : y >= threshold;
  }
};

// 100(1 - alpha)% intervals over horizons 1..horizon_cap.
struct IntervalLevel {
  double alpha = 0.05;
  int horizon_cap = 6;

  void validate() const;
};

enum class RuleKind { log_score, crps, censored, msis };

// A rule as named on the command line: "ls", "crps", "cs<10", "cs>90",
// "msis". Censoring thresholds are percentiles of the estimation window and
// are only fixed once the window is known (see resolve_rule).
struct RuleId {
  RuleKind kind = RuleKind::log_score;
  CensorSide side = CensorSide::below;
  double percentile = 0.0;  // in (0, 100); censored rules only
  std::string name;

  static RuleId parse(std::string_view text);
};

struct ScoringRule {
  RuleKind kind = RuleKind::log_score;
  CensorRegion region;  // censored rules only
  IntervalLevel level;  // msis only
  std::string name;

  static ScoringRule log_score();
  static ScoringRule crps();
  static ScoringRule censored(CensorRegion region, std::string name = "cs");
  static ScoringRule msis(IntervalLevel level = {});

  // Score of a one-step predictive. Not defined for msis.
  double operator()(const Distribution& pred, double y) const;
};

ScoringRule resolve_rule(const RuleId& id, std::span<const double> window,
                         IntervalLevel msis_level = {});

// ln density(y); -inf when the density vanishes.
double log_score(const Distribution& pred, double y);

// ln density(y) inside the region, ln mass of the complement outside.
// Mixtures are scored through their components' censored scores.
double censored_score(const Distribution& pred, double y, const CensorRegion& region);
double censored_score(const GaussianDist& pred, double y, const CensorRegion& region);
double censored_score(const MixtureDist& pred, double y, const CensorRegion& region);

// Negated CRPS. Gaussian predictives use the closed form; everything else a
// 2,001-node trapezoid rule over mean +/- 10 sd, split at y, with endpoint
// derivative corrections.
double crps(const Distribution& pred, double y);
double crps(const GaussianDist& pred, double y);
double crps_quadrature(const Distribution& pred, double y, std::size_t points = 2001);

// Negative average interval score over the supplied horizons.
double msis_update_score(std::span<const double> lower, std::span<const double> upper,
                         std::span<const double> actuals, double alpha);

// Negated mean scaled interval score: the average interval score over the H
// horizons divided by the in-sample mean absolute lag-m difference of `train`.
double msis_competition(std::span<const double> train, std::span<const double> lower,
                        std::span<const double> upper, std::span<const double> actuals,
                        double alpha, int m = 1);

// Type-7 sample quantile of the window.
double threshold_from_empirical_quantile(std::span<const double> series, double p);

// The in-sample criterion S_n(theta) for one class, rule and window. For
// the ARCH/GARCH classes the first observation only conditions (n - 1
// terms); ETS starts from its frozen initial states (n terms), and under
// msis every origin contributes its multi-horizon interval score.
// Mixture evaluations reuse per-observation constituent tables.
class ScoreCriterion {
 public:
  ScoreCriterion(PredictiveClass cls, ScoringRule rule, std::span<const double> y);
  ~ScoreCriterion();
  ScoreCriterion(ScoreCriterion&&) noexcept;
  ScoreCriterion& operator=(ScoreCriterion&&) noexcept;

  double operator()(std::span<const double> theta) const;
  // Per-observation contributions, in time order.
  std::vector<double> terms(std::span<const double> theta) const;

  const PredictiveClass& predictive_class() const noexcept;
  const ScoringRule& rule() const noexcept;
  std::size_t size() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

double score_sum(const ScoringRule& rule, const PredictiveClass& cls,
                 std::span<const double> theta, std::span<const double> series);

}  // namespace fbp
