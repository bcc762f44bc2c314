#include "fbp/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fbp/error.hpp"
#include "fbp/random.hpp"

namespace fbp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_eval(const std::function<double(std::span<const double>)>& f,
                 const std::vector<double>& x) {
  const double v = f(x);
  return std::isfinite(v) ? v : kInf;
}

SimplexResult run_simplex(const std::function<double(std::span<const double>)>& f,
                          const std::vector<double>& x0, const SimplexOptions& opt) {
  const std::size_t d = x0.size();
  std::vector<std::vector<double>> pts(d + 1, x0);
  std::vector<double> vals(d + 1);
  for (std::size_t i = 0; i < d; ++i) pts[i + 1][i] += opt.initial_step;
  for (std::size_t i = 0; i <= d; ++i) vals[i] = safe_eval(f, pts[i]);

  std::vector<std::size_t> order(d + 1);
  std::vector<double> centroid(d), trial(d), trial2(d);
  SimplexResult res;
  int iter = 0;
  for (; iter < opt.max_iterations; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[d - 1];
    const double fl = vals[best];
    const double fh = vals[worst];
    if (std::isfinite(fh) &&
        2.0 * std::abs(fh - fl) <= opt.relative_ftol * (std::abs(fh) + std::abs(fl)) + 1e-300) {
      res.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= d; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < d; ++k) centroid[k] += pts[i][k] / static_cast<double>(d);
    }
    for (std::size_t k = 0; k < d; ++k) trial[k] = centroid[k] + (centroid[k] - pts[worst][k]);
    const double fr = safe_eval(f, trial);

    if (fr < fl) {
      for (std::size_t k = 0; k < d; ++k) trial2[k] = centroid[k] + 2.0 * (centroid[k] - pts[worst][k]);
      const double fe = safe_eval(f, trial2);
      if (fe < fr) {
        pts[worst] = trial2;
        vals[worst] = fe;
      } else {
        pts[worst] = trial;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = trial;
      vals[worst] = fr;
      continue;
    }
    const bool outside = fr < fh;
    for (std::size_t k = 0; k < d; ++k) {
      trial2[k] = outside ? centroid[k] + 0.5 * (trial[k] - centroid[k])
                          : centroid[k] + 0.5 * (pts[worst][k] - centroid[k]);
    }
    const double fc = safe_eval(f, trial2);
    if (fc < (outside ? fr : fh)) {
      pts[worst] = trial2;
      vals[worst] = fc;
      continue;
    }
    // shrink towards the best vertex
    for (std::size_t i = 0; i <= d; ++i) {
      if (i == best) continue;
      for (std::size_t k = 0; k < d; ++k) pts[i][k] = pts[best][k] + 0.5 * (pts[i][k] - pts[best][k]);
      vals[i] = safe_eval(f, pts[i]);
    }
  }
  const auto best_it = std::min_element(vals.begin(), vals.end());
  res.x = pts[static_cast<std::size_t>(best_it - vals.begin())];
  res.value = *best_it;
  res.iterations = iter;
  return res;
}

}  // namespace

SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                          std::vector<double> x0, const SimplexOptions& options) {
  if (x0.empty()) throw InvalidInput("nelder_mead: empty starting point");
  Random rng(options.seed);
  SimplexResult best;
  best.value = kInf;
  bool any_converged = false;
  int total_iterations = 0;
  for (int s = 0; s < std::max(1, options.starts); ++s) {
    std::vector<double> start = x0;
    if (s > 0) {
      for (double& v : start) v += options.jitter * rng.normal();
    }
    SimplexResult r = run_simplex(f, start, options);
    total_iterations += r.iterations;
    any_converged = any_converged || r.converged;
    if (r.value < best.value || best.x.empty()) best = r;
  }
  // Polish from the best vertex with a fresh, smaller simplex.
  SimplexOptions polish = options;
  polish.initial_step = options.initial_step * 0.1;
  SimplexResult r = run_simplex(f, best.x, polish);
  total_iterations += r.iterations;
  if (r.value <= best.value) {
    best.x = r.x;
    best.value = r.value;
  }
  best.converged = any_converged || r.converged;
  best.iterations = total_iterations;
  if (!best.converged || !std::isfinite(best.value)) {
    throw ConvergenceError("simplex search did not converge within the iteration cap",
                           best.value, best.x);
  }
  return best;
}

// Clamped so that to_interval never lands on an endpoint.
double logistic(double u) noexcept {
  u = std::clamp(u, -30.0, 30.0);
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

double logit(double p) noexcept { return std::log(p / (1.0 - p)); }

double to_interval(double u, double lo, double hi) noexcept { return lo + (hi - lo) * logistic(u); }

double from_interval(double x, double lo, double hi) noexcept { return logit((x - lo) / (hi - lo)); }

}  // namespace fbp
