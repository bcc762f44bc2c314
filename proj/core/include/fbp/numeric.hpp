#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fbp {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // 0.5 ln(2 pi)

double normal_pdf(double x) noexcept;
double normal_log_pdf(double x) noexcept;
double normal_cdf(double x) noexcept;
// ln Phi(x), accurate deep into the lower tail.
double normal_log_cdf(double x) noexcept;
double normal_quantile(double p);

double log_sum_exp(std::span<const double> values) noexcept;
// ln(exp(a) + exp(b)).
double log_add_exp(double a, double b) noexcept;

double mean(std::span<const double> x);
// Sample variance with the n-1 denominator.
double variance(std::span<const double> x);

// Hyndman-Fan type 7 quantile of an already sorted sample.
double quantile_sorted(std::span<const double> sorted, double p);
double quantile_type7(std::vector<double> x, double p);

// Adaptive Simpson quadrature with Richardson correction.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, int max_depth = 40);

// Trapezoid rule on `points` equally spaced nodes.
double trapezoid(const std::function<double(double)>& f, double a, double b,
                 std::size_t points);

struct GaussLegendre {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};
const GaussLegendre& gauss_legendre(std::size_t order);

// Root of a monotone nondecreasing function g(x) - target on [lo, hi] by
// bisection. Requires g(lo) <= target <= g(hi).
double bisect_monotone(const std::function<double(double)>& g, double target,
                       double lo, double hi, double tol);

// Runs fn(i) for i in [0, n) on up to `threads` workers. Work items must not
// share mutable state; results are deterministic regardless of scheduling.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

unsigned default_thread_count() noexcept;

}  // namespace fbp
