#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fbp/models.hpp"
#include "fbp/random.hpp"

namespace fbp::testing {

// Gaussian ARCH(1) path after a 500-step burn.
std::vector<double> simulate_arch(const ArchParams& p, std::size_t n, std::uint64_t seed);

// Gaussian GARCH(1,1) path after a 500-step burn.
std::vector<double> simulate_garch(const GarchParams& p, std::size_t n, std::uint64_t seed);

// Annual-style series: a level with a drifting, occasionally breaking trend
// and Student-t(3) shocks. Positive and trending like macro/financial annual
// data; not generated by any ETS model.
std::vector<double> simulate_annual(std::size_t n, std::uint64_t seed);

// Independent oracles (no library numerics).
double oracle_normal_cdf(double x);
double oracle_normal_pdf(double x);
double simpson(const std::function<double(double)>& f, double a, double b, int panels);
double oracle_crps(const std::function<double(double)>& cdf, double y, double lo, double hi);

// Skew-normal CDF by adaptive Simpson quadrature of the raw density from
// a far lower bound; standardized the same way as StdSkewNormalDist.
double oracle_skew_normal_cdf(double gamma, double x);

// Direct type-7 quantile on an unsorted copy.
double oracle_type7(std::vector<double> x, double p);

// Total variation 0.5 int |p - q| by trapezoid on `points` nodes.
double tv_distance(const std::function<double(double)>& p, const std::function<double(double)>& q,
                   double lo, double hi, std::size_t points = 2001);

}  // namespace fbp::testing
