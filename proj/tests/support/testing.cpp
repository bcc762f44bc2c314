#include "testing.hpp"

#include <algorithm>
#include <random>

namespace fbp::testing {

std::vector<double> simulate_arch(const ArchParams& p, std::size_t n, std::uint64_t seed) {
  Random rng(seed);
  std::vector<double> y;
  y.reserve(n);
  double prev = p.theta1;
  for (std::size_t t = 0; t < n + 500; ++t) {
    const double d = prev - p.theta1;
    prev = p.theta1 + std::sqrt(p.theta2 + p.theta3 * d * d) * rng.normal();
    if (t >= 500) y.push_back(prev);
  }
  return y;
}

std::vector<double> simulate_garch(const GarchParams& p, std::size_t n, std::uint64_t seed) {
  Random rng(seed);
  std::vector<double> y;
  y.reserve(n);
  double s2 = p.theta2 / (1.0 - p.theta3 - p.theta4);
  double prev = p.theta1;
  for (std::size_t t = 0; t < n + 500; ++t) {
    const double d = prev - p.theta1;
    s2 = p.theta2 + p.theta3 * d * d + p.theta4 * s2;
    prev = p.theta1 + std::sqrt(s2) * rng.normal();
    if (t >= 500) y.push_back(prev);
  }
  return y;
}

std::vector<double> simulate_annual(std::size_t n, std::uint64_t seed) {
  Random rng(seed);
  std::student_t_distribution<double> shock(3.0);
  double level = 1000.0 + 4000.0 * rng.uniform();
  double slope = level * (0.01 + 0.05 * rng.uniform());
  const double noise = level * (0.01 + 0.03 * rng.uniform());
  std::vector<double> y(n);
  for (std::size_t t = 0; t < n; ++t) {
    if (rng.uniform() < 0.08) slope *= 0.2 + 1.4 * rng.uniform();
    slope += 0.1 * noise * shock(rng.engine());
    level += slope;
    y[t] = level + noise * shock(rng.engine());
  }
  return y;
}

double oracle_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double oracle_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + h * i);
  return s * h / 3.0;
}

double oracle_crps(const std::function<double(double)>& cdf, double y, double lo, double hi) {
  const double a = std::min(lo, y), b = std::max(hi, y);
  auto below = [&](double x) { return cdf(x) * cdf(x); };
  auto above = [&](double x) { return (1.0 - cdf(x)) * (1.0 - cdf(x)); };
  double s = 0.0;
  if (y > a) s += simpson(below, a, y, 20000);
  if (b > y) s += simpson(above, y, b, 20000);
  return -s;
}

namespace {

double adaptive(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

}  // namespace

double oracle_skew_normal_cdf(double gamma, double x) {
  const double delta = gamma / std::sqrt(1.0 + gamma * gamma);
  const double mean_raw = delta * std::sqrt(2.0 / M_PI);
  const double sd_raw = std::sqrt(1.0 - mean_raw * mean_raw);
  const double z = mean_raw + sd_raw * x;  // raw coordinate
  auto dens = [gamma](double u) { return 2.0 * oracle_normal_pdf(u) * oracle_normal_cdf(gamma * u); };
  const double lo = -12.0;
  if (z <= lo) return 0.0;
  double total = 0.0;
  const int pieces = 64;
  const double h = (z - lo) / pieces;
  for (int i = 0; i < pieces; ++i) {
    const double a = lo + h * i, b = a + h;
    const double fa = dens(a), fb = dens(b), fm = dens(0.5 * (a + b));
    total += adaptive(dens, a, b, fa, fm, fb, h / 6.0 * (fa + 4.0 * fm + fb), 1e-14, 30);
  }
  return total;
}

double oracle_type7(std::vector<double> x, double p) {
  std::sort(x.begin(), x.end());
  const double h = (static_cast<double>(x.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

double tv_distance(const std::function<double(double)>& p, const std::function<double(double)>& q,
                   double lo, double hi, std::size_t points) {
  const double h = (hi - lo) / static_cast<double>(points - 1);
  double s = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double x = lo + h * static_cast<double>(i);
    const double w = (i == 0 || i + 1 == points) ? 0.5 : 1.0;
    s += w * std::abs(p(x) - q(x));
  }
  return 0.5 * s * h;
}

}  // namespace fbp::testing
