#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace fbp {

struct SimplexOptions {
  int max_iterations = 2000;     // per start
  double relative_ftol = 1e-10;
  int starts = 3;                // the initial point plus jittered copies
  double initial_step = 0.5;     // simplex edge in the unconstrained space
  double jitter = 0.3;
  std::uint64_t seed = 20200101;
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Derivative-free Nelder-Mead minimisation of f over R^d. Non-finite values
// of f are treated as +inf. Throws ConvergenceError (carrying the best point)
// when no start meets the tolerance within the iteration cap.
SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                          std::vector<double> x0, const SimplexOptions& options = {});

// Reparameterisation helpers for constrained parameters.
double logistic(double u) noexcept;
double logit(double p) noexcept;
// Maps R onto (lo, hi).
double to_interval(double u, double lo, double hi) noexcept;
double from_interval(double x, double lo, double hi) noexcept;

}  // namespace fbp
