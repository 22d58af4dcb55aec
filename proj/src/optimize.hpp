#pragma once

#include <functional>
#include <span>
#include <vector>

namespace vinecop::detail {

struct OptimResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Bounded 1-D minimization (Brent: golden section with parabolic steps).
OptimResult minimize_1d(const std::function<double(double)>& f, double lo, double hi,
                        double x_tol = 1e-8);

/// Derivative-free simplex minimization inside a box. Points outside the box
/// evaluate to +inf. Restarts once from the best vertex.
OptimResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                        std::vector<double> start, std::span<const double> lower,
                        std::span<const double> upper, int max_evaluations = 500,
                        double f_tol = 1e-9);

}  // namespace vinecop::detail
