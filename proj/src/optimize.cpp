#include "optimize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include <boost/math/tools/minima.hpp>

namespace vinecop::detail {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

OptimResult minimize_1d(const std::function<double(double)>& f, double lo, double hi,
                        double x_tol) {
  OptimResult res;
  auto g = [&](double x) {
    ++res.evaluations;
    const double v = f(x);
    return std::isnan(v) ? kInf : v;
  };
  // brent_find_minima stops at a relative tolerance of 2^(1 - bits).
  const int bits = std::clamp(static_cast<int>(std::ceil(1.0 - std::log2(x_tol))), 8, 40);
  std::uintmax_t max_iter = 200;
  const auto [x, fx] = boost::math::tools::brent_find_minima(g, lo, hi, bits, max_iter);
  res.x = {x};
  res.value = fx;
  res.converged = max_iter < 200 && std::isfinite(fx);
  return res;
}

OptimResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                        std::vector<double> start, std::span<const double> lower,
                        std::span<const double> upper, int max_evaluations, double f_tol) {
  const std::size_t n = start.size();
  OptimResult res;
  auto eval = [&](const std::vector<double>& x) {
    ++res.evaluations;
    for (std::size_t i = 0; i < n; ++i)
      if (!(x[i] >= lower[i] && x[i] <= upper[i])) return kInf;
    const double v = f(x);
    return std::isnan(v) ? kInf : v;
  };

  std::vector<double> best = std::move(start);
  double best_value = kInf;
  bool converged = false;

  for (int restart = 0; restart < 2 && res.evaluations < max_evaluations; ++restart) {
    std::vector<std::vector<double>> simplex(n + 1, best);
    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
      double step = 0.1 * (upper[i] - lower[i]);
      if (restart > 0) step *= 0.2;
      if (simplex[i + 1][i] + step > upper[i]) step = -step;
      simplex[i + 1][i] += step;
    }
    for (std::size_t i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

    converged = false;
    while (res.evaluations < max_evaluations) {
      std::vector<std::size_t> order(n + 1);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
      std::vector<std::vector<double>> s2;
      std::vector<double> v2;
      for (auto k : order) {
        s2.push_back(simplex[k]);
        v2.push_back(values[k]);
      }
      simplex.swap(s2);
      values.swap(v2);

      const double spread = std::abs(values[n] - values[0]);
      if (std::isfinite(values[n]) &&
          spread <= f_tol * (std::abs(values[0]) + std::abs(values[n]) + 1e-12)) {
        converged = true;
        break;
      }

      std::vector<double> centroid(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / static_cast<double>(n);
      auto along = [&](double t) {
        std::vector<double> p(n);
        for (std::size_t k = 0; k < n; ++k) p[k] = centroid[k] + t * (simplex[n][k] - centroid[k]);
        return p;
      };

      auto reflected = along(-1.0);
      const double fr = eval(reflected);
      if (fr < values[0]) {
        auto expanded = along(-2.0);
        const double fe = eval(expanded);
        if (fe < fr) {
          simplex[n] = expanded;
          values[n] = fe;
        } else {
          simplex[n] = reflected;
          values[n] = fr;
        }
      } else if (fr < values[n - 1]) {
        simplex[n] = reflected;
        values[n] = fr;
      } else {
        const bool outside = fr < values[n];
        auto contracted = along(outside ? -0.5 : 0.5);
        const double fc = eval(contracted);
        if (fc < std::min(fr, values[n])) {
          simplex[n] = contracted;
          values[n] = fc;
        } else {
          for (std::size_t i = 1; i <= n; ++i) {
            for (std::size_t k = 0; k < n; ++k)
              simplex[i][k] = simplex[0][k] + 0.5 * (simplex[i][k] - simplex[0][k]);
            values[i] = eval(simplex[i]);
          }
        }
      }
    }
    const auto it = std::min_element(values.begin(), values.end());
    const auto idx = static_cast<std::size_t>(it - values.begin());
    if (*it <= best_value) {
      best_value = *it;
      best = simplex[idx];
    }
  }
  res.x = best;
  res.value = best_value;
  res.converged = converged && std::isfinite(best_value);
  return res;
}

}  // namespace vinecop::detail
