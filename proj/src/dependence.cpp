#include "vinecop/dependence.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

#include "parallel.hpp"
#include "vinecop/error.hpp"

namespace vinecop {

namespace {

void require_same_length(std::span<const double> x, std::span<const double> y, const char* what) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + ": vectors differ in length");
  }
  if (x.size() < 2) throw Error(ErrorCode::InvalidArgument, std::string(what) + ": need n >= 2");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i])) {
      throw Error(ErrorCode::InvalidArgument, std::string(what) + ": NaN in input");
    }
  }
}

std::int64_t pairs(std::int64_t t) { return t * (t - 1) / 2; }

// Sorts v in place and returns the number of strict inversions.
std::int64_t merge_count(std::vector<double>& v, std::vector<double>& buf, std::size_t lo,
                         std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = merge_count(v, buf, lo, mid) + merge_count(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += static_cast<std::int64_t>(mid - i);
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

std::string fixed2(double v) {
  if (std::abs(v) < 0.005) v = 0.0;
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v;
  return os.str();
}

}  // namespace

std::vector<double> ranks(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && x[order[j]] == x[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) r[order[k]] = avg;
    i = j;
  }
  return r;
}

DataMatrix pseudo_obs(const DataMatrix& x) {
  if (x.rows() < 2) throw Error(ErrorCode::InvalidArgument, "pseudo_obs: need n >= 2");
  DataMatrix u(x.rows(), x.names(), Scale::Copula);
  const double scale = static_cast<double>(x.rows() + 1);
  for (std::size_t j = 0; j < x.cols(); ++j) {
    auto r = ranks(x.column(j));
    for (auto& v : r) v /= scale;
    u.set_column(j, r);
  }
  return u;
}

double tau_b(const TauCounts& c) {
  const double nc = static_cast<double>(c.concordant);
  const double nd = static_cast<double>(c.discordant);
  const double n1 = static_cast<double>(c.tied_x);
  const double n2 = static_cast<double>(c.tied_y);
  const double den = std::sqrt(nc + nd + n1) * std::sqrt(nc + nd + n2);
  if (den == 0.0) {
    throw Error(ErrorCode::UndefinedResult, "Kendall's tau undefined: a variable is constant");
  }
  return (nc - nd) / den;
}

TauCounts kendall_counts(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y, "kendall_tau");
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });

  std::int64_t tied_x_all = 0, tied_both = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && x[order[j]] == x[order[i]]) ++j;
    tied_x_all += pairs(static_cast<std::int64_t>(j - i));
    for (std::size_t a = i; a < j;) {
      std::size_t b = a + 1;
      while (b < j && y[order[b]] == y[order[a]]) ++b;
      tied_both += pairs(static_cast<std::int64_t>(b - a));
      a = b;
    }
    i = j;
  }

  std::vector<double> ys(n), buf(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
  const std::int64_t swaps = merge_count(ys, buf, 0, n);

  std::int64_t tied_y_all = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && ys[j] == ys[i]) ++j;
    tied_y_all += pairs(static_cast<std::int64_t>(j - i));
    i = j;
  }

  const std::int64_t total = pairs(static_cast<std::int64_t>(n));
  TauCounts c;
  c.discordant = swaps;
  c.concordant = total - tied_x_all - tied_y_all + tied_both - swaps;
  c.tied_x = tied_x_all - tied_both;
  c.tied_y = tied_y_all - tied_both;
  return c;
}

double kendall_tau(std::span<const double> x, std::span<const double> y) {
  return tau_b(kendall_counts(x, y));
}

double spearman_rho(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y, "spearman_rho");
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(rx.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mx, dy = ry[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorCode::UndefinedResult, "Spearman's rho undefined: a variable is constant");
  }
  return sxy / (std::sqrt(sxx) * std::sqrt(syy));
}

CorrelationMatrix correlation_matrix(const DataMatrix& x, CorrelationKind kind, unsigned threads) {
  const std::size_t d = x.cols();
  if (d < 2) throw Error(ErrorCode::InvalidArgument, "correlation_matrix: need at least 2 columns");
  CorrelationMatrix m{kind, x.names(), std::vector<double>(d * d, 1.0)};
  std::vector<std::vector<double>> cols(d);
  for (std::size_t j = 0; j < d; ++j) cols[j] = x.column(j);

  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) jobs.emplace_back(i, j);
  std::vector<double> out(jobs.size());
  std::vector<std::string> errors(jobs.size());

  detail::parallel_for(jobs.size(), threads, [&](std::size_t k) {
    const auto [i, j] = jobs[k];
    try {
      out[k] = kind == CorrelationKind::KendallTau ? kendall_tau(cols[i], cols[j])
                                                    : spearman_rho(cols[i], cols[j]);
    } catch (const Error& e) {
      errors[k] = e.what();
    }
  });
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const auto [i, j] = jobs[k];
    if (!errors[k].empty()) {
      throw Error(ErrorCode::UndefinedResult,
                  "columns '" + x.name(i) + "' and '" + x.name(j) + "': " + errors[k]);
    }
    m.values[i * d + j] = m.values[j * d + i] = out[k];
  }
  return m;
}

std::string format_rank_table(const CorrelationMatrix& tau, const CorrelationMatrix& rho) {
  const std::size_t d = tau.dim();
  std::size_t width = 8;
  for (const auto& n : tau.names) width = std::max(width, n.size());
  width += 2;
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(width)) << "tau\\rho";
  for (const auto& n : tau.names) os << std::right << std::setw(static_cast<int>(width)) << n;
  os << '\n';
  for (std::size_t i = 0; i < d; ++i) {
    os << std::left << std::setw(static_cast<int>(width)) << tau.names[i];
    for (std::size_t j = 0; j < d; ++j) {
      const double v = i == j ? 1.0 : (i > j ? tau(i, j) : rho(i, j));
      os << std::right << std::setw(static_cast<int>(width)) << fixed2(v);
    }
    os << '\n';
  }
  return os.str();
}

void jitter_column(DataMatrix& x, std::size_t column, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(-0.5, 0.5);
  for (std::size_t i = 0; i < x.rows(); ++i) x(i, column) += noise(rng);
}

EmpiricalMarginal::EmpiricalMarginal(std::span<const double> sample, std::string name)
    : sorted_(sample.begin(), sample.end()), name_(std::move(name)) {
  std::sort(sorted_.begin(), sorted_.end());
  build_knots();
}

EmpiricalMarginal EmpiricalMarginal::from_sorted(std::vector<double> sorted, std::string name) {
  EmpiricalMarginal m;
  m.sorted_ = std::move(sorted);
  m.name_ = std::move(name);
  if (!std::is_sorted(m.sorted_.begin(), m.sorted_.end())) {
    throw Error(ErrorCode::InvalidArgument, "marginal '" + m.name_ + "': values are not sorted");
  }
  m.build_knots();
  return m;
}

void EmpiricalMarginal::build_knots() {
  if (sorted_.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "marginal '" + name_ + "': need n >= 2");
  }
  for (double v : sorted_) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::InvalidArgument, "marginal '" + name_ + "': non-finite value");
    }
  }
  const std::size_t n = sorted_.size();
  const double scale = static_cast<double>(n + 1);
  knot_x_.clear();
  knot_pos_.clear();
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && sorted_[j] == sorted_[i]) ++j;
    knot_x_.push_back(sorted_[i]);
    knot_pos_.push_back(0.5 * static_cast<double>(i + 1 + j) / scale);
    i = j;
  }
}

double EmpiricalMarginal::cdf(double x) const {
  if (x <= knot_x_.front()) return knot_pos_.front();
  if (x >= knot_x_.back()) return knot_pos_.back();
  const auto it = std::upper_bound(knot_x_.begin(), knot_x_.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - knot_x_.begin());
  const double x0 = knot_x_[j - 1], x1 = knot_x_[j];
  const double t = (x - x0) / (x1 - x0);
  return knot_pos_[j - 1] + t * (knot_pos_[j] - knot_pos_[j - 1]);
}

double EmpiricalMarginal::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("marginal quantile requires p in (0,1), got " + format_number(p));
  }
  const std::size_t n = sorted_.size();
  const double h = p * static_cast<double>(n + 1);
  const double nearest = std::round(h);
  if (std::abs(h - nearest) <= 1e-12 * static_cast<double>(n + 1)) {
    const auto k = static_cast<std::size_t>(std::clamp(nearest, 1.0, static_cast<double>(n)));
    return sorted_[k - 1];
  }
  if (h < 1.0) return sorted_.front();
  if (h >= static_cast<double>(n)) return sorted_.back();
  const auto k = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(k);
  return sorted_[k - 1] + frac * (sorted_[k] - sorted_[k - 1]);
}

double EmpiricalMarginal::density(double x) const {
  const double range = sorted_.back() - sorted_.front();
  const double step = 1e-6 * (range > 0.0 ? range : 1.0);
  return (cdf(x + step) - cdf(x - step)) / (2.0 * step);
}

}  // namespace vinecop
