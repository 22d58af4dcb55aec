#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "families.hpp"
#include "optimize.hpp"
#include "parallel.hpp"
#include "vinecop/dependence.hpp"
#include "vinecop/error.hpp"
#include "vinecop/fit.hpp"

namespace vinecop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Data mapped into the orientation of the unrotated family, clamped.
struct Oriented {
  std::vector<double> a;
  std::vector<double> b;
};

Oriented orient(std::span<const double> u1, std::span<const double> u2, Rotation r) {
  Oriented o{std::vector<double>(u1.size()), std::vector<double>(u2.size())};
  const bool flip1 = r == Rotation::R90 || r == Rotation::R180;
  const bool flip2 = r == Rotation::R180 || r == Rotation::R270;
  for (std::size_t i = 0; i < u1.size(); ++i) {
    o.a[i] = clamp_unit(flip1 ? 1.0 - u1[i] : u1[i]);
    o.b[i] = clamp_unit(flip2 ? 1.0 - u2[i] : u2[i]);
  }
  return o;
}

double base_loglik(const detail::Kernel& k, const Oriented& d) {
  double ll = 0.0;
  for (std::size_t i = 0; i < d.a.size(); ++i) ll += detail::base_log_pdf(k, d.a[i], d.b[i]);
  return ll;
}

std::vector<double> fit_gaussian(const Oriented& d) {
  double s = 0.0, p = 0.0;
  for (std::size_t i = 0; i < d.a.size(); ++i) {
    const double x = detail::normal_quantile(d.a[i]);
    const double y = detail::normal_quantile(d.b[i]);
    s += x * x + y * y;
    p += x * y;
  }
  const double n = static_cast<double>(d.a.size());
  auto negll = [&](double r) {
    const double r2 = 1.0 - r * r;
    return 0.5 * n * std::log(r2) + (r * r * s - 2.0 * r * p) / (2.0 * r2);
  };
  const auto b = fit_bounds(Family::Gaussian);
  return detail::minimize_1d(negll, b.lower[0], b.upper[0]).x;
}

// Profile likelihood: outer search over nu, inner search over rho with the
// t-scores for that nu held fixed.
std::vector<double> fit_student(const Oriented& d) {
  const std::size_t n = d.a.size();
  std::vector<double> uniq(d.a);
  uniq.insert(uniq.end(), d.b.begin(), d.b.end());
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  auto index = [&](double v) {
    return static_cast<std::size_t>(std::lower_bound(uniq.begin(), uniq.end(), v) - uniq.begin());
  };
  std::vector<std::size_t> ia(n), ib(n);
  for (std::size_t i = 0; i < n; ++i) {
    ia[i] = index(d.a[i]);
    ib[i] = index(d.b[i]);
  }

  const auto bounds = fit_bounds(Family::StudentT);
  std::vector<double> scores(uniq.size()), x(n), y(n);
  double best_rho = 0.0;
  auto profile = [&](double nu) {
    for (std::size_t k = 0; k < uniq.size(); ++k) scores[k] = detail::student_quantile(nu, uniq[k]);
    double margins = 0.0;
    const double mc = std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0) - 0.5 * std::log(nu * std::numbers::pi);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = scores[ia[i]];
      y[i] = scores[ib[i]];
      margins += 2.0 * mc - (nu + 1.0) / 2.0 * (std::log1p(x[i] * x[i] / nu) + std::log1p(y[i] * y[i] / nu));
    }
    const double jc = std::lgamma((nu + 2.0) / 2.0) - std::lgamma(nu / 2.0) - std::log(nu * std::numbers::pi);
    auto negll = [&](double r) {
      const double r2 = 1.0 - r * r;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        acc += std::log1p((x[i] * x[i] - 2.0 * r * x[i] * y[i] + y[i] * y[i]) / (nu * r2));
      const double ll = static_cast<double>(n) * (jc - 0.5 * std::log(r2)) - (nu + 2.0) / 2.0 * acc - margins;
      return -ll;
    };
    const auto inner = detail::minimize_1d(negll, bounds.lower[0], bounds.upper[0]);
    best_rho = inner.x[0];
    return inner.value;
  };
  const auto outer = detail::minimize_1d(profile, bounds.lower[1], bounds.upper[1], 1e-4);
  profile(outer.x[0]);
  return {best_rho, outer.x[0]};
}

std::vector<double> fit_one_parameter(Family family, Rotation rotation, const Oriented& d,
                                      double tau_hat) {
  auto b = fit_bounds(family);
  double lo = b.lower[0], hi = b.upper[0];
  if (family == Family::Frank) {
    if (tau_hat >= 0.0) {
      lo = 1e-6;
    } else {
      hi = -1e-6;
    }
  }
  auto negll = [&](double p) { return -base_loglik(detail::Kernel{family, p, 0.0}, d); };
  auto res = detail::minimize_1d(negll, lo, hi);
  try {
    const auto start = params_from_tau(family, rotation, tau_hat);
    double p0 = start.params()[0];
    if (family == Family::Frank) p0 = std::abs(p0) * (tau_hat >= 0.0 ? 1.0 : -1.0);
    if (p0 >= lo && p0 <= hi) {
      const double v0 = negll(p0);
      if (v0 < res.value) res.x = {p0};
    }
  } catch (const Error&) {
  }
  return res.x;
}

std::vector<double> fit_two_parameter(Family family, const Oriented& d) {
  const auto b = fit_bounds(family);
  std::vector<double> start = family == Family::BB1 ? std::vector<double>{1.5, 0.5}
                                                     : std::vector<double>{1.0, 1.5};
  auto negll = [&](std::span<const double> p) {
    return -base_loglik(detail::Kernel{family, p[0], p[1]}, d);
  };
  return detail::nelder_mead(negll, start, b.lower, b.upper, 500).x;
}

CandidateFit fit_candidate(const Candidate& c, std::span<const double> u1,
                           std::span<const double> u2, double tau_hat) {
  CandidateFit fit;
  const std::size_t n = u1.size();
  try {
    std::vector<double> params;
    if (c.family != Family::Independence) {
      const Oriented d = orient(u1, u2, c.rotation);
      switch (c.family) {
        case Family::Gaussian:
          params = fit_gaussian(d);
          break;
        case Family::StudentT:
          params = fit_student(d);
          break;
        case Family::BB1:
        case Family::BB7:
          params = fit_two_parameter(c.family, d);
          break;
        default:
          params = fit_one_parameter(c.family, c.rotation, d, tau_hat);
          break;
      }
    }
    fit.copula = PairCopula(c.family, c.rotation, params);
    fit.loglik = fit.copula.log_likelihood(u1, u2);
    fit.ok = std::isfinite(fit.loglik);
  } catch (const Error&) {
    fit.ok = false;
  }
  if (!fit.ok) fit.loglik = -kInf;
  const int k = parameter_count(c.family);
  fit.aic = criterion_value(Criterion::AIC, fit.loglik, k, n);
  fit.bic = criterion_value(Criterion::BIC, fit.loglik, k, n);
  return fit;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

}  // namespace

std::string_view criterion_name(Criterion c) {
  switch (c) {
    case Criterion::AIC:
      return "aic";
    case Criterion::BIC:
      return "bic";
    case Criterion::LogLik:
      return "loglik";
  }
  return "?";
}

Criterion criterion_from_name(std::string_view name) {
  const auto key = lower(name);
  if (key == "aic") return Criterion::AIC;
  if (key == "bic") return Criterion::BIC;
  if (key == "loglik") return Criterion::LogLik;
  throw ParseError("unknown selection criterion '" + std::string(name) + "'");
}

double criterion_value(Criterion c, double loglik, int nparams, std::size_t n) {
  switch (c) {
    case Criterion::AIC:
      return -2.0 * loglik + 2.0 * nparams;
    case Criterion::BIC:
      return -2.0 * loglik + std::log(static_cast<double>(n)) * nparams;
    case Criterion::LogLik:
      return -loglik;
  }
  return kInf;
}

std::vector<Candidate> candidates_for(std::span<const Family> families) {
  std::vector<Candidate> out;
  for (Family f : families) {
    if (rotation_is_redundant(f)) {
      out.push_back({f, Rotation::R0});
    } else {
      for (Rotation r : {Rotation::R0, Rotation::R90, Rotation::R180, Rotation::R270})
        out.push_back({f, r});
    }
  }
  return out;
}

std::vector<Candidate> all_candidates() {
  const Family all[] = {Family::Independence, Family::Gaussian, Family::StudentT,
                        Family::Clayton,      Family::Gumbel,   Family::Frank,
                        Family::Joe,          Family::BB1,      Family::BB7};
  return candidates_for(all);
}

PairFit fit_pair(std::span<const double> u1, std::span<const double> u2,
                 const PairFitOptions& options) {
  if (u1.size() != u2.size()) throw Error(ErrorCode::InvalidArgument, "fit_pair: length mismatch");
  if (u1.size() < 10) throw Error(ErrorCode::InvalidArgument, "fit_pair: need n >= 10");
  for (std::size_t i = 0; i < u1.size(); ++i) {
    if (!(u1[i] > 0.0 && u1[i] < 1.0 && u2[i] > 0.0 && u2[i] < 1.0)) {
      throw DomainError("fit_pair: observation " + std::to_string(i + 1) + " is outside (0,1)");
    }
  }
  const double tau_hat = kendall_tau(u1, u2);
  const bool negative = tau_hat < 0.0;

  std::vector<Candidate> todo{{Family::Independence, Rotation::R0}};
  for (Candidate c : options.candidates) {
    if (rotation_is_redundant(c.family)) {
      c.rotation = Rotation::R0;
    } else {
      const bool rot_negative = c.rotation == Rotation::R90 || c.rotation == Rotation::R270;
      if (rot_negative != negative) continue;
    }
    if (std::find(todo.begin(), todo.end(), c) == todo.end()) todo.push_back(c);
  }

  PairFit out;
  out.report.resize(todo.size());
  detail::parallel_for(todo.size(), options.threads, [&](std::size_t i) {
    out.report[i] = fit_candidate(todo[i], u1, u2, tau_hat);
  });

  double best = kInf;
  bool any_ok = false;
  for (std::size_t i = 0; i < out.report.size(); ++i) {
    const auto& r = out.report[i];
    if (i > 0 && r.ok) any_ok = true;
    if (!r.ok) continue;
    const double v = criterion_value(options.criterion, r.loglik, r.copula.parameter_count(), u1.size());
    if (v < best) {
      best = v;
      out.selected = i;
    }
  }
  out.all_failed = todo.size() > 1 && !any_ok;
  out.copula = out.report[out.selected].copula;
  out.loglik = out.report[out.selected].loglik;
  return out;
}

PairFit fit_pair(const DataMatrix& u, const PairFitOptions& options) {
  if (u.cols() != 2) throw Error(ErrorCode::InvalidArgument, "fit_pair: need exactly 2 columns");
  const auto a = u.column(0);
  const auto b = u.column(1);
  return fit_pair(a, b, options);
}

}  // namespace vinecop
