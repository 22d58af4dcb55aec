#include "families.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/owens_t.hpp>
#include <boost/math/special_functions/polygamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "vinecop/error.hpp"

namespace vinecop::detail {

namespace {

// Evaluate in double; the default policy promotes to long double.
using DoublePolicy = boost::math::policies::policy<boost::math::policies::promote_double<false>>;

constexpr double kLogCap = 23.025850929940457;  // log(1e10)

double log_sum_exp(double a, double b) {
  const double m = std::max(a, b);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// log(1 - e^x) for x < 0.
double log1mexp(double x) {
  return x > -std::numbers::ln2 ? std::log(-std::expm1(x)) : std::log1p(-std::exp(x));
}

// a + b - ab for a, b in [0, 1], evaluated on whichever side loses less.
double joe_sum(double l1u, double l1v, double d) {
  const double a = std::exp(d * l1u), b = std::exp(d * l1v);
  if (a + b < 1.0) return a + b - a * b;
  return 1.0 - std::expm1(d * l1u) * std::expm1(d * l1v);
}

// Bivariate normal cdf through Owen's T function.
double gaussian_cdf(double rho, double u, double v) {
  using boost::math::owens_t;
  double h = normal_quantile(u), k = normal_quantile(v);
  if (h == 0.0 && k == 0.0) return 0.25 + std::asin(rho) / (2.0 * std::numbers::pi);
  if (h == 0.0) std::swap(h, k);
  const double s = std::sqrt(1.0 - rho * rho);
  auto t = [&](double a, double num) {
    // T(a, num / (a * s)), with a == 0 read as a -> 0+.
    if (a == 0.0) return num > 0.0 ? 0.25 : (num < 0.0 ? -0.25 : 0.0);
    return owens_t(a, num / (a * s));
  };
  double c = 0.5 * normal_cdf(h) + 0.5 * normal_cdf(k) - t(h, k - rho * h) - t(k, h - rho * k);
  if (h * k < 0.0 || (h * k == 0.0 && h + k < 0.0)) c -= 0.5;
  return clamp01(c);
}

// Bivariate t cdf: the conditional t cdf integrated against the t density of
// the second score, from the nearer tail.
double student_cdf2(double rho, double nu, double u, double v) {
  using boost::math::quadrature::gauss_kronrod;
  const double x = student_quantile(nu, u), y = student_quantile(nu, v);
  const boost::math::students_t_distribution<double, DoublePolicy> t_nu(nu);
  const boost::math::students_t_distribution<double, DoublePolicy> t_nu1(nu + 1.0);
  const double r2 = 1.0 - rho * rho;
  auto integrand = [&](double s) {
    const double scale = std::sqrt((nu + s * s) * r2 / (nu + 1.0));
    return boost::math::cdf(t_nu1, (x - rho * s) / scale) * boost::math::pdf(t_nu, s);
  };
  const double inf = std::numeric_limits<double>::infinity();
  if (y <= 0.0) return clamp01(gauss_kronrod<double, 31>::integrate(integrand, -inf, y, 10, 1e-13));
  return clamp01(u - gauss_kronrod<double, 31>::integrate(integrand, y, inf, 10, 1e-13));
}

// Debye function of order one, (1/x) * int_0^x t / (e^t - 1) dt, for x > 0.
double debye1(double x) {
  using boost::math::quadrature::gauss_kronrod;
  auto f = [](double t) { return t == 0.0 ? 1.0 : t / std::expm1(t); };
  return gauss_kronrod<double, 31>::integrate(f, 0.0, x, 15, 1e-14) / x;
}

double frank_tau(double delta) {
  const double a = std::abs(delta);
  if (a < 1e-5) return delta / 9.0;
  const double t = 1.0 - 4.0 / a + 4.0 * debye1(a) / a;
  return delta > 0 ? t : -t;
}

double joe_tau(double delta) {
  using boost::math::digamma;
  using boost::math::polygamma;
  using boost::math::trigamma;
  if (std::abs(delta - 2.0) < 1e-4) {
    const double eps = (2.0 - delta) / delta;
    return 1.0 - (2.0 / delta) * (trigamma(2.0) + polygamma(2, 2.0) * eps / 2.0);
  }
  return 1.0 + 2.0 / (2.0 - delta) * (digamma(2.0) - digamma(2.0 / delta + 1.0));
}

// 1 + 4 * int_0^1 phi(t) / phi'(t) dt with phi(t) = (1 - (1-t)^theta)^(-delta) - 1.
double bb7_tau(double delta, double theta) {
  using boost::math::quadrature::gauss_kronrod;
  auto f = [&](double t) {
    const double s = 1.0 - t;
    if (s <= 0.0) return 0.0;
    const double a = -std::expm1(theta * std::log(s));
    const double num = a - std::pow(a, delta + 1.0);
    return -num / (delta * theta * std::pow(s, theta - 1.0));
  };
  return 1.0 + 4.0 * gauss_kronrod<double, 31>::integrate(f, 0.0, 1.0, 20, 1e-13);
}

// Newton steps inside a shrinking bisection bracket on [0, 1].
double solve_hinv_numeric(const Kernel& k, double p, double v) {
  double lo = 0.0;
  double hi = 1.0;
  double u = std::clamp(p, kUnitClamp, 1.0 - kUnitClamp);
  for (int iter = 0; iter < 100; ++iter) {
    const double uc = std::clamp(u, kUnitClamp, 1.0 - kUnitClamp);
    const double r = base_hfunc(k, uc, v) - p;
    if (r == 0.0) return u;
    if (r > 0.0) {
      hi = u;
    } else {
      lo = u;
    }
    if (hi - lo < 1e-10) break;
    const double d = std::exp(base_log_pdf(k, uc, v));
    double next = u - r / d;
    if (!std::isfinite(next) || next <= lo || next >= hi) {
      next = 0.5 * (lo + hi);
    } else if (std::abs(next - u) < 1e-13) {
      return next;
    }
    u = next;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double normal_quantile(double p) {
  static const boost::math::normal_distribution<double, DoublePolicy> n;
  return boost::math::quantile(n, p);
}

double normal_cdf(double x) {
  static const boost::math::normal_distribution<double, DoublePolicy> n;
  return boost::math::cdf(n, x);
}

double student_quantile(double nu, double p) {
  return boost::math::quantile(boost::math::students_t_distribution<double, DoublePolicy>(nu), p);
}

double student_cdf(double nu, double x) {
  return boost::math::cdf(boost::math::students_t_distribution<double, DoublePolicy>(nu), x);
}

double student_log_pdf_scores(double rho, double nu, double x, double y) {
  const double r2 = 1.0 - rho * rho;
  const double q = (x * x - 2.0 * rho * x * y + y * y) / (nu * r2);
  const double joint = std::lgamma((nu + 2.0) / 2.0) - std::lgamma(nu / 2.0) -
                       std::log(nu * std::numbers::pi) - 0.5 * std::log(r2) -
                       (nu + 2.0) / 2.0 * std::log1p(q);
  const double margin_const = std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0) -
                              0.5 * std::log(nu * std::numbers::pi);
  const double mx = margin_const - (nu + 1.0) / 2.0 * std::log1p(x * x / nu);
  const double my = margin_const - (nu + 1.0) / 2.0 * std::log1p(y * y / nu);
  return joint - mx - my;
}

Kernel make_kernel(Family family, const std::vector<double>& params) {
  Kernel k{family, 0.0, 0.0};
  if (!params.empty()) k.p0 = params[0];
  if (params.size() > 1) k.p1 = params[1];
  return k;
}

double base_cdf(const Kernel& k, double u, double v) {
  switch (k.family) {
    case Family::Independence:
      return u * v;
    case Family::Gaussian:
      return gaussian_cdf(k.p0, u, v);
    case Family::StudentT:
      return student_cdf2(k.p0, k.p1, u, v);
    case Family::Clayton: {
      const double d = k.p0;
      const double ls = std::log1p(std::expm1(-d * std::log(u)) + std::expm1(-d * std::log(v)));
      return std::exp(-ls / d);
    }
    case Family::Gumbel: {
      const double d = k.p0;
      const double ls = log_sum_exp(d * std::log(-std::log(u)), d * std::log(-std::log(v)));
      return std::exp(-std::exp(ls / d));
    }
    case Family::Frank: {
      const double d = k.p0;
      const double num = std::expm1(-d * u) * std::expm1(-d * v) / std::expm1(-d);
      return clamp01(-std::log1p(num) / d);
    }
    case Family::Joe: {
      const double d = k.p0;
      return clamp01(1.0 - std::pow(joe_sum(std::log1p(-u), std::log1p(-v), d), 1.0 / d));
    }
    case Family::BB1: {
      const double d = k.p0, th = k.p1;
      const double lx = std::log(std::expm1(-th * std::log(u)));
      const double ly = std::log(std::expm1(-th * std::log(v)));
      const double t = std::exp(log_sum_exp(d * lx, d * ly) / d);
      return std::exp(-std::log1p(t) / th);
    }
    case Family::BB7: {
      const double d = k.p0, th = k.p1;
      const double la = log1mexp(th * std::log1p(-u));
      const double lb = log1mexp(th * std::log1p(-v));
      const double lw = std::log1p(std::expm1(-d * la) + std::expm1(-d * lb));
      const double one_minus_z = -std::expm1(-lw / d);
      return clamp01(1.0 - std::pow(one_minus_z, 1.0 / th));
    }
  }
  return 0.0;
}

double base_log_pdf(const Kernel& k, double u, double v) {
  double lp = 0.0;
  switch (k.family) {
    case Family::Independence:
      return 0.0;
    case Family::Gaussian: {
      const double r = k.p0;
      const double x = normal_quantile(u), y = normal_quantile(v);
      const double r2 = 1.0 - r * r;
      lp = -0.5 * std::log(r2) - (r * r * (x * x + y * y) - 2.0 * r * x * y) / (2.0 * r2);
      break;
    }
    case Family::StudentT: {
      const double x = student_quantile(k.p1, u), y = student_quantile(k.p1, v);
      lp = student_log_pdf_scores(k.p0, k.p1, x, y);
      break;
    }
    case Family::Clayton: {
      const double d = k.p0;
      const double lu = std::log(u), lv = std::log(v);
      const double ls = std::log1p(std::expm1(-d * lu) + std::expm1(-d * lv));
      lp = std::log1p(d) + (-1.0 - d) * (lu + lv) + (-1.0 / d - 2.0) * ls;
      break;
    }
    case Family::Gumbel: {
      const double d = k.p0;
      const double lu = std::log(u), lv = std::log(v);
      const double lx = std::log(-lu), ly = std::log(-lv);
      const double ls = log_sum_exp(d * lx, d * ly);
      const double a = std::exp(ls / d);
      lp = -a - lu - lv + (d - 1.0) * (lx + ly) + (2.0 / d - 2.0) * ls + std::log1p((d - 1.0) / a);
      break;
    }
    case Family::Frank: {
      const double d = k.p0;
      const double em = std::expm1(-d);
      const double den = em + std::expm1(-d * u) * std::expm1(-d * v);
      lp = std::log(-d * em) - d * (u + v) - 2.0 * std::log(std::abs(den));
      break;
    }
    case Family::Joe: {
      const double d = k.p0;
      const double l1u = std::log1p(-u), l1v = std::log1p(-v);
      const double s = joe_sum(l1u, l1v, d);
      lp = (1.0 / d - 2.0) * std::log(s) + (d - 1.0) * (l1u + l1v) + std::log(d - 1.0 + s);
      break;
    }
    case Family::BB1: {
      const double d = k.p0, th = k.p1;
      const double lu = std::log(u), lv = std::log(v);
      const double lx = std::log(std::expm1(-th * lu));
      const double ly = std::log(std::expm1(-th * lv));
      const double ls = log_sum_exp(d * lx, d * ly);
      const double t = std::exp(ls / d);
      lp = (-th - 1.0) * (lu + lv) + (d - 1.0) * (lx + ly) + (-1.0 / th - 2.0) * std::log1p(t) +
           (1.0 / d - 2.0) * ls + std::log(th * (d - 1.0) + (th * d + 1.0) * t);
      break;
    }
    case Family::BB7: {
      const double d = k.p0, th = k.p1;
      const double l1u = std::log1p(-u), l1v = std::log1p(-v);
      const double la = log1mexp(th * l1u);
      const double lb = log1mexp(th * l1v);
      const double lw = std::log1p(std::expm1(-d * la) + std::expm1(-d * lb));
      const double z = std::exp(-lw / d);
      const double one_minus_z = -std::expm1(-lw / d);
      lp = (-d - 1.0) * (la + lb) + (th - 1.0) * (l1u + l1v) +
           (1.0 / th - 2.0) * std::log(one_minus_z) + (-1.0 / d - 2.0) * lw +
           std::log((th - 1.0) * z + th * (1.0 + d) * one_minus_z);
      break;
    }
  }
  if (std::isnan(lp)) return -std::numeric_limits<double>::infinity();
  return std::min(lp, kLogCap);
}

double base_hfunc(const Kernel& k, double u, double v) {
  double h = 0.0;
  switch (k.family) {
    case Family::Independence:
      return u;
    case Family::Gaussian: {
      const double r = k.p0;
      h = normal_cdf((normal_quantile(u) - r * normal_quantile(v)) / std::sqrt(1.0 - r * r));
      break;
    }
    case Family::StudentT: {
      const double r = k.p0, nu = k.p1;
      const double x = student_quantile(nu, u), y = student_quantile(nu, v);
      const double scale = std::sqrt((nu + y * y) * (1.0 - r * r) / (nu + 1.0));
      h = student_cdf(nu + 1.0, (x - r * y) / scale);
      break;
    }
    case Family::Clayton: {
      const double d = k.p0;
      const double lv = std::log(v);
      const double ls = std::log1p(std::expm1(-d * std::log(u)) + std::expm1(-d * lv));
      h = std::exp((-d - 1.0) * lv + (-1.0 / d - 1.0) * ls);
      break;
    }
    case Family::Gumbel: {
      const double d = k.p0;
      const double lv = std::log(v);
      const double ly = std::log(-lv);
      const double ls = log_sum_exp(d * std::log(-std::log(u)), d * ly);
      const double a = std::exp(ls / d);
      h = std::exp(-a + (1.0 / d - 1.0) * ls + (d - 1.0) * ly - lv);
      break;
    }
    case Family::Frank: {
      const double d = k.p0;
      const double a = std::expm1(-d * u), b = std::expm1(-d * v);
      h = std::exp(-d * v) * a / (std::expm1(-d) + a * b);
      break;
    }
    case Family::Joe: {
      const double d = k.p0;
      const double l1v = std::log1p(-v);
      const double l1u = std::log1p(-u);
      const double s = joe_sum(l1u, l1v, d);
      h = std::exp((1.0 / d - 1.0) * std::log(s) + (d - 1.0) * l1v) * -std::expm1(d * l1u);
      break;
    }
    case Family::BB1: {
      const double d = k.p0, th = k.p1;
      const double lv = std::log(v);
      const double lx = std::log(std::expm1(-th * std::log(u)));
      const double ly = std::log(std::expm1(-th * lv));
      const double ls = log_sum_exp(d * lx, d * ly);
      const double t = std::exp(ls / d);
      h = std::exp((-1.0 / th - 1.0) * std::log1p(t) + (1.0 / d - 1.0) * ls + (d - 1.0) * ly +
                   (-th - 1.0) * lv);
      break;
    }
    case Family::BB7: {
      const double d = k.p0, th = k.p1;
      const double l1v = std::log1p(-v);
      const double la = log1mexp(th * std::log1p(-u));
      const double lb = log1mexp(th * l1v);
      const double lw = std::log1p(std::expm1(-d * la) + std::expm1(-d * lb));
      const double one_minus_z = -std::expm1(-lw / d);
      h = std::exp((1.0 / th - 1.0) * std::log(one_minus_z) + (-1.0 / d - 1.0) * lw +
                   (-d - 1.0) * lb + (th - 1.0) * l1v);
      break;
    }
  }
  if (std::isnan(h)) return u;
  return clamp01(h);
}

double base_hinv(const Kernel& k, double p, double v) {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  switch (k.family) {
    case Family::Independence:
      return p;
    case Family::Gaussian: {
      const double r = k.p0;
      return normal_cdf(normal_quantile(p) * std::sqrt(1.0 - r * r) + r * normal_quantile(v));
    }
    case Family::StudentT: {
      const double r = k.p0, nu = k.p1;
      const double y = student_quantile(nu, v);
      const double scale = std::sqrt((nu + y * y) * (1.0 - r * r) / (nu + 1.0));
      return student_cdf(nu, student_quantile(nu + 1.0, p) * scale + r * y);
    }
    case Family::Clayton: {
      const double d = k.p0;
      const double lv = std::log(v);
      const double ls = -d / (1.0 + d) * (std::log(p) + (d + 1.0) * lv);
      const double base = std::exp(ls) - std::expm1(-d * lv);
      return clamp01(std::exp(-std::log(base) / d));
    }
    case Family::Frank: {
      const double d = k.p0;
      const double a = p * std::expm1(-d) / (p - std::exp(-d * v) * (p - 1.0));
      return clamp01(-std::log1p(a) / d);
    }
    default:
      return solve_hinv_numeric(k, p, v);
  }
}

double base_tau(const Kernel& k) {
  switch (k.family) {
    case Family::Independence:
      return 0.0;
    case Family::Gaussian:
    case Family::StudentT:
      return 2.0 / std::numbers::pi * std::asin(k.p0);
    case Family::Clayton:
      return k.p0 / (k.p0 + 2.0);
    case Family::Gumbel:
      return 1.0 - 1.0 / k.p0;
    case Family::Frank:
      return frank_tau(k.p0);
    case Family::Joe:
      return joe_tau(k.p0);
    case Family::BB1:
      return 1.0 - 2.0 / (k.p0 * (k.p1 + 2.0));
    case Family::BB7:
      return bb7_tau(k.p0, k.p1);
  }
  return 0.0;
}

}  // namespace vinecop::detail
