#include "vinecop/pair_copula.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "families.hpp"
#include "vinecop/error.hpp"

namespace vinecop {

namespace {

struct FamilyInfo {
  Family family;
  std::string_view name;
  int nparams;
};

constexpr std::array<FamilyInfo, 9> kFamilies{{
    {Family::Independence, "Independence", 0},
    {Family::Gaussian, "Gaussian", 1},
    {Family::StudentT, "StudentT", 2},
    {Family::Clayton, "Clayton", 1},
    {Family::Gumbel, "Gumbel", 1},
    {Family::Frank, "Frank", 1},
    {Family::Joe, "Joe", 1},
    {Family::BB1, "BB1", 2},
    {Family::BB7, "BB7", 2},
}};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

void require(bool ok, Family f, const std::vector<double>& params, const char* rule) {
  if (ok) return;
  std::ostringstream os;
  os << family_name(f) << " parameters out of domain (" << rule << "):";
  for (double p : params) os << ' ' << p;
  throw DomainError(os.str());
}

void validate(Family f, const std::vector<double>& p) {
  if (static_cast<int>(p.size()) != parameter_count(f)) {
    std::ostringstream os;
    os << family_name(f) << " expects " << parameter_count(f) << " parameter(s), got "
       << p.size();
    throw DomainError(os.str());
  }
  for (double x : p) require(std::isfinite(x), f, p, "finite");
  switch (f) {
    case Family::Independence:
      break;
    case Family::Gaussian:
      require(std::abs(p[0]) < 1.0, f, p, "|rho| < 1");
      break;
    case Family::StudentT:
      require(std::abs(p[0]) < 1.0, f, p, "|rho| < 1");
      require(p[1] > 2.0, f, p, "nu > 2");
      break;
    case Family::Clayton:
      require(p[0] > 0.0, f, p, "delta > 0");
      break;
    case Family::Gumbel:
    case Family::Joe:
      require(p[0] >= 1.0, f, p, "delta >= 1");
      break;
    case Family::Frank:
      require(p[0] != 0.0, f, p, "delta != 0");
      break;
    case Family::BB1:
      require(p[0] >= 1.0, f, p, "delta >= 1");
      require(p[1] > 0.0, f, p, "theta > 0");
      break;
    case Family::BB7:
      require(p[0] > 0.0, f, p, "delta > 0");
      require(p[1] >= 1.0, f, p, "theta >= 1");
      break;
  }
}

bool flips_sign(Rotation r) { return r == Rotation::R90 || r == Rotation::R270; }

}  // namespace

std::string_view family_name(Family family) {
  for (const auto& info : kFamilies)
    if (info.family == family) return info.name;
  return "?";
}

Family family_from_name(std::string_view name) {
  const std::string key = lower(name);
  for (const auto& info : kFamilies)
    if (lower(info.name) == key) return info.family;
  if (key == "indep") return Family::Independence;
  if (key == "gauss" || key == "normal") return Family::Gaussian;
  if (key == "t" || key == "student") return Family::StudentT;
  throw ParseError("unknown copula family '" + std::string(name) + "'");
}

Rotation rotation_from_degrees(int degrees) {
  switch (degrees) {
    case 0:
      return Rotation::R0;
    case 90:
      return Rotation::R90;
    case 180:
      return Rotation::R180;
    case 270:
      return Rotation::R270;
    default:
      throw ParseError("rotation must be one of 0, 90, 180, 270; got " + std::to_string(degrees));
  }
}

int parameter_count(Family family) {
  for (const auto& info : kFamilies)
    if (info.family == family) return info.nparams;
  return 0;
}

bool rotation_is_redundant(Family family) {
  return family == Family::Independence || family == Family::Gaussian ||
         family == Family::StudentT || family == Family::Frank;
}

double clamp_unit(double u) {
  if (std::isnan(u)) return u;
  return std::clamp(u, kUnitClamp, 1.0 - kUnitClamp);
}

PairCopula::PairCopula(Family family, Rotation rotation, std::vector<double> params)
    : family_(family), rotation_(rotation), params_(std::move(params)) {
  validate(family_, params_);
  if (rotation_is_redundant(family_)) {
    if (flips_sign(rotation_) && !params_.empty()) params_[0] = -params_[0];
    rotation_ = Rotation::R0;
  }
}

double PairCopula::cdf(double u1, double u2) const {
  const auto k = detail::make_kernel(family_, params_);
  const double a = clamp_unit(u1), b = clamp_unit(u2);
  double c = 0.0;
  switch (rotation_) {
    case Rotation::R0:
      c = detail::base_cdf(k, a, b);
      break;
    case Rotation::R90:
      c = b - detail::base_cdf(k, clamp_unit(1.0 - a), b);
      break;
    case Rotation::R180:
      c = a + b - 1.0 + detail::base_cdf(k, clamp_unit(1.0 - a), clamp_unit(1.0 - b));
      break;
    case Rotation::R270:
      c = a - detail::base_cdf(k, a, clamp_unit(1.0 - b));
      break;
  }
  return std::clamp(c, 0.0, 1.0);
}

double PairCopula::log_pdf(double u1, double u2) const {
  const auto k = detail::make_kernel(family_, params_);
  const double a = clamp_unit(u1), b = clamp_unit(u2);
  switch (rotation_) {
    case Rotation::R0:
      return detail::base_log_pdf(k, a, b);
    case Rotation::R90:
      return detail::base_log_pdf(k, clamp_unit(1.0 - a), b);
    case Rotation::R180:
      return detail::base_log_pdf(k, clamp_unit(1.0 - a), clamp_unit(1.0 - b));
    case Rotation::R270:
      return detail::base_log_pdf(k, a, clamp_unit(1.0 - b));
  }
  return 0.0;
}

double PairCopula::pdf(double u1, double u2) const {
  return std::min(std::exp(log_pdf(u1, u2)), kDensityCap);
}

double PairCopula::hfunc1(double u1, double u2) const {
  const auto k = detail::make_kernel(family_, params_);
  const double a = clamp_unit(u1), b = clamp_unit(u2);
  switch (rotation_) {
    case Rotation::R0:
      return detail::base_hfunc(k, b, a);
    case Rotation::R90:
      return detail::base_hfunc(k, b, clamp_unit(1.0 - a));
    case Rotation::R180:
      return 1.0 - detail::base_hfunc(k, clamp_unit(1.0 - b), clamp_unit(1.0 - a));
    case Rotation::R270:
      return 1.0 - detail::base_hfunc(k, clamp_unit(1.0 - b), a);
  }
  return 0.0;
}

double PairCopula::hfunc2(double u1, double u2) const {
  const auto k = detail::make_kernel(family_, params_);
  const double a = clamp_unit(u1), b = clamp_unit(u2);
  switch (rotation_) {
    case Rotation::R0:
      return detail::base_hfunc(k, a, b);
    case Rotation::R90:
      return 1.0 - detail::base_hfunc(k, clamp_unit(1.0 - a), b);
    case Rotation::R180:
      return 1.0 - detail::base_hfunc(k, clamp_unit(1.0 - a), clamp_unit(1.0 - b));
    case Rotation::R270:
      return detail::base_hfunc(k, a, clamp_unit(1.0 - b));
  }
  return 0.0;
}

double PairCopula::hinv1(double p, double u1) const {
  const auto k = detail::make_kernel(family_, params_);
  const double a = clamp_unit(u1);
  switch (rotation_) {
    case Rotation::R0:
      return detail::base_hinv(k, p, a);
    case Rotation::R90:
      return detail::base_hinv(k, p, clamp_unit(1.0 - a));
    case Rotation::R180:
      return 1.0 - detail::base_hinv(k, 1.0 - p, clamp_unit(1.0 - a));
    case Rotation::R270:
      return 1.0 - detail::base_hinv(k, 1.0 - p, a);
  }
  return 0.0;
}

double PairCopula::hinv2(double p, double u2) const {
  const auto k = detail::make_kernel(family_, params_);
  const double b = clamp_unit(u2);
  switch (rotation_) {
    case Rotation::R0:
      return detail::base_hinv(k, p, b);
    case Rotation::R90:
      return 1.0 - detail::base_hinv(k, 1.0 - p, b);
    case Rotation::R180:
      return 1.0 - detail::base_hinv(k, 1.0 - p, clamp_unit(1.0 - b));
    case Rotation::R270:
      return detail::base_hinv(k, p, clamp_unit(1.0 - b));
  }
  return 0.0;
}

double PairCopula::tau() const {
  const double t = detail::base_tau(detail::make_kernel(family_, params_));
  return flips_sign(rotation_) ? -t : t;
}

double PairCopula::log_likelihood(std::span<const double> u1, std::span<const double> u2) const {
  if (family_ == Family::Independence) return 0.0;
  double ll = 0.0;
  for (std::size_t i = 0; i < u1.size(); ++i) ll += log_pdf(u1[i], u2[i]);
  return ll;
}

std::string PairCopula::str() const {
  std::ostringstream os;
  os << family_name(family_);
  if (rotation_ != Rotation::R0) os << '(' << static_cast<int>(rotation_) << ')';
  if (!params_.empty()) {
    os << " [";
    for (std::size_t i = 0; i < params_.size(); ++i) os << (i ? ", " : "") << params_[i];
    os << ']';
  }
  return os.str();
}

PairCopula params_from_tau(Family family, Rotation rotation, double tau) {
  if (!(std::abs(tau) < 1.0)) throw DomainError("|tau| must be < 1, got " + std::to_string(tau));
  if (family == Family::Independence) return PairCopula{};
  if (!rotation_is_redundant(family)) {
    const bool negative_rot = flips_sign(rotation);
    if ((negative_rot && tau > 0.0) || (!negative_rot && tau < 0.0)) {
      throw DomainError("tau " + std::to_string(tau) + " has the wrong sign for " +
                        std::string(family_name(family)) + " rotated " +
                        std::to_string(static_cast<int>(rotation)));
    }
  }
  const double a = std::abs(tau);
  switch (family) {
    case Family::Gaussian:
      return PairCopula(family, Rotation::R0, {std::sin(std::numbers::pi * tau / 2.0)});
    case Family::StudentT:
      return PairCopula(family, Rotation::R0, {std::sin(std::numbers::pi * tau / 2.0), 5.0});
    case Family::Clayton:
      return PairCopula(family, rotation, {std::max(2.0 * a / (1.0 - a), 1e-6)});
    case Family::Gumbel:
      return PairCopula(family, rotation, {std::max(1.0 / (1.0 - a), 1.0 + 1e-6)});
    case Family::Frank:
    case Family::Joe: {
      const bool frank = family == Family::Frank;
      const double lo = frank ? 1e-6 : 1.0;
      const double hi = frank ? 1e4 : 1e3;
      auto f = [&](double d) {
        return detail::base_tau(detail::Kernel{family, d, 0.0}) - a;
      };
      double delta = lo;
      if (f(lo) >= 0.0) {
        delta = lo;
      } else if (f(hi) <= 0.0) {
        delta = hi;
      } else {
        std::uintmax_t iters = 200;
        auto tol = [](double x, double y) { return std::abs(x - y) <= 1e-13 * std::max(1.0, std::abs(x)); };
        const auto r = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
        delta = 0.5 * (r.first + r.second);
      }
      if (frank && tau < 0.0) delta = -delta;
      return PairCopula(family, frank ? Rotation::R0 : rotation, {delta});
    }
    case Family::BB1:
      return PairCopula(family, rotation, {1.5, 0.5});
    case Family::BB7:
      return PairCopula(family, rotation, {1.0, 1.5});
    case Family::Independence:
      break;
  }
  return PairCopula{};
}

ParameterBounds fit_bounds(Family family) {
  switch (family) {
    case Family::Independence:
      return {};
    case Family::Gaussian:
      return {{-0.999}, {0.999}};
    case Family::StudentT:
      return {{-0.999, 2.01}, {0.999, 50.0}};
    case Family::Clayton:
      return {{1e-6}, {28.0}};
    case Family::Gumbel:
      return {{1.0}, {30.0}};
    case Family::Frank:
      return {{-35.0}, {35.0}};
    case Family::Joe:
      return {{1.0}, {30.0}};
    case Family::BB1:
      return {{1.0, 1e-4}, {7.0, 7.0}};
    case Family::BB7:
      return {{1e-4, 1.0}, {20.0, 6.0}};
  }
  return {};
}

}  // namespace vinecop
