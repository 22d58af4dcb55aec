#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vinecop {

enum class Family { Independence, Gaussian, StudentT, Clayton, Gumbel, Frank, Joe, BB1, BB7 };

/// Counter-clockwise rotation of a bivariate copula in degrees.
enum class Rotation : int { R0 = 0, R90 = 90, R180 = 180, R270 = 270 };

inline constexpr double kUnitClamp = 1e-10;
inline constexpr double kDensityCap = 1e10;

std::string_view family_name(Family family);
Family family_from_name(std::string_view name);
Rotation rotation_from_degrees(int degrees);
int parameter_count(Family family);

/// True for families whose 90/180/270 rotations are members of the family
/// itself (radially symmetric, or covering negative dependence by sign).
bool rotation_is_redundant(Family family);

/// Closes [0,1] to [kUnitClamp, 1 - kUnitClamp].
double clamp_unit(double u);

/// A bivariate copula: family, rotation and parameter vector. Immutable.
///
/// Parameter layout: Gaussian {rho}; StudentT {rho, nu}; Clayton, Gumbel,
/// Frank, Joe {delta}; BB1 and BB7 {delta, theta}.
///
/// Conditional distributions follow the usual vine convention:
///   hfunc1(u1, u2) = dC/du1 = P(U2 <= u2 | U1 = u1)
///   hfunc2(u1, u2) = dC/du2 = P(U1 <= u1 | U2 = u2)
class PairCopula {
 public:
  PairCopula() = default;
  /// Throws DomainError when params lie outside the family domain. Redundant
  /// rotations are folded into the parameters so the stored rotation is 0.
  PairCopula(Family family, Rotation rotation, std::vector<double> params);

  Family family() const noexcept { return family_; }
  Rotation rotation() const noexcept { return rotation_; }
  const std::vector<double>& params() const noexcept { return params_; }
  int parameter_count() const noexcept { return vinecop::parameter_count(family_); }

  double cdf(double u1, double u2) const;
  double pdf(double u1, double u2) const;
  double log_pdf(double u1, double u2) const;
  double hfunc1(double u1, double u2) const;
  double hfunc2(double u1, double u2) const;
  /// Solves hfunc1(u1, u2) = p for u2.
  double hinv1(double p, double u1) const;
  /// Solves hfunc2(u1, u2) = p for u1.
  double hinv2(double p, double u2) const;

  /// Model Kendall's tau.
  double tau() const;

  /// Sum of log densities over paired observations.
  double log_likelihood(std::span<const double> u1, std::span<const double> u2) const;

  std::string str() const;

  friend bool operator==(const PairCopula&, const PairCopula&) = default;

 private:
  Family family_ = Family::Independence;
  Rotation rotation_ = Rotation::R0;
  std::vector<double> params_;
};

/// Inverts the tau mapping for one-parameter families. Two-parameter families
/// receive a fixed interior starting point (StudentT uses the elliptical
/// relation for rho and nu = 5).
PairCopula params_from_tau(Family family, Rotation rotation, double tau);

/// Parameter box used by the likelihood optimizer.
struct ParameterBounds {
  std::vector<double> lower;
  std::vector<double> upper;
};
ParameterBounds fit_bounds(Family family);

}  // namespace vinecop
