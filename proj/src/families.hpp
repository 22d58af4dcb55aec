#pragma once

// Unrotated, exchangeable family kernels. Inputs must already be clamped to
// [kUnitClamp, 1 - kUnitClamp]; parameters must be in domain.

#include "vinecop/pair_copula.hpp"

namespace vinecop::detail {

struct Kernel {
  Family family = Family::Independence;
  double p0 = 0.0;
  double p1 = 0.0;
};

Kernel make_kernel(Family family, const std::vector<double>& params);

double base_cdf(const Kernel& k, double u, double v);
double base_log_pdf(const Kernel& k, double u, double v);
/// dC(u, v)/dv, the distribution of the first argument given the second.
double base_hfunc(const Kernel& k, double u, double v);
/// Solves base_hfunc(u, v) = p for u.
double base_hinv(const Kernel& k, double p, double v);
double base_tau(const Kernel& k);

double normal_quantile(double p);
double normal_cdf(double x);
double student_quantile(double nu, double p);
double student_cdf(double nu, double x);

/// log t-copula density from t-scores, shared with the fitting fast path.
double student_log_pdf_scores(double rho, double nu, double x, double y);

}  // namespace vinecop::detail
