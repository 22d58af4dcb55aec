#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "vinecop/data_matrix.hpp"
#include "vinecop/pair_copula.hpp"

namespace vinecop {

enum class Criterion { AIC, BIC, LogLik };

std::string_view criterion_name(Criterion c);
Criterion criterion_from_name(std::string_view name);

/// Smaller is better for every criterion (LogLik scores as -loglik).
double criterion_value(Criterion c, double loglik, int nparams, std::size_t n);

struct Candidate {
  Family family = Family::Independence;
  Rotation rotation = Rotation::R0;
  friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// Every family; non-redundant families at all four rotations.
std::vector<Candidate> all_candidates();
std::vector<Candidate> candidates_for(std::span<const Family> families);

struct CandidateFit {
  PairCopula copula;
  double loglik = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  int evaluations = 0;
  bool ok = true;
};

struct PairFitOptions {
  std::vector<Candidate> candidates = all_candidates();
  Criterion criterion = Criterion::AIC;
  unsigned threads = 1;
};

struct PairFit {
  PairCopula copula;
  double loglik = 0.0;
  /// One entry per candidate actually tried, Independence first, in
  /// candidate-list order.
  std::vector<CandidateFit> report;
  std::size_t selected = 0;
  /// Set when every non-independence candidate failed to produce a finite fit.
  bool all_failed = false;
};

/// Maximum-likelihood fit of every admissible candidate and selection by the
/// criterion. Candidates whose rotation contradicts the sign of the empirical
/// Kendall's tau are skipped. Requires n >= 10 and entries in (0,1).
PairFit fit_pair(std::span<const double> u1, std::span<const double> u2,
                 const PairFitOptions& options = {});
PairFit fit_pair(const DataMatrix& u, const PairFitOptions& options = {});

}  // namespace vinecop
