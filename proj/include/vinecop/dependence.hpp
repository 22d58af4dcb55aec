#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vinecop/data_matrix.hpp"

namespace vinecop {

/// Average ranks (ties share the mean of their positions); the smallest value has rank 1.
std::vector<double> ranks(std::span<const double> x);

/// Column-wise ranks / (n + 1). Result is on copula scale.
DataMatrix pseudo_obs(const DataMatrix& x);

/// Pair classification for tau-b. Pairs tied in both coordinates are counted
/// in neither tied_x nor tied_y.
struct TauCounts {
  std::int64_t concordant = 0;
  std::int64_t discordant = 0;
  std::int64_t tied_x = 0;
  std::int64_t tied_y = 0;
};

/// (Nc - Nd) / (sqrt(Nc + Nd + N1) * sqrt(Nc + Nd + N2)); throws when undefined.
double tau_b(const TauCounts& counts);

/// O(n log n) pair counts by merge-sort inversion counting.
TauCounts kendall_counts(std::span<const double> x, std::span<const double> y);

double kendall_tau(std::span<const double> x, std::span<const double> y);

/// Pearson correlation of the average-rank vectors.
double spearman_rho(std::span<const double> x, std::span<const double> y);

enum class CorrelationKind { KendallTau, SpearmanRho };

struct CorrelationMatrix {
  CorrelationKind kind = CorrelationKind::KendallTau;
  std::vector<std::string> names;
  std::vector<double> values;  // row-major d x d

  std::size_t dim() const noexcept { return names.size(); }
  double operator()(std::size_t i, std::size_t j) const { return values[i * dim() + j]; }
};

CorrelationMatrix correlation_matrix(const DataMatrix& x, CorrelationKind kind,
                                     unsigned threads = 1);

/// Combined table with Kendall's tau below and Spearman's rho above the
/// diagonal, two decimals.
std::string format_rank_table(const CorrelationMatrix& tau, const CorrelationMatrix& rho);

/// Adds uniform noise on [-0.5, 0.5] to one column (tie breaking for count data).
void jitter_column(DataMatrix& x, std::size_t column, std::uint64_t seed);

/// Empirical distribution of one column with (n + 1)-scaled plotting positions.
class EmpiricalMarginal {
 public:
  EmpiricalMarginal() = default;
  /// Requires n >= 2 finite values.
  explicit EmpiricalMarginal(std::span<const double> sample, std::string name = {});
  static EmpiricalMarginal from_sorted(std::vector<double> sorted, std::string name = {});

  std::size_t size() const noexcept { return sorted_.size(); }
  const std::vector<double>& sorted() const noexcept { return sorted_; }
  const std::string& name() const noexcept { return name_; }
  double min() const { return sorted_.front(); }
  double max() const { return sorted_.back(); }

  /// Average-rank position / (n + 1) at sample values, linear between them,
  /// constant outside the sample hull.
  double cdf(double x) const;
  /// Linear interpolation of order statistics at k / (n + 1); p in (0, 1).
  double quantile(double p) const;
  /// Central difference of cdf.
  double density(double x) const;

 private:
  void build_knots();

  std::vector<double> sorted_;
  std::vector<double> knot_x_;    // distinct values
  std::vector<double> knot_pos_;  // average rank / (n + 1)
  std::string name_;
};

}  // namespace vinecop
