#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vinecop/data_matrix.hpp"
#include "vinecop/dependence.hpp"
#include "vinecop/fit.hpp"
#include "vinecop/pair_copula.hpp"

namespace vinecop {

/// Edge (a, b | cond) of tree `tree`. Variable indices are 0-based, a < b,
/// cond sorted; tree levels start at 1 so |cond| == tree - 1.
struct VineEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  std::vector<std::size_t> cond;
  std::size_t tree = 1;

  friend bool operator==(const VineEdge&, const VineEdge&) = default;
};

/// "a,b|c,d" with 1-based indices.
std::string edge_label(const VineEdge& e);

struct VineStructure {
  std::size_t dim = 0;
  /// trees[t] holds the d - 1 - t edges of tree level t + 1.
  std::vector<std::vector<VineEdge>> trees;

  /// Throws SchemaError naming the first offending edge when the trees are
  /// not a regular vine (sizes, spanning property, proximity condition).
  void validate() const;
  std::size_t edge_count() const noexcept;

  friend bool operator==(const VineStructure&, const VineStructure&) = default;
};

/// Sequential maximum-spanning-tree construction. `weight` scores a proposed
/// edge; tree t + 1 only considers pairs of tree-t edges that share a node.
/// Ties go to the lexicographically smallest node pair.
VineStructure build_structure(std::size_t dim,
                              const std::function<double(const VineEdge&)>& weight);

enum class WeightMode { AbsTau, Tau };

struct VineFitOptions {
  std::vector<Candidate> candidates = all_candidates();
  Criterion criterion = Criterion::AIC;
  /// Trees above this level get Independence; 0 fits every tree.
  std::size_t truncation = 0;
  WeightMode weights = WeightMode::AbsTau;
  unsigned threads = 1;
};

struct VineFitInfo {
  std::size_t n = 0;
  Criterion criterion = Criterion::AIC;
  double loglik = 0.0;
  int nparams = 0;
  std::size_t truncation = 0;
  WeightMode weights = WeightMode::AbsTau;
  /// Edges whose candidate fits all failed and fell back to Independence.
  std::vector<std::string> warnings;

  double aic() const;
  double bic() const;
};

namespace detail {
struct VinePlan;
}

/// Structure plus one pair copula per edge and optional empirical marginals.
/// Without marginals the model lives on copula scale. Immutable.
class FittedVine {
 public:
  FittedVine();
  /// copulas[t][i] belongs to structure.trees[t][i]. marginals is empty or
  /// has one entry per variable. Throws SchemaError on shape mismatch.
  FittedVine(VineStructure structure, std::vector<std::vector<PairCopula>> copulas,
             std::vector<std::string> names, std::vector<EmpiricalMarginal> marginals = {},
             VineFitInfo info = {});

  std::size_t dim() const noexcept { return structure_.dim; }
  const VineStructure& structure() const noexcept { return structure_; }
  const std::vector<std::vector<PairCopula>>& copulas() const noexcept { return copulas_; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::vector<EmpiricalMarginal>& marginals() const noexcept { return marginals_; }
  bool has_marginals() const noexcept { return !marginals_.empty(); }
  const VineFitInfo& info() const noexcept { return info_; }

  /// Variables in the order the inverse Rosenblatt transform generates them.
  const std::vector<std::size_t>& sampling_order() const;

  /// Sum of edge log pair-densities at a copula-scale point.
  double log_density_u(std::span<const double> u) const;
  /// Adds the log marginal densities. Coordinates outside a marginal's sample
  /// hull are clamped to it; `clamped` reports whether that happened.
  double log_density(std::span<const double> x, bool* clamped = nullptr) const;

  std::vector<double> log_density_u(const DataMatrix& u, unsigned threads = 1) const;
  std::vector<double> log_density(const DataMatrix& x, unsigned threads = 1,
                                  std::size_t* clamped_rows = nullptr) const;

  /// Forward transform: coordinate j becomes F(u_j | variables before j in
  /// sampling order).
  std::vector<double> rosenblatt(std::span<const double> u) const;
  std::vector<double> inverse_rosenblatt(std::span<const double> w) const;
  DataMatrix rosenblatt(const DataMatrix& u, unsigned threads = 1) const;
  DataMatrix inverse_rosenblatt(const DataMatrix& w, unsigned threads = 1) const;

  /// Copula-scale sample. Uniforms come from a counter-based generator keyed
  /// by (seed, row, column), so output does not depend on `threads`.
  DataMatrix sample_u(std::size_t n, std::uint64_t seed, unsigned threads = 1) const;
  /// Data-scale sample through the marginal quantiles (copula scale when the
  /// model has no marginals).
  DataMatrix sample(std::size_t n, std::uint64_t seed, unsigned threads = 1) const;

  /// Copula-scale transform of a data-scale matrix via the marginal cdfs.
  DataMatrix to_copula_scale(const DataMatrix& x) const;

 private:
  VineStructure structure_;
  std::vector<std::vector<PairCopula>> copulas_;
  std::vector<std::string> names_;
  std::vector<EmpiricalMarginal> marginals_;
  VineFitInfo info_;
  std::shared_ptr<const detail::VinePlan> plan_;
  std::vector<PairCopula> flat_;  // tree-major copy of copulas_
};

/// Dissmann-style selection on copula-scale data: maximum spanning trees on
/// Kendall's tau of the (conditional) pseudo-observations, with a pair-copula
/// fit per edge. Requires n >= 30 and d >= 2.
FittedVine select_structure(const DataMatrix& u, const VineFitOptions& options = {});

/// Empirical marginals plus select_structure on the pseudo-observations.
FittedVine fit_vine(const DataMatrix& x, const VineFitOptions& options = {});

/// Independence copula on every edge of a given structure.
FittedVine independence_vine(const VineStructure& structure, std::vector<std::string> names);

/// Canonical JSON text; save -> load -> save is byte-identical.
std::string model_to_json(const FittedVine& model);
FittedVine model_from_json(std::string_view text);
void save_model(const FittedVine& model, const std::string& path);
FittedVine load_model(const std::string& path);

}  // namespace vinecop
