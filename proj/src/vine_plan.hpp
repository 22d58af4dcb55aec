#pragma once

// Flattened vine topology shared by density, Rosenblatt and sampling code.

#include <cstddef>
#include <vector>

#include "vinecop/pair_copula.hpp"
#include "vinecop/vine.hpp"

namespace vinecop::detail {

/// Where an edge input comes from: a variable (tree 1) or one side of a
/// parent edge.
struct InputSource {
  bool from_variable = true;
  std::size_t index = 0;  // variable or flat edge index
  bool side_a = true;     // which output of the parent edge
};

struct VinePlan {
  std::size_t dim = 0;
  std::vector<VineEdge> edges;  // tree-major
  std::vector<std::size_t> tree_begin;
  std::vector<InputSource> src_a;
  std::vector<InputSource> src_b;
  /// Parent edge pair for tree >= 2 (flat indices).
  std::vector<std::pair<std::size_t, std::size_t>> parents;
  std::vector<std::size_t> order;
  /// chain[k][t]: flat index of the tree-(t+1) edge that has order[k] as a
  /// conditioned variable and otherwise only variables before it.
  std::vector<std::vector<std::size_t>> chain;
};

/// Validates the structure and derives the plan. Throws SchemaError.
VinePlan make_plan(const VineStructure& s);

/// Per-point working storage: both h-outputs of every edge.
struct VineState {
  std::vector<double> out_a;
  std::vector<double> out_b;
  explicit VineState(std::size_t edges) : out_a(edges), out_b(edges) {}
};

inline double input_value(const VineState& st, std::span<const double> u, const InputSource& s) {
  if (s.from_variable) return u[s.index];
  return s.side_a ? st.out_a[s.index] : st.out_b[s.index];
}

/// Evaluates every edge in tree order; returns the summed log pair-density
/// when `with_density` is set.
double run_forward(const VinePlan& plan, const std::vector<PairCopula>& flat,
                   std::span<const double> u, VineState& st, bool with_density);

/// Generates u from independent uniforms w (indexed by variable).
void run_inverse(const VinePlan& plan, const std::vector<PairCopula>& flat,
                 std::span<const double> w, std::span<double> u, VineState& st);

}  // namespace vinecop::detail
