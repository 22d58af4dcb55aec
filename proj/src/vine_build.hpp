#pragma once

// Tree-by-tree construction shared by build_structure and the fitter.

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "vinecop/vine.hpp"

namespace vinecop::detail {

/// A candidate edge of the next tree joining nodes p < q of the current one.
struct Proposal {
  std::size_t p = 0;
  std::size_t q = 0;
  VineEdge edge;
};

/// Edges of one tree together with the node pair each edge joins.
struct BuiltTree {
  std::vector<VineEdge> edges;
  std::vector<std::array<std::size_t, 2>> nodes;
};

/// Candidate edges for tree `level`. For level 1 the nodes are the d
/// variables; otherwise they are the edges of `prev` and two of them are
/// admissible when they share a node.
std::vector<Proposal> admissible(std::size_t dim, std::size_t level, const BuiltTree* prev);

/// Prim's algorithm from node 0 over `nodes` nodes. Ties go to the proposal
/// that comes first, and proposals are listed in lexicographic (p, q) order.
/// Returns the chosen proposals sorted by (a, b, cond).
BuiltTree max_spanning_tree(std::size_t nodes, const std::vector<Proposal>& proposals,
                            const std::vector<double>& weights);

}  // namespace vinecop::detail
