#include <algorithm>
#include <iterator>
#include <limits>
#include <numeric>
#include <string>

#include "vine_build.hpp"
#include "vine_plan.hpp"
#include "vinecop/error.hpp"

namespace vinecop {

namespace {

std::vector<std::size_t> union_of(const VineEdge& e) {
  std::vector<std::size_t> u = e.cond;
  u.push_back(e.a);
  u.push_back(e.b);
  std::sort(u.begin(), u.end());
  return u;
}

std::string where(std::size_t tree, std::size_t index, const VineEdge& e) {
  return "tree " + std::to_string(tree) + ", edge " + std::to_string(index + 1) + " (" +
         edge_label(e) + ")";
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool join(std::size_t x, std::size_t y) {
    x = find(x);
    y = find(y);
    if (x == y) return false;
    parent[y] = x;
    return true;
  }
};

bool contains(const std::vector<std::size_t>& sorted, std::size_t x) {
  return std::binary_search(sorted.begin(), sorted.end(), x);
}

}  // namespace

std::string edge_label(const VineEdge& e) {
  std::string s = std::to_string(e.a + 1) + "," + std::to_string(e.b + 1);
  if (!e.cond.empty()) {
    s += "|";
    for (std::size_t i = 0; i < e.cond.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(e.cond[i] + 1);
    }
  }
  return s;
}

std::size_t VineStructure::edge_count() const noexcept {
  std::size_t n = 0;
  for (const auto& t : trees) n += t.size();
  return n;
}

void VineStructure::validate() const { (void)detail::make_plan(*this); }

namespace detail {

VinePlan make_plan(const VineStructure& s) {
  const std::size_t d = s.dim;
  if (d < 2) throw SchemaError("vine dimension must be at least 2");
  if (s.trees.size() != d - 1) {
    throw SchemaError("expected " + std::to_string(d - 1) + " trees for dimension " +
                      std::to_string(d) + ", found " + std::to_string(s.trees.size()));
  }

  VinePlan plan;
  plan.dim = d;
  std::vector<std::vector<std::size_t>> unions;
  for (std::size_t t = 0; t < d - 1; ++t) {
    const std::size_t level = t + 1;
    const auto& tree = s.trees[t];
    if (tree.size() != d - level) {
      throw SchemaError("tree " + std::to_string(level) + " must have " +
                        std::to_string(d - level) + " edges, found " + std::to_string(tree.size()));
    }
    plan.tree_begin.push_back(plan.edges.size());
    for (std::size_t i = 0; i < tree.size(); ++i) {
      const VineEdge& e = tree[i];
      if (e.tree != level) throw SchemaError(where(level, i, e) + ": tree level field is " + std::to_string(e.tree));
      if (!(e.a < e.b && e.b < d)) throw SchemaError(where(level, i, e) + ": need a < b <= d");
      if (e.cond.size() != level - 1) {
        throw SchemaError(where(level, i, e) + ": conditioning set must have " +
                          std::to_string(level - 1) + " entries");
      }
      for (std::size_t j = 0; j < e.cond.size(); ++j) {
        if (e.cond[j] >= d || (j > 0 && e.cond[j] <= e.cond[j - 1])) {
          throw SchemaError(where(level, i, e) + ": conditioning set must be sorted, distinct and in range");
        }
        if (e.cond[j] == e.a || e.cond[j] == e.b) {
          throw SchemaError(where(level, i, e) + ": conditioned variable repeated in conditioning set");
        }
      }
      plan.edges.push_back(e);
      unions.push_back(union_of(e));
    }
  }
  plan.tree_begin.push_back(plan.edges.size());

  const std::size_t n_edges = plan.edges.size();
  plan.src_a.resize(n_edges);
  plan.src_b.resize(n_edges);
  plan.parents.assign(n_edges, {0, 0});

  UnionFind vars(d);
  for (std::size_t i = 0; i < s.trees[0].size(); ++i) {
    const auto& e = plan.edges[i];
    if (!vars.join(e.a, e.b)) throw SchemaError(where(1, i, e) + ": closes a cycle in tree 1");
    plan.src_a[i] = {true, e.a, true};
    plan.src_b[i] = {true, e.b, true};
  }

  for (std::size_t t = 1; t < d - 1; ++t) {
    const std::size_t level = t + 1;
    const std::size_t prev_lo = plan.tree_begin[t - 1], prev_hi = plan.tree_begin[t];
    UnionFind nodes(prev_hi - prev_lo);
    for (std::size_t e = plan.tree_begin[t]; e < plan.tree_begin[t + 1]; ++e) {
      const VineEdge& edge = plan.edges[e];
      const std::size_t i = e - plan.tree_begin[t];
      std::vector<std::size_t> found;
      for (std::size_t p = prev_lo; p < prev_hi; ++p) {
        if (std::includes(unions[e].begin(), unions[e].end(), unions[p].begin(), unions[p].end()))
          found.push_back(p);
      }
      if (found.size() != 2) {
        throw SchemaError(where(level, i, edge) + ": does not join two edges of tree " + std::to_string(t));
      }
      const std::size_t p = found[0], q = found[1];
      std::vector<std::size_t> common, all;
      std::set_intersection(unions[p].begin(), unions[p].end(), unions[q].begin(), unions[q].end(),
                            std::back_inserter(common));
      std::set_union(unions[p].begin(), unions[p].end(), unions[q].begin(), unions[q].end(),
                     std::back_inserter(all));
      bool share_node = common.size() == t;
      if (share_node && level > 2) {
        const auto pp = plan.parents[p], pq = plan.parents[q];
        share_node = pp.first == pq.first || pp.first == pq.second || pp.second == pq.first ||
                     pp.second == pq.second;
      }
      if (!share_node || all != unions[e] || common != edge.cond) {
        throw SchemaError(where(level, i, edge) + ": violates the proximity condition");
      }
      if (!nodes.join(p - prev_lo, q - prev_lo)) {
        throw SchemaError(where(level, i, edge) + ": closes a cycle in tree " + std::to_string(level));
      }
      plan.parents[e] = {p, q};
      auto source_for = [&](std::size_t var) {
        const std::size_t owner = contains(unions[p], var) ? p : q;
        return InputSource{false, owner, plan.edges[owner].a == var};
      };
      plan.src_a[e] = source_for(edge.a);
      plan.src_b[e] = source_for(edge.b);
    }
  }

  // Sampling order: repeatedly peel a conditioned variable of the top edge.
  std::vector<bool> active(n_edges, true);
  std::vector<bool> remaining(d, true);
  plan.order.assign(d, 0);
  plan.chain.assign(d, {});
  for (std::size_t k = d - 1; k >= 1; --k) {
    std::size_t top = n_edges;
    for (std::size_t e = plan.tree_begin[k - 1]; e < plan.tree_begin[k]; ++e)
      if (active[e]) top = e;
    bool peeled = false;
    for (const std::size_t x : {plan.edges[top].b, plan.edges[top].a}) {
      std::vector<std::size_t> chain;
      bool ok = true;
      for (std::size_t e = 0; e < n_edges && ok; ++e) {
        if (!active[e]) continue;
        if (contains(plan.edges[e].cond, x)) ok = false;
      }
      for (std::size_t t = 0; t < k && ok; ++t) {
        std::size_t hit = n_edges, count = 0;
        for (std::size_t e = plan.tree_begin[t]; e < plan.tree_begin[t + 1]; ++e) {
          if (active[e] && (plan.edges[e].a == x || plan.edges[e].b == x)) {
            hit = e;
            ++count;
          }
        }
        if (count != 1) {
          ok = false;
        } else if (t > 0) {
          const auto& src = plan.edges[hit].a == x ? plan.src_a[hit] : plan.src_b[hit];
          ok = !src.from_variable && src.index == chain.back();
        }
        chain.push_back(hit);
      }
      if (!ok) continue;
      for (const std::size_t e : chain) active[e] = false;
      remaining[x] = false;
      plan.order[k] = x;
      plan.chain[k] = std::move(chain);
      peeled = true;
      break;
    }
    if (!peeled) throw SchemaError("vine has no valid sampling order at tree " + std::to_string(k));
  }
  plan.order[0] = static_cast<std::size_t>(std::find(remaining.begin(), remaining.end(), true) - remaining.begin());
  return plan;
}

std::vector<Proposal> admissible(std::size_t dim, std::size_t level, const BuiltTree* prev) {
  std::vector<Proposal> out;
  if (level == 1) {
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = i + 1; j < dim; ++j) out.push_back({i, j, VineEdge{i, j, {}, 1}});
    return out;
  }
  const auto& edges = prev->edges;
  for (std::size_t p = 0; p < edges.size(); ++p) {
    for (std::size_t q = p + 1; q < edges.size(); ++q) {
      const auto& np = prev->nodes[p];
      const auto& nq = prev->nodes[q];
      if (np[0] != nq[0] && np[0] != nq[1] && np[1] != nq[0] && np[1] != nq[1]) continue;
      const auto up = union_of(edges[p]), uq = union_of(edges[q]);
      std::vector<std::size_t> common, diff;
      std::set_intersection(up.begin(), up.end(), uq.begin(), uq.end(), std::back_inserter(common));
      std::set_symmetric_difference(up.begin(), up.end(), uq.begin(), uq.end(), std::back_inserter(diff));
      if (diff.size() != 2) continue;
      out.push_back({p, q, VineEdge{diff[0], diff[1], common, level}});
    }
  }
  return out;
}

BuiltTree max_spanning_tree(std::size_t nodes, const std::vector<Proposal>& proposals,
                            const std::vector<double>& weights) {
  std::vector<bool> in_tree(nodes, false);
  in_tree[0] = true;
  std::vector<std::size_t> chosen;
  for (std::size_t step = 1; step < nodes; ++step) {
    std::size_t best = proposals.size();
    double best_w = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < proposals.size(); ++i) {
      if (in_tree[proposals[i].p] == in_tree[proposals[i].q]) continue;
      if (best == proposals.size() || weights[i] > best_w) {
        best = i;
        best_w = weights[i];
      }
    }
    if (best == proposals.size()) throw Error(ErrorCode::InvalidArgument, "admissible graph is disconnected");
    in_tree[proposals[best].p] = in_tree[proposals[best].q] = true;
    chosen.push_back(best);
  }
  std::sort(chosen.begin(), chosen.end(), [&](std::size_t x, std::size_t y) {
    const auto& ex = proposals[x].edge;
    const auto& ey = proposals[y].edge;
    return std::tie(ex.a, ex.b, ex.cond) < std::tie(ey.a, ey.b, ey.cond);
  });
  BuiltTree out;
  for (const std::size_t i : chosen) {
    out.edges.push_back(proposals[i].edge);
    out.nodes.push_back({proposals[i].p, proposals[i].q});
  }
  return out;
}

double run_forward(const VinePlan& plan, const std::vector<PairCopula>& flat,
                   std::span<const double> u, VineState& st, bool with_density) {
  double ld = 0.0;
  for (std::size_t e = 0; e < plan.edges.size(); ++e) {
    const double a = input_value(st, u, plan.src_a[e]);
    const double b = input_value(st, u, plan.src_b[e]);
    const PairCopula& c = flat[e];
    if (with_density) ld += c.log_pdf(a, b);
    st.out_a[e] = clamp_unit(c.hfunc2(a, b));
    st.out_b[e] = clamp_unit(c.hfunc1(a, b));
  }
  return ld;
}

void run_inverse(const VinePlan& plan, const std::vector<PairCopula>& flat,
                 std::span<const double> w, std::span<double> u, VineState& st) {
  u[plan.order[0]] = clamp_unit(w[plan.order[0]]);
  for (std::size_t k = 1; k < plan.dim; ++k) {
    const std::size_t x = plan.order[k];
    const auto& chain = plan.chain[k];
    double p = clamp_unit(w[x]);
    for (std::size_t t = k; t-- > 0;) {
      const std::size_t e = chain[t];
      const bool x_is_a = plan.edges[e].a == x;
      const double other = input_value(st, u, x_is_a ? plan.src_b[e] : plan.src_a[e]);
      p = clamp_unit(x_is_a ? flat[e].hinv2(p, other) : flat[e].hinv1(p, other));
    }
    u[x] = p;
    for (const std::size_t e : chain) {
      const double a = input_value(st, u, plan.src_a[e]);
      const double b = input_value(st, u, plan.src_b[e]);
      st.out_a[e] = clamp_unit(flat[e].hfunc2(a, b));
      st.out_b[e] = clamp_unit(flat[e].hfunc1(a, b));
    }
  }
}

}  // namespace detail

VineStructure build_structure(std::size_t dim,
                              const std::function<double(const VineEdge&)>& weight) {
  if (dim < 2) throw Error(ErrorCode::InvalidArgument, "vine dimension must be at least 2");
  VineStructure s;
  s.dim = dim;
  detail::BuiltTree prev;
  for (std::size_t level = 1; level < dim; ++level) {
    const auto proposals = detail::admissible(dim, level, level == 1 ? nullptr : &prev);
    std::vector<double> w(proposals.size());
    for (std::size_t i = 0; i < proposals.size(); ++i) w[i] = weight(proposals[i].edge);
    const std::size_t nodes = level == 1 ? dim : prev.edges.size();
    prev = detail::max_spanning_tree(nodes, proposals, w);
    s.trees.push_back(prev.edges);
  }
  return s;
}

}  // namespace vinecop
