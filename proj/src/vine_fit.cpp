#include <cmath>
#include <span>
#include <string>

#include "parallel.hpp"
#include "vine_build.hpp"
#include "vinecop/error.hpp"
#include "vinecop/vine.hpp"

namespace vinecop {

namespace {

// Conditional pseudo-observations of one tree: both h-outputs per edge.
struct TreeData {
  std::vector<std::vector<double>> out_a;
  std::vector<std::vector<double>> out_b;
};

// Inputs (F(a|D), F(b|D)) of a proposed edge.
std::pair<std::span<const double>, std::span<const double>> inputs(
    const detail::Proposal& prop, const std::vector<std::vector<double>>& columns,
    const detail::BuiltTree* prev, const TreeData* data) {
  const VineEdge& e = prop.edge;
  if (e.tree == 1) return {columns[e.a], columns[e.b]};
  auto pick = [&](std::size_t var) -> std::span<const double> {
    for (const std::size_t node : {prop.p, prop.q}) {
      const VineEdge& pe = prev->edges[node];
      if (pe.a == var) return data->out_a[node];
      if (pe.b == var) return data->out_b[node];
    }
    throw Error(ErrorCode::InvalidArgument, "edge " + edge_label(e) + " has no parent input");
  };
  return {pick(e.a), pick(e.b)};
}

}  // namespace

FittedVine select_structure(const DataMatrix& u, const VineFitOptions& options) {
  const std::size_t n = u.rows(), d = u.cols();
  if (d < 2) throw Error(ErrorCode::InvalidArgument, "select_structure: need at least 2 columns");
  if (n < 30) throw Error(ErrorCode::InvalidArgument, "select_structure: need at least 30 rows");
  u.require_copula_scale();

  std::vector<std::vector<double>> columns(d);
  for (std::size_t j = 0; j < d; ++j) columns[j] = u.column(j);

  PairFitOptions pair_options;
  pair_options.candidates = options.candidates;
  pair_options.criterion = options.criterion;
  pair_options.threads = 1;

  VineStructure structure;
  structure.dim = d;
  std::vector<std::vector<PairCopula>> copulas;
  VineFitInfo info;
  info.n = n;
  info.criterion = options.criterion;
  info.truncation = options.truncation;
  info.weights = options.weights;

  detail::BuiltTree prev;
  TreeData prev_data;
  for (std::size_t level = 1; level < d; ++level) {
    const detail::BuiltTree* prev_ptr = level == 1 ? nullptr : &prev;
    const auto proposals = detail::admissible(d, level, prev_ptr);
    std::vector<double> weights(proposals.size());
    detail::parallel_for(proposals.size(), options.threads, [&](std::size_t i) {
      const auto [va, vb] = inputs(proposals[i], columns, prev_ptr, &prev_data);
      double tau = 0.0;
      try {
        tau = kendall_tau(va, vb);
      } catch (const Error& err) {
        if (level == 1) {
          throw Error(err.code(), "Kendall's tau of (" + u.name(proposals[i].edge.a) + ", " +
                                      u.name(proposals[i].edge.b) + "): " + err.what());
        }
      }
      weights[i] = options.weights == WeightMode::AbsTau ? std::abs(tau) : tau;
    });
    const std::size_t nodes = level == 1 ? d : prev.edges.size();
    detail::BuiltTree tree = detail::max_spanning_tree(nodes, proposals, weights);

    // Re-derive inputs for the chosen edges (max_spanning_tree reorders them).
    std::vector<detail::Proposal> chosen(tree.edges.size());
    for (std::size_t i = 0; i < tree.edges.size(); ++i)
      chosen[i] = {tree.nodes[i][0], tree.nodes[i][1], tree.edges[i]};

    const bool independent = options.truncation > 0 && level > options.truncation;
    std::vector<PairCopula> fitted(chosen.size());
    std::vector<double> logliks(chosen.size(), 0.0);
    std::vector<char> failed(chosen.size(), 0);
    TreeData data;
    data.out_a.resize(chosen.size());
    data.out_b.resize(chosen.size());
    detail::parallel_for(chosen.size(), options.threads, [&](std::size_t i) {
      const auto [va, vb] = inputs(chosen[i], columns, prev_ptr, &prev_data);
      if (!independent) {
        const PairFit fit = fit_pair(va, vb, pair_options);
        fitted[i] = fit.copula;
        logliks[i] = fit.loglik;
        failed[i] = fit.all_failed;
      }
      const PairCopula& c = fitted[i];
      auto& oa = data.out_a[i];
      auto& ob = data.out_b[i];
      oa.resize(n);
      ob.resize(n);
      for (std::size_t r = 0; r < n; ++r) {
        oa[r] = clamp_unit(c.hfunc2(va[r], vb[r]));
        ob[r] = clamp_unit(c.hfunc1(va[r], vb[r]));
      }
    });
    for (std::size_t i = 0; i < chosen.size(); ++i) {
      info.loglik += logliks[i];
      info.nparams += fitted[i].parameter_count();
      if (failed[i]) {
        info.warnings.push_back("tree " + std::to_string(level) + ", edge " +
                                edge_label(tree.edges[i]) +
                                ": every candidate fit failed, using Independence");
      }
    }
    structure.trees.push_back(tree.edges);
    copulas.push_back(std::move(fitted));
    prev = std::move(tree);
    prev_data = std::move(data);
  }
  return FittedVine(std::move(structure), std::move(copulas), u.names(), {}, std::move(info));
}

FittedVine fit_vine(const DataMatrix& x, const VineFitOptions& options) {
  std::vector<EmpiricalMarginal> marginals;
  for (std::size_t j = 0; j < x.cols(); ++j) marginals.emplace_back(x.column(j), x.name(j));
  const FittedVine copula = select_structure(pseudo_obs(x), options);
  return FittedVine(copula.structure(), copula.copulas(), x.names(), std::move(marginals),
                    copula.info());
}

}  // namespace vinecop
