#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "parallel.hpp"
#include "rng.hpp"
#include "vine_plan.hpp"
#include "vinecop/error.hpp"
#include "vinecop/vine.hpp"

namespace vinecop {

namespace {

constexpr std::size_t kChunk = 512;

// Runs fn(row, state) over all rows in fixed-size chunks.
template <class Fn>
void for_rows(std::size_t rows, std::size_t edges, unsigned threads, Fn&& fn) {
  const std::size_t chunks = (rows + kChunk - 1) / kChunk;
  detail::parallel_for(chunks, threads, [&](std::size_t c) {
    detail::VineState st(edges);
    const std::size_t hi = std::min(rows, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < hi; ++i) fn(i, st);
  });
}

void check_unit_point(std::span<const double> u, std::size_t d, const char* what) {
  if (u.size() != d) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + ": expected " + std::to_string(d) +
                                                " coordinates, got " + std::to_string(u.size()));
  }
  for (std::size_t j = 0; j < d; ++j) {
    if (!(u[j] > 0.0 && u[j] < 1.0)) {
      throw DomainError(std::string(what) + ": coordinate " + std::to_string(j + 1) +
                        " is outside (0,1)");
    }
  }
}

}  // namespace

double VineFitInfo::aic() const { return criterion_value(Criterion::AIC, loglik, nparams, n); }
double VineFitInfo::bic() const { return criterion_value(Criterion::BIC, loglik, nparams, n); }

FittedVine::FittedVine() = default;

FittedVine::FittedVine(VineStructure structure, std::vector<std::vector<PairCopula>> copulas,
                       std::vector<std::string> names, std::vector<EmpiricalMarginal> marginals,
                       VineFitInfo info)
    : structure_(std::move(structure)),
      copulas_(std::move(copulas)),
      names_(std::move(names)),
      marginals_(std::move(marginals)),
      info_(std::move(info)) {
  plan_ = std::make_shared<const detail::VinePlan>(detail::make_plan(structure_));
  if (copulas_.size() != structure_.trees.size()) throw SchemaError("one copula list per tree required");
  for (std::size_t t = 0; t < copulas_.size(); ++t) {
    if (copulas_[t].size() != structure_.trees[t].size()) {
      throw SchemaError("tree " + std::to_string(t + 1) + ": one copula per edge required");
    }
    flat_.insert(flat_.end(), copulas_[t].begin(), copulas_[t].end());
  }
  if (names_.empty()) {
    for (std::size_t j = 0; j < dim(); ++j) names_.push_back("V" + std::to_string(j + 1));
  }
  if (names_.size() != dim()) throw SchemaError("one name per variable required");
  if (!marginals_.empty() && marginals_.size() != dim()) {
    throw SchemaError("marginals must be empty or one per variable");
  }
}

const std::vector<std::size_t>& FittedVine::sampling_order() const { return plan_->order; }

double FittedVine::log_density_u(std::span<const double> u) const {
  check_unit_point(u, dim(), "log_density_u");
  detail::VineState st(flat_.size());
  std::vector<double> uc(u.begin(), u.end());
  for (auto& v : uc) v = clamp_unit(v);
  const double ld = detail::run_forward(*plan_, flat_, uc, st, true);
  if (!std::isfinite(ld)) throw Error(ErrorCode::NonFinite, "pair density underflow in log_density_u");
  return ld;
}

double FittedVine::log_density(std::span<const double> x, bool* clamped) const {
  if (!has_marginals()) return log_density_u(x);
  if (x.size() != dim()) throw Error(ErrorCode::InvalidArgument, "log_density: wrong point size");
  std::vector<double> u(dim());
  double marg = 0.0;
  bool hit = false;
  for (std::size_t j = 0; j < dim(); ++j) {
    const auto& m = marginals_[j];
    if (!std::isfinite(x[j])) throw DomainError("log_density: coordinate " + std::to_string(j + 1) + " is not finite");
    double xj = x[j];
    if (xj < m.min() || xj > m.max()) {
      xj = std::clamp(xj, m.min(), m.max());
      hit = true;
    }
    u[j] = clamp_unit(m.cdf(xj));
    marg += std::log(m.density(xj));
  }
  if (clamped) *clamped = hit;
  const double ld = log_density_u(u) + marg;
  if (!std::isfinite(ld)) throw Error(ErrorCode::NonFinite, "log_density is not finite");
  return ld;
}

std::vector<double> FittedVine::log_density_u(const DataMatrix& u, unsigned threads) const {
  std::vector<double> out(u.rows());
  for_rows(u.rows(), flat_.size(), threads, [&](std::size_t i, detail::VineState&) {
    out[i] = log_density_u(u.row(i));
  });
  return out;
}

std::vector<double> FittedVine::log_density(const DataMatrix& x, unsigned threads,
                                            std::size_t* clamped_rows) const {
  std::vector<double> out(x.rows());
  std::vector<char> flags(x.rows(), 0);
  for_rows(x.rows(), flat_.size(), threads, [&](std::size_t i, detail::VineState&) {
    bool c = false;
    out[i] = log_density(x.row(i), &c);
    flags[i] = c;
  });
  if (clamped_rows) *clamped_rows = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), 1));
  return out;
}

std::vector<double> FittedVine::rosenblatt(std::span<const double> u) const {
  check_unit_point(u, dim(), "rosenblatt");
  detail::VineState st(flat_.size());
  detail::run_forward(*plan_, flat_, u, st, false);
  std::vector<double> w(dim());
  const auto& order = plan_->order;
  w[order[0]] = u[order[0]];
  for (std::size_t k = 1; k < dim(); ++k) {
    const std::size_t x = order[k];
    const std::size_t top = plan_->chain[k].back();
    w[x] = plan_->edges[top].a == x ? st.out_a[top] : st.out_b[top];
  }
  return w;
}

std::vector<double> FittedVine::inverse_rosenblatt(std::span<const double> w) const {
  check_unit_point(w, dim(), "inverse_rosenblatt");
  detail::VineState st(flat_.size());
  std::vector<double> u(dim());
  detail::run_inverse(*plan_, flat_, w, u, st);
  return u;
}

DataMatrix FittedVine::rosenblatt(const DataMatrix& u, unsigned threads) const {
  DataMatrix out(u.rows(), names_, Scale::Copula);
  for_rows(u.rows(), flat_.size(), threads, [&](std::size_t i, detail::VineState&) {
    const auto w = rosenblatt(u.row(i));
    for (std::size_t j = 0; j < dim(); ++j) out(i, j) = w[j];
  });
  return out;
}

DataMatrix FittedVine::inverse_rosenblatt(const DataMatrix& w, unsigned threads) const {
  DataMatrix out(w.rows(), names_, Scale::Copula);
  for_rows(w.rows(), flat_.size(), threads, [&](std::size_t i, detail::VineState&) {
    const auto u = inverse_rosenblatt(w.row(i));
    for (std::size_t j = 0; j < dim(); ++j) out(i, j) = u[j];
  });
  return out;
}

DataMatrix FittedVine::sample_u(std::size_t n, std::uint64_t seed, unsigned threads) const {
  if (!plan_) throw Error(ErrorCode::InvalidArgument, "sample: empty model");
  DataMatrix out(n, names_, Scale::Copula);
  const std::size_t d = dim();
  for_rows(n, flat_.size(), threads, [&](std::size_t i, detail::VineState& st) {
    std::vector<double> w(d), u(d);
    for (std::size_t j = 0; j < d; ++j) w[j] = detail::counter_uniform(seed, i, j);
    detail::run_inverse(*plan_, flat_, w, u, st);
    for (std::size_t j = 0; j < d; ++j) out(i, j) = u[j];
  });
  return out;
}

DataMatrix FittedVine::sample(std::size_t n, std::uint64_t seed, unsigned threads) const {
  DataMatrix u = sample_u(n, seed, threads);
  if (!has_marginals()) return u;
  DataMatrix x(n, names_, Scale::Data);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < dim(); ++j) x(i, j) = marginals_[j].quantile(u(i, j));
  return x;
}

DataMatrix FittedVine::to_copula_scale(const DataMatrix& x) const {
  if (x.cols() != dim()) throw Error(ErrorCode::InvalidArgument, "to_copula_scale: column count mismatch");
  if (!has_marginals()) {
    x.require_copula_scale();
    DataMatrix u = x;
    u.set_scale(Scale::Copula);
    return u;
  }
  DataMatrix u(x.rows(), x.names(), Scale::Copula);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < dim(); ++j) u(i, j) = clamp_unit(marginals_[j].cdf(x(i, j)));
  return u;
}

FittedVine independence_vine(const VineStructure& structure, std::vector<std::string> names) {
  std::vector<std::vector<PairCopula>> copulas;
  for (const auto& tree : structure.trees) copulas.emplace_back(tree.size(), PairCopula());
  return FittedVine(structure, std::move(copulas), std::move(names));
}

}  // namespace vinecop
