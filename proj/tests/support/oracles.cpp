#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace oracle {

namespace {

int sign(double v) { return (v > 0) - (v < 0); }

}  // namespace

std::vector<FamilySettings> family_settings() {
  using vinecop::Family;
  return {
      {Family::Independence, {{}}},
      {Family::Gaussian, {{0.3}, {-0.7}, {0.9}}},
      {Family::StudentT, {{0.3, 4.0}, {-0.6, 10.0}, {0.8, 3.0}}},
      {Family::Clayton, {{0.5}, {2.0}, {6.0}}},
      {Family::Gumbel, {{1.2}, {2.0}, {4.0}}},
      {Family::Frank, {{-3.0}, {5.0}, {12.0}}},
      {Family::Joe, {{1.3}, {2.0}, {4.0}}},
      {Family::BB1, {{1.2, 0.3}, {1.5, 1.0}, {2.5, 2.0}}},
      {Family::BB7, {{0.5, 1.3}, {1.2, 2.0}, {3.0, 4.0}}},
  };
}

std::vector<vinecop::PairCopula> calculus_suite() {
  std::vector<vinecop::PairCopula> out;
  for (const auto& fs : family_settings())
    for (const auto& p : fs.params)
      for (int r : {0, 90, 180, 270})
        out.emplace_back(fs.family, vinecop::rotation_from_degrees(r), p);
  return out;
}

double brute_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
  long long nc = 0, nd = 0, tx = 0, ty = 0;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const int sx = sign(x[i] - x[j]);
      const int sy = sign(y[i] - y[j]);
      if (sx == 0 && sy == 0) continue;
      if (sx == 0) {
        ++tx;
      } else if (sy == 0) {
        ++ty;
      } else if (sx == sy) {
        ++nc;
      } else {
        ++nd;
      }
    }
  }
  const double num = static_cast<double>(nc - nd);
  return num / (std::sqrt(static_cast<double>(nc + nd + tx)) * std::sqrt(static_cast<double>(nc + nd + ty)));
}

std::vector<double> brute_ranks(const std::vector<double>& x) {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double less = 0, equal = 0;
    for (double v : x) {
      if (v < x[i]) ++less;
      if (v == x[i]) ++equal;
    }
    r[i] = less + (equal + 1.0) / 2.0;
  }
  return r;
}

double brute_spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = brute_ranks(x);
  const auto ry = brute_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

double disjoint_pair_concordance(const std::vector<double>& x, const std::vector<double>& y) {
  double sum = 0;
  std::size_t pairs = 0;
  for (std::size_t k = 0; k + 1 < x.size(); k += 2) {
    sum += sign((x[k] - x[k + 1]) * (y[k] - y[k + 1]));
    ++pairs;
  }
  return sum / static_cast<double>(pairs);
}

std::pair<std::vector<double>, std::vector<double>> sample_pair(const vinecop::PairCopula& c,
                                                                std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> u1(n), u2(n);
  for (std::size_t i = 0; i < n; ++i) {
    double a = unif(gen), w = unif(gen);
    while (a == 0.0) a = unif(gen);
    while (w == 0.0) w = unif(gen);
    u1[i] = a;
    u2[i] = c.hinv1(w, a);
  }
  return {u1, u2};
}

double integrate_unit_square(const std::function<double(double, double)>& f, double tol) {
  boost::math::quadrature::tanh_sinh<double> q;
  auto inner = [&](double x) {
    return q.integrate([&](double y) { return f(x, y); }, 0.0, 1.0, tol);
  };
  return q.integrate(inner, 0.0, 1.0, tol);
}

double integrate_unit_cube(const std::function<double(double, double, double)>& f, double tol) {
  boost::math::quadrature::tanh_sinh<double> q;
  auto mid = [&](double x) {
    return q.integrate(
        [&](double y) { return q.integrate([&](double z) { return f(x, y, z); }, 0.0, 1.0, tol); },
        0.0, 1.0, tol);
  };
  return q.integrate(mid, 0.0, 1.0, tol);
}

double ks_statistic(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - x[i]);
    d = std::max(d, x[i] - static_cast<double>(i) / n);
  }
  return d;
}

double ks_pvalue(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 1e-3) return 1.0;
  double sum = 0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 1.0 : -1.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double brute_max_spanning_weight(std::size_t d,
                                 const std::function<double(std::size_t, std::size_t)>& w) {
  if (d == 2) return w(0, 1);
  const std::size_t len = d - 2;
  std::vector<std::size_t> seq(len, 0);
  double best = -1e300;
  while (true) {
    // Decode the Pruefer sequence.
    std::vector<std::size_t> degree(d, 1);
    for (auto s : seq) ++degree[s];
    double total = 0;
    for (auto s : seq) {
      std::size_t leaf = 0;
      while (degree[leaf] != 1) ++leaf;
      total += w(std::min(leaf, s), std::max(leaf, s));
      --degree[leaf];
      --degree[s];
    }
    std::size_t u = d, v = d;
    for (std::size_t i = 0; i < d; ++i) {
      if (degree[i] == 1) (u == d ? u : v) = i;
    }
    total += w(u, v);
    best = std::max(best, total);

    std::size_t k = 0;
    while (k < len && ++seq[k] == d) seq[k++] = 0;
    if (k == len) break;
  }
  return best;
}

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  bool join(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

}  // namespace

std::string validate_regular_vine(const vinecop::VineStructure& s) {
  const std::size_t d = s.dim;
  std::ostringstream err;
  if (d < 2) return "dimension below 2";
  if (s.trees.size() != d - 1) return "wrong number of trees";

  // Per edge of the previous tree: its full node set and its two endpoints
  // (variables for tree 1, previous-tree edge indices above).
  std::vector<std::set<std::size_t>> prev_full;
  std::vector<std::pair<std::size_t, std::size_t>> prev_ends;
  for (std::size_t t = 0; t + 1 < d; ++t) {
    const auto& tree = s.trees[t];
    const std::size_t level = t + 1;
    if (tree.size() != d - level) {
      err << "tree " << level << " has " << tree.size() << " edges";
      return err.str();
    }
    const std::size_t nodes = level == 1 ? d : prev_full.size();
    UnionFind uf(nodes);
    std::vector<std::set<std::size_t>> full;
    std::vector<std::pair<std::size_t, std::size_t>> ends;
    for (const auto& e : tree) {
      if (e.tree != level || !(e.a < e.b) || e.b >= d || e.cond.size() != level - 1) {
        err << "tree " << level << ": malformed edge " << vinecop::edge_label(e);
        return err.str();
      }
      std::set<std::size_t> f(e.cond.begin(), e.cond.end());
      if (f.size() != e.cond.size() || f.count(e.a) || f.count(e.b)) {
        err << "tree " << level << ": bad conditioning set in " << vinecop::edge_label(e);
        return err.str();
      }
      f.insert(e.a);
      f.insert(e.b);
      std::pair<std::size_t, std::size_t> link;
      if (level == 1) {
        link = {e.a, e.b};
      } else {
        int found = 0;
        for (std::size_t i = 0; i < prev_full.size(); ++i) {
          for (std::size_t j = i + 1; j < prev_full.size(); ++j) {
            std::set<std::size_t> uni = prev_full[i];
            uni.insert(prev_full[j].begin(), prev_full[j].end());
            if (uni != f) continue;
            const auto [a1, b1] = prev_ends[i];
            const auto [a2, b2] = prev_ends[j];
            if (a1 != a2 && a1 != b2 && b1 != a2 && b1 != b2) continue;  // proximity
            std::set<std::size_t> inter;
            for (auto v : prev_full[i])
              if (prev_full[j].count(v)) inter.insert(v);
            const std::set<std::size_t> cond(e.cond.begin(), e.cond.end());
            if (inter != cond) continue;
            link = {i, j};
            ++found;
          }
        }
        if (found != 1) {
          err << "tree " << level << ": edge " << vinecop::edge_label(e)
              << (found == 0 ? " joins no adjacent pair of previous edges" : " is ambiguous");
          return err.str();
        }
      }
      if (!uf.join(link.first, link.second)) {
        err << "tree " << level << ": edge " << vinecop::edge_label(e) << " closes a cycle";
        return err.str();
      }
      full.push_back(std::move(f));
      ends.push_back(link);
    }
    // d - level edges without a cycle over d - level + 1 nodes span them.
    if (tree.size() + 1 != nodes) return "tree does not span";
    prev_full = std::move(full);
    prev_ends = std::move(ends);
  }
  return {};
}

double fd_pdf(const vinecop::PairCopula& c, double u1, double u2, double h) {
  auto mixed = [&](double s) {
    return (c.cdf(u1 + s, u2 + s) - c.cdf(u1 + s, u2 - s) - c.cdf(u1 - s, u2 + s) +
            c.cdf(u1 - s, u2 - s)) /
           (4.0 * s * s);
  };
  return (4.0 * mixed(h / 2.0) - mixed(h)) / 3.0;
}

double fd_h(const vinecop::PairCopula& c, int which, double u1, double u2, double h) {
  if (which == 1) return (c.cdf(u1 + h, u2) - c.cdf(u1 - h, u2)) / (2.0 * h);
  return (c.cdf(u1, u2 + h) - c.cdf(u1, u2 - h)) / (2.0 * h);
}

double reference_abs_tau(std::size_t a, std::size_t b) {
  static const double w[4][4] = {{1.0, 0.36, 0.41, 0.64},
                                 {0.36, 1.0, 0.41, 0.34},
                                 {0.41, 0.41, 1.0, 0.31},
                                 {0.64, 0.34, 0.31, 1.0}};
  return w[a][b];
}

}  // namespace oracle
