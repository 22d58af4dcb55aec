#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "vinecop/dependence.hpp"
#include "vinecop/error.hpp"
#include "vinecop/vine.hpp"

using namespace vinecop;

namespace {

VineEdge edge(std::size_t a, std::size_t b, std::vector<std::size_t> cond = {}) {
  VineEdge e;
  e.a = a;
  e.b = b;
  e.tree = cond.size() + 1;
  e.cond = std::move(cond);
  return e;
}

std::set<std::string> labels(const std::vector<VineEdge>& tree) {
  std::set<std::string> out;
  for (const auto& e : tree) out.insert(edge_label(e));
  return out;
}

std::vector<std::string> names_for(std::size_t d) {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < d; ++j) out.push_back("x" + std::to_string(j + 1));
  return out;
}

DataMatrix uniform_matrix(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  DataMatrix m(n, names_for(d), Scale::Copula);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      double v = unif(gen);
      while (v == 0.0) v = unif(gen);
      m(i, j) = v;
    }
  return m;
}

VineStructure reference_structure() {
  return build_structure(4, [](const VineEdge& e) {
    return e.tree == 1 ? oracle::reference_abs_tau(e.a, e.b) : 0.0;
  });
}

VineStructure d_vine3() {
  VineStructure s;
  s.dim = 3;
  s.trees = {{edge(0, 1), edge(1, 2)}, {edge(0, 2, {1})}};
  return s;
}

const PairCopula kC01(Family::Clayton, Rotation::R0, {2.0});
const PairCopula kC12(Family::Gumbel, Rotation::R0, {1.7});
const PairCopula kC02(Family::Clayton, Rotation::R180, {0.9});

FittedVine d_vine3_model() {
  return FittedVine(d_vine3(), {{kC01, kC12}, {kC02}}, names_for(3));
}

// Copulas for the reference structure; order follows structure.trees.
FittedVine reference_model() {
  const auto s = reference_structure();
  std::vector<std::vector<PairCopula>> cop(3);
  const PairCopula pool[] = {
      PairCopula(Family::Gumbel, Rotation::R90, {2.5}),
      PairCopula(Family::Clayton, Rotation::R0, {1.2}),
      PairCopula(Family::Frank, Rotation::R0, {-4.0}),
      PairCopula(Family::Joe, Rotation::R180, {1.5}),
      PairCopula(Family::Gaussian, Rotation::R0, {0.3}),
      PairCopula(Family::StudentT, Rotation::R0, {-0.2, 6.0}),
  };
  std::size_t k = 0;
  for (std::size_t t = 0; t < 3; ++t)
    for (std::size_t i = 0; i < s.trees[t].size(); ++i) cop[t].push_back(pool[k++]);
  return FittedVine(s, cop, {"TrafficCar", "VelCar", "WaitTime", "DistCar"});
}

}  // namespace

TEST(Structure, ReferenceWeightsGiveExpectedTrees) {
  const auto s = reference_structure();
  ASSERT_EQ(s.trees.size(), 3u);
  EXPECT_EQ(labels(s.trees[0]), (std::set<std::string>{"1,3", "1,4", "2,3"}));
  EXPECT_EQ(labels(s.trees[1]), (std::set<std::string>{"1,2|3", "3,4|1"}));
  EXPECT_EQ(labels(s.trees[2]), (std::set<std::string>{"2,4|1,3"}));
  EXPECT_EQ(oracle::validate_regular_vine(s), "");
  EXPECT_EQ(s, reference_structure());
}

TEST(Structure, TwoDimensionsIsForced) {
  const auto s = build_structure(2, [](const VineEdge&) { return 0.0; });
  ASSERT_EQ(s.trees.size(), 1u);
  ASSERT_EQ(s.trees[0].size(), 1u);
  EXPECT_EQ(edge_label(s.trees[0][0]), "1,2");

  auto u = uniform_matrix(200, 2, 3);
  const auto fit = select_structure(u);
  EXPECT_EQ(edge_label(fit.structure().trees[0][0]), "1,2");
}

TEST(Structure, SpanningTreeIsMaximal) {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t d = 2; d <= 6; ++d) {
    for (int rep = 0; rep < 10; ++rep) {
      std::vector<std::vector<double>> w(d, std::vector<double>(d));
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) w[i][j] = w[j][i] = unif(gen);
      const auto s = build_structure(d, [&](const VineEdge& e) { return e.tree == 1 ? w[e.a][e.b] : 0.0; });
      double total = 0;
      for (const auto& e : s.trees[0]) total += w[e.a][e.b];
      const double best = oracle::brute_max_spanning_weight(d, [&](std::size_t a, std::size_t b) { return w[a][b]; });
      EXPECT_NEAR(total, best, 1e-12) << "d=" << d;
      EXPECT_EQ(oracle::validate_regular_vine(s), "") << "d=" << d;
    }
  }
}

TEST(Structure, SelectedStructuresAreRegular) {
  for (std::size_t d : {3u, 5u}) {
    auto u = uniform_matrix(300, d, 10 + d);
    // Add dependence so the trees are not arbitrary.
    for (std::size_t i = 0; i < u.rows(); ++i) u(i, 1) = 0.5 * u(i, 0) + 0.5 * u(i, 1);
    VineFitOptions opts;
    opts.candidates = candidates_for(std::vector<Family>{Family::Gaussian, Family::Clayton});
    const auto fit = select_structure(u, opts);
    EXPECT_EQ(oracle::validate_regular_vine(fit.structure()), "");
    EXPECT_NO_THROW(fit.structure().validate());
  }
}

TEST(Structure, ValidateRejectsBrokenVines) {
  auto s = reference_structure();
  EXPECT_NO_THROW(s.validate());

  auto cycle = s;
  cycle.trees[0][2] = cycle.trees[0][0];
  EXPECT_THROW(cycle.validate(), SchemaError);
  EXPECT_NE(oracle::validate_regular_vine(cycle), "");

  // {1,4} and {2,3} share no node in tree 1.
  auto proximity = s;
  proximity.trees[1][0] = edge(1, 2, {3});
  EXPECT_THROW(proximity.validate(), SchemaError);
  EXPECT_NE(oracle::validate_regular_vine(proximity), "");

  auto missing = s;
  missing.trees[2].clear();
  EXPECT_THROW(missing.validate(), SchemaError);
  EXPECT_NE(oracle::validate_regular_vine(missing), "");
}

TEST(Selection, IndependentDataGivesIndependenceUnderBic) {
  VineFitOptions opts;
  opts.criterion = Criterion::BIC;
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto fit = select_structure(uniform_matrix(1000, 3, seed), opts);
    bool all = true;
    for (const auto& tree : fit.copulas())
      for (const auto& c : tree) all = all && c.family() == Family::Independence;
    hits += all;
    EXPECT_EQ(oracle::validate_regular_vine(fit.structure()), "");
  }
  EXPECT_GE(hits, 18);
}

TEST(Selection, TruncationFillsIndependence) {
  const auto truth = reference_model();
  const auto u = truth.sample_u(2000, 4);
  VineFitOptions opts;
  opts.truncation = 1;
  const auto fit = select_structure(u, opts);
  EXPECT_EQ(fit.info().truncation, 1u);
  for (std::size_t t = 1; t < fit.copulas().size(); ++t)
    for (const auto& c : fit.copulas()[t]) EXPECT_EQ(c.family(), Family::Independence);
  bool dependent = false;
  for (const auto& c : fit.copulas()[0]) dependent = dependent || c.family() != Family::Independence;
  EXPECT_TRUE(dependent);
}

TEST(Selection, LogLikelihoodIsSumOverEdges) {
  const auto u = reference_model().sample_u(1500, 21);
  const auto fit = select_structure(u);
  double total = 0;
  for (std::size_t i = 0; i < u.rows(); ++i) total += fit.log_density_u(u.row(i));
  EXPECT_NEAR(fit.info().loglik, total, 1e-8 * std::abs(total));
  EXPECT_EQ(fit.info().n, u.rows());
}

TEST(Selection, RejectsTooLittleData) {
  EXPECT_THROW(select_structure(uniform_matrix(20, 3, 1)), Error);
  EXPECT_THROW(select_structure(uniform_matrix(100, 1, 1)), Error);
  auto bad = uniform_matrix(100, 3, 1);
  bad(5, 1) = 1.0;
  EXPECT_THROW(select_structure(bad), DomainError);
}

TEST(Density, IndependenceVineIsZero) {
  const auto m = independence_vine(reference_structure(), names_for(4));
  const double u[] = {0.1, 0.7, 0.33, 0.9};
  EXPECT_EQ(m.log_density_u(u), 0.0);
}

TEST(Density, MatchesHandWiredFactorization) {
  const auto m = d_vine3_model();
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> unif(0.02, 0.98);
  for (int k = 0; k < 50; ++k) {
    const double u0 = unif(gen), u1 = unif(gen), u2 = unif(gen);
    const double a = kC01.hfunc2(u0, u1);  // F(0 | 1)
    const double b = kC12.hfunc1(u1, u2);  // F(2 | 1)
    const double hand = kC01.log_pdf(u0, u1) + kC12.log_pdf(u1, u2) + kC02.log_pdf(a, b);
    const double u[] = {u0, u1, u2};
    EXPECT_NEAR(m.log_density_u(u), hand, 1e-10);
  }
}

TEST(Density, MatchesFiniteDifferenceConditionals) {
  const auto m = d_vine3_model();
  const double u0 = 0.3, u1 = 0.55, u2 = 0.8;
  const double a = oracle::fd_h(kC01, 2, u0, u1, 1e-6);
  const double b = oracle::fd_h(kC12, 1, u1, u2, 1e-6);
  const double direct = oracle::fd_pdf(kC01, u0, u1) * oracle::fd_pdf(kC12, u1, u2) * oracle::fd_pdf(kC02, a, b);
  const double u[] = {u0, u1, u2};
  EXPECT_NEAR(std::exp(m.log_density_u(u)), direct, 1e-4 * std::max(1.0, direct));
}

TEST(Density, IntegratesToOne) {
  // Smooth families so the cube quadrature converges.
  VineStructure s = d_vine3();
  const FittedVine m(s,
                     {{PairCopula(Family::Frank, Rotation::R0, {4.0}),
                       PairCopula(Family::Gaussian, Rotation::R0, {-0.4})},
                      {PairCopula(Family::Frank, Rotation::R0, {-2.0})}},
                     names_for(3));
  const double mass = oracle::integrate_unit_cube([&](double x, double y, double z) {
    const double u[] = {x, y, z};
    return std::exp(m.log_density_u(u));
  }, 1e-4);
  EXPECT_NEAR(mass, 1.0, 1e-2);
}

TEST(Density, SklarRecomposition) {
  const auto truth = reference_model();
  DataMatrix x = truth.sample_u(800, 5);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    x(i, 0) = std::floor(20.0 * x(i, 0)) + 0.01 * x(i, 0);
    x(i, 1) = 30.0 * x(i, 1) * x(i, 1);
    x(i, 3) = -std::log(x(i, 3));
  }
  x.set_scale(Scale::Data);
  const auto fit = fit_vine(x);
  ASSERT_TRUE(fit.has_marginals());
  for (std::size_t i = 0; i < 100; ++i) {
    const auto row = x.row(i * 7);
    std::vector<double> u(row.size());
    double marg = 0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      u[j] = fit.marginals()[j].cdf(row[j]);
      marg += std::log(fit.marginals()[j].density(row[j]));
    }
    EXPECT_NEAR(fit.log_density(row), fit.log_density_u(u) + marg, 1e-9);
  }
}

TEST(Density, ClampsOutsideTheHull) {
  DataMatrix x = reference_model().sample_u(200, 2);
  x.set_scale(Scale::Data);
  const auto fit = fit_vine(x);
  std::vector<double> p(x.row(0).begin(), x.row(0).end());
  bool clamped = true;
  fit.log_density(p, &clamped);
  EXPECT_FALSE(clamped);
  p[2] = 5.0;
  const double v = fit.log_density(p, &clamped);
  EXPECT_TRUE(clamped);
  EXPECT_TRUE(std::isfinite(v));
}

TEST(Sampling, IndependenceVineIsIndependent) {
  const auto m = independence_vine(reference_structure(), names_for(4));
  const auto u = m.sample_u(10000, 17);
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = a + 1; b < 4; ++b)
      EXPECT_LT(std::abs(kendall_tau(u.column(a), u.column(b))), 0.03);
}

class PairSampling : public ::testing::TestWithParam<int> {};

TEST_P(PairSampling, EmpiricalTauMatchesModel) {
  const auto fs = oracle::family_settings()[static_cast<std::size_t>(GetParam())];
  VineStructure s;
  s.dim = 2;
  s.trees = {{edge(0, 1)}};
  const PairCopula c(fs.family, Rotation::R270, fs.params.back());
  const FittedVine m(s, {{c}}, names_for(2));
  const auto u = m.sample_u(100000, 300 + static_cast<std::uint64_t>(GetParam()), 4);
  EXPECT_NEAR(kendall_tau(u.column(0), u.column(1)), c.tau(), 0.01) << c.str();
}

INSTANTIATE_TEST_SUITE_P(AllFamilies, PairSampling, ::testing::Range(0, 9));

TEST(Sampling, DeterministicAcrossThreads) {
  const auto m = reference_model();
  const auto a = m.sample_u(5000, 42, 1);
  const auto b = m.sample_u(5000, 42, 8);
  const auto c = m.sample_u(5000, 42, 3);
  EXPECT_EQ(a.values(), b.values());
  EXPECT_EQ(a.values(), c.values());
  EXPECT_NE(a.values(), m.sample_u(5000, 43, 1).values());
}

TEST(Sampling, MatchesPairwiseModelTau) {
  const auto m = reference_model();
  const auto u = m.sample_u(100000, 9, 4);
  // Tree 1 edges carry unconditional pairs, so their sample tau is the
  // copula's tau.
  for (std::size_t i = 0; i < m.structure().trees[0].size(); ++i) {
    const auto& e = m.structure().trees[0][i];
    EXPECT_NEAR(kendall_tau(u.column(e.a), u.column(e.b)), m.copulas()[0][i].tau(), 0.01)
        << edge_label(e);
  }
}

TEST(Sampling, DataScaleGoesThroughQuantiles) {
  DataMatrix x = reference_model().sample_u(500, 31);
  for (std::size_t i = 0; i < x.rows(); ++i) x(i, 1) = 100.0 + 10.0 * x(i, 1);
  x.set_scale(Scale::Data);
  const auto fit = fit_vine(x);
  const auto s = fit.sample(2000, 1, 2);
  EXPECT_EQ(s.scale(), Scale::Data);
  const auto col = s.column(1);
  EXPECT_GE(*std::min_element(col.begin(), col.end()), fit.marginals()[1].min());
  EXPECT_LE(*std::max_element(col.begin(), col.end()), fit.marginals()[1].max());
  EXPECT_EQ(s.names(), x.names());
}

TEST(Rosenblatt, IndependenceVineIsIdentity) {
  const auto m = independence_vine(reference_structure(), names_for(4));
  const std::vector<double> u = {0.12, 0.5, 0.77, 0.03};
  EXPECT_EQ(m.rosenblatt(u), u);
  EXPECT_EQ(m.inverse_rosenblatt(u), u);
}

TEST(Rosenblatt, RoundTrip) {
  const auto m = reference_model();
  std::mt19937_64 gen(101);
  std::uniform_real_distribution<double> unif(0.001, 0.999);
  double worst = 0;
  for (int k = 0; k < 100; ++k) {
    std::vector<double> u(4);
    for (auto& v : u) v = unif(gen);
    const auto back = m.inverse_rosenblatt(m.rosenblatt(u));
    for (std::size_t j = 0; j < 4; ++j) worst = std::max(worst, std::abs(back[j] - u[j]));
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Rosenblatt, SamplesBecomeUniform) {
  const auto m = reference_model();
  const auto w = m.rosenblatt(m.sample_u(10000, 77, 4), 4);
  for (std::size_t j = 0; j < 4; ++j) {
    const auto col = w.column(j);
    EXPECT_GT(oracle::ks_pvalue(oracle::ks_statistic(col), col.size()), 0.01) << "coordinate " << j;
  }
  // Coordinates should also be mutually independent.
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = a + 1; b < 4; ++b)
      EXPECT_LT(std::abs(kendall_tau(w.column(a), w.column(b))), 0.03);
}

TEST(Rosenblatt, RejectsPointsOutsideTheCube) {
  const auto m = reference_model();
  const std::vector<double> bad = {0.2, 1.0, 0.5, 0.5};
  EXPECT_THROW(m.rosenblatt(bad), DomainError);
  const std::vector<double> short_point = {0.2, 0.5};
  EXPECT_THROW(m.rosenblatt(short_point), Error);
}

TEST(Model, RejectsShapeMismatch) {
  auto s = reference_structure();
  EXPECT_THROW(FittedVine(s, {{PairCopula()}}, names_for(4)), SchemaError);
  EXPECT_THROW(independence_vine(s, names_for(3)), Error);
}
