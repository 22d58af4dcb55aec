#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "vinecop/dependence.hpp"
#include "vinecop/error.hpp"
#include "vinecop/fit.hpp"

using namespace vinecop;

namespace {

std::pair<std::vector<double>, std::vector<double>> uniform_pairs(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = u(gen);
    b[i] = u(gen);
  }
  return {a, b};
}

}  // namespace

TEST(Criterion, Formulas) {
  EXPECT_DOUBLE_EQ(criterion_value(Criterion::AIC, 10.0, 2, 100), -20.0 + 4.0);
  EXPECT_DOUBLE_EQ(criterion_value(Criterion::BIC, 10.0, 2, 100), -20.0 + 2.0 * std::log(100.0));
  EXPECT_DOUBLE_EQ(criterion_value(Criterion::LogLik, 10.0, 2, 100), -10.0);
  EXPECT_EQ(criterion_from_name("BIC"), Criterion::BIC);
  EXPECT_EQ(criterion_name(Criterion::AIC), "aic");
  EXPECT_THROW(criterion_from_name("hqc"), Error);
}

TEST(Candidates, RedundantFamiliesOnlyAtZero) {
  const auto all = all_candidates();
  EXPECT_EQ(all.size(), 24u);
  for (const auto& c : all) {
    if (rotation_is_redundant(c.family)) {
      EXPECT_EQ(c.rotation, Rotation::R0);
    }
  }
  const Family fams[] = {Family::Clayton, Family::Frank};
  EXPECT_EQ(candidates_for(fams).size(), 5u);
}

TEST(FitPair, IndependentDataSelectsIndependenceUnderBic) {
  PairFitOptions opts;
  opts.criterion = Criterion::BIC;
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto [a, b] = uniform_pairs(2000, seed);
    if (fit_pair(a, b, opts).copula.family() == Family::Independence) ++hits;
  }
  EXPECT_GE(hits, 19);
}

TEST(FitPair, RecoversClayton) {
  PairCopula truth(Family::Clayton, Rotation::R0, {3.0});
  auto [a, b] = oracle::sample_pair(truth, 5000, 77);
  auto fit = fit_pair(a, b);
  EXPECT_EQ(fit.copula.family(), Family::Clayton);
  EXPECT_EQ(fit.copula.rotation(), Rotation::R0);
  EXPECT_NEAR(fit.copula.tau(), 0.6, 0.03);
}

class FitConsistency : public ::testing::TestWithParam<int> {};

TEST_P(FitConsistency, RecoversModelTau) {
  const auto fs = oracle::family_settings()[static_cast<std::size_t>(GetParam())];
  PairCopula truth(fs.family, Rotation::R0, fs.params[fs.params.size() > 1 ? 1 : 0]);
  auto [a, b] = oracle::sample_pair(truth, 10000, 500 + static_cast<std::uint64_t>(GetParam()));
  auto fit = fit_pair(a, b);
  EXPECT_NEAR(fit.copula.tau(), truth.tau(), 0.03) << truth.str() << " -> " << fit.copula.str();
}

INSTANTIATE_TEST_SUITE_P(AllFamilies, FitConsistency, ::testing::Range(0, 9));

TEST(FitPair, NegativeDependenceSkipsPositiveRotations) {
  PairCopula truth(Family::Gumbel, Rotation::R90, {2.0});
  auto [a, b] = oracle::sample_pair(truth, 3000, 5);
  auto fit = fit_pair(a, b);
  EXPECT_LT(fit.copula.tau(), -0.4);
  EXPECT_EQ(fit.report.front().copula.family(), Family::Independence);
  for (const auto& r : fit.report) {
    if (rotation_is_redundant(r.copula.family())) continue;
    EXPECT_TRUE(r.copula.rotation() == Rotation::R90 || r.copula.rotation() == Rotation::R270)
        << r.copula.str();
  }
}

TEST(FitPair, ReportIndependentOfThreads) {
  PairCopula truth(Family::BB1, Rotation::R180, {1.4, 0.6});
  auto [a, b] = oracle::sample_pair(truth, 1500, 9);
  PairFitOptions one, many;
  many.threads = 8;
  auto f1 = fit_pair(a, b, one);
  auto f8 = fit_pair(a, b, many);
  ASSERT_EQ(f1.report.size(), f8.report.size());
  for (std::size_t i = 0; i < f1.report.size(); ++i) {
    EXPECT_EQ(f1.report[i].copula, f8.report[i].copula);
    EXPECT_EQ(f1.report[i].loglik, f8.report[i].loglik);
  }
  EXPECT_EQ(f1.selected, f8.selected);
}

TEST(FitPair, SelectedScoreIsBest) {
  PairCopula truth(Family::Frank, Rotation::R0, {4.0});
  auto [a, b] = oracle::sample_pair(truth, 2000, 13);
  for (auto crit : {Criterion::AIC, Criterion::BIC, Criterion::LogLik}) {
    PairFitOptions opts;
    opts.criterion = crit;
    auto fit = fit_pair(a, b, opts);
    const auto score = [&](const CandidateFit& r) {
      return criterion_value(crit, r.loglik, r.copula.parameter_count(), a.size());
    };
    for (const auto& r : fit.report) {
      if (r.ok) {
        EXPECT_LE(score(fit.report[fit.selected]), score(r));
      }
    }
    EXPECT_NEAR(fit.loglik, fit.copula.log_likelihood(a, b), 1e-6 * std::abs(fit.loglik) + 1e-9);
  }
}

TEST(FitPair, RejectsBadInput) {
  std::vector<double> few(5, 0.5);
  EXPECT_THROW(fit_pair(few, few), Error);
  auto [a, b] = uniform_pairs(50, 1);
  a[3] = 1.0;
  EXPECT_THROW(fit_pair(a, b), DomainError);
  EXPECT_THROW(fit_pair(DataMatrix(20, {"a", "b", "c"}, Scale::Copula)), Error);
}
