#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "vinecop/data_matrix.hpp"
#include "vinecop/dependence.hpp"
#include "vinecop/vine.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = VINECOP_CLI;
const std::string kData = VINECOP_TEST_DATA;

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

vinecop::DataMatrix parse_csv(const std::string& text) {
  std::istringstream in(text);
  return vinecop::read_csv(in);
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("vinecop_cli_" + std::string(info->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  Outcome invoke(const std::string& args) const {
    const std::string err = path("stderr.txt");
    const std::string cmd = kCli + " " + args + " 2>" + err;
    Outcome r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof(buf), p)) > 0) r.out.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err);
    return r;
  }

  void write_uniform(const std::string& file, std::size_t n, std::size_t d, std::uint64_t seed) const {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::ofstream out(file);
    for (std::size_t j = 0; j < d; ++j) out << (j ? "," : "") << "x" << j + 1;
    out << "\n";
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) out << (j ? "," : "") << vinecop::format_number(unif(gen));
      out << "\n";
    }
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, ExtractMatchesGolden) {
  const auto r = invoke("extract --input " + kData + "/fixture --config " + kData + "/geo.json --out " +
                     path("params.csv"));
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(path("params.csv")), slurp(kData + "/fixture_expected.csv"));
  const auto quiet = invoke("extract --quiet --input " + kData + "/fixture --config " + kData + "/geo.json");
  EXPECT_EQ(quiet.out, slurp(kData + "/fixture_expected.csv"));
  EXPECT_EQ(quiet.err, "");
}

TEST_F(Cli, ExtractWithoutConfigNamesTheFlag) {
  const auto r = invoke("extract --input " + kData + "/fixture");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--config"), std::string::npos) << r.err;
}

TEST_F(Cli, ExtractRadiusFlag) {
  const std::string base = "extract --quiet --input " + kData + "/two_cars --config " + kData + "/geo.json";
  const auto wide = parse_csv(invoke(base).out);
  const auto narrow = parse_csv(invoke(base + " --radius 5").out);
  ASSERT_EQ(wide.rows(), 6u);
  ASSERT_EQ(narrow.rows(), 6u);
  const auto col = wide.index_of("TrafficCar");
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(wide(i, col), 1.0);
    EXPECT_EQ(narrow(i, col), 0.0);
  }
}

TEST_F(Cli, ExtractPartialAndTotalFailure) {
  const std::string cfg = " --config " + kData + "/geo.json";
  const auto partial = invoke("extract --input " + kData + "/fixture --input " + kData + "/broken" + cfg);
  EXPECT_EQ(partial.code, 2);
  EXPECT_NE(partial.err.find("02_tracks.csv"), std::string::npos) << partial.err;
  EXPECT_EQ(partial.out, slurp(kData + "/fixture_expected.csv"));
  const auto total = invoke("extract --input " + kData + "/broken" + cfg);
  EXPECT_EQ(total.code, 1);
  const auto bad_cfg = invoke("extract --input " + kData + "/fixture --config " + kData + "/missing.json");
  EXPECT_EQ(bad_cfg.code, 1);
}

TEST_F(Cli, TauOnMonotoneData) {
  {
    std::ofstream out(path("mono.csv"));
    out << "a,b\n";
    for (int i = 1; i <= 30; ++i) out << i << "," << std::exp(0.1 * i) << "\n";
  }
  const auto r = invoke("tau --input " + path("mono.csv") + " --format csv");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out,
            "statistic,variable,a,b\n"
            "tau,a,1.000000,1.000000\n"
            "tau,b,1.000000,1.000000\n"
            "rho,a,1.000000,1.000000\n"
            "rho,b,1.000000,1.000000\n");
}

TEST_F(Cli, TauTableLayout) {
  const auto r = invoke("tau --input " + kData + "/fixture_expected.csv");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, slurp(kData + "/tau_expected.txt"));
}

TEST_F(Cli, TauValuesMatchBruteForce) {
  const auto r = invoke("tau --input " + kData + "/fixture_expected.csv --format csv --columns DistCar,VelCar");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto x = vinecop::read_csv_file(kData + "/fixture_expected.csv", {"DistCar", "VelCar"});
  const double tau = oracle::brute_tau_b(x.column(0), x.column(1));
  const double rho = oracle::brute_spearman(x.column(0), x.column(1));
  char line[128];
  std::snprintf(line, sizeof(line), "tau,DistCar,1.000000,%.6f\n", tau);
  EXPECT_NE(r.out.find(line), std::string::npos) << r.out;
  std::snprintf(line, sizeof(line), "rho,DistCar,1.000000,%.6f\n", rho);
  EXPECT_NE(r.out.find(line), std::string::npos) << r.out;
}

TEST_F(Cli, FitIndependentDataUnderBic) {
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    write_uniform(path("u.csv"), 5000, 4, seed);
    const auto r = invoke("fit --quiet --copula-scale --criterion bic --input " + path("u.csv") + " --out " +
                       path("m.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto model = vinecop::load_model(path("m.json"));
    EXPECT_EQ(oracle::validate_regular_vine(model.structure()), "");
    EXPECT_FALSE(model.has_marginals());
    bool all = true;
    for (const auto& tree : model.copulas())
      for (const auto& c : tree) all = all && c.family() == vinecop::Family::Independence;
    hits += all;
  }
  EXPECT_GE(hits, 18);
}

TEST_F(Cli, FitSampleDensityRosenblatt) {
  const auto truth = vinecop::FittedVine(
      vinecop::build_structure(3, [](const vinecop::VineEdge& e) { return e.tree == 1 ? 1.0 / (1.0 + e.a + e.b) : 0.0; }),
      {{vinecop::PairCopula(vinecop::Family::Clayton, vinecop::Rotation::R0, {2.0}),
        vinecop::PairCopula(vinecop::Family::Frank, vinecop::Rotation::R0, {-5.0})},
       {vinecop::PairCopula(vinecop::Family::Gaussian, vinecop::Rotation::R0, {0.4})}},
      {"p", "q", "r"});
  vinecop::DataMatrix x = truth.sample_u(3000, 3);
  for (std::size_t i = 0; i < x.rows(); ++i) x(i, 2) = 50.0 * x(i, 2) * x(i, 2);
  x.set_scale(vinecop::Scale::Data);
  vinecop::write_csv_file(x, path("x.csv"));

  const auto fit = invoke("fit --input " + path("x.csv") + " --families Clayton,Frank,Gaussian --out " + path("m.json"));
  ASSERT_EQ(fit.code, 0) << fit.err;
  EXPECT_NE(fit.err.find("tau="), std::string::npos) << fit.err;
  const auto model = vinecop::load_model(path("m.json"));
  ASSERT_TRUE(model.has_marginals());

  const std::string sample = "sample --model " + path("m.json") + " --n 5000 --seed 42";
  const auto s1 = invoke(sample + " --threads 1 --out " + path("s1.csv"));
  const auto s2 = invoke(sample + " --threads 8 --out " + path("s2.csv"));
  ASSERT_EQ(s1.code, 0) << s1.err;
  ASSERT_EQ(s2.code, 0) << s2.err;
  EXPECT_EQ(slurp(path("s1.csv")), slurp(path("s2.csv")));
  EXPECT_NE(slurp(path("s1.csv")), invoke(sample + " --seed 43 --out -").out);

  // Tree-1 pairs are unconditional, so their sample tau is the copula tau.
  const auto s = vinecop::read_csv_file(path("s1.csv"));
  EXPECT_EQ(s.names(), model.names());
  for (std::size_t i = 0; i < model.structure().trees[0].size(); ++i) {
    const auto& e = model.structure().trees[0][i];
    EXPECT_NEAR(vinecop::kendall_tau(s.column(e.a), s.column(e.b)), model.copulas()[0][i].tau(), 0.03);
  }

  const auto d = invoke("density --model " + path("m.json") + " --input " + path("x.csv") + " --out -");
  ASSERT_EQ(d.code, 0) << d.err;
  const auto dens = parse_csv(d.out);
  ASSERT_EQ(dens.rows(), x.rows());
  EXPECT_EQ(dens.names(), std::vector<std::string>{"log_density"});
  for (std::size_t i = 0; i < 20; ++i) EXPECT_NEAR(dens(i, 0), model.log_density(x.row(i)), 1e-9);

  const auto su = invoke("sample --model " + path("m.json") + " --n 200 --copula-scale --out " + path("u.csv"));
  ASSERT_EQ(su.code, 0) << su.err;
  const auto w = invoke("rosenblatt --model " + path("m.json") + " --input " + path("u.csv") + " --out " + path("w.csv"));
  ASSERT_EQ(w.code, 0) << w.err;
  const auto back = invoke("rosenblatt --inverse --model " + path("m.json") + " --input " + path("w.csv") + " --out -");
  ASSERT_EQ(back.code, 0) << back.err;
  const auto u = vinecop::read_csv_file(path("u.csv"));
  const auto ub = parse_csv(back.out);
  ASSERT_EQ(ub.rows(), u.rows());
  for (std::size_t i = 0; i < u.values().size(); ++i) EXPECT_NEAR(ub.values()[i], u.values()[i], 1e-7);

  const auto svg = invoke("sample --model " + path("m.json") + " --n 300 --out " + path("s.csv") + " --svg " +
                       path("s.svg") + " --overlay " + path("x.csv"));
  ASSERT_EQ(svg.code, 0) << svg.err;
  const auto text = slurp(path("s.svg"));
  EXPECT_NE(text.find("<svg"), std::string::npos);
  EXPECT_NE(text.find("</svg>"), std::string::npos);
}

TEST_F(Cli, HelpOnEverySubcommand) {
  const auto top = invoke("--help");
  EXPECT_EQ(top.code, 0);
  for (const std::string sub : {"extract", "tau", "fit", "sample", "density", "rosenblatt"}) {
    EXPECT_NE(top.out.find(sub), std::string::npos);
    const auto r = invoke(sub + " --help");
    EXPECT_EQ(r.code, 0) << sub;
    for (const char* flag : {"--seed", "--threads", "--quiet"})
      EXPECT_NE(r.out.find(flag), std::string::npos) << sub << " " << flag;
  }
  EXPECT_NE(invoke("extract --help").out.find("--radius"), std::string::npos);
  EXPECT_NE(invoke("fit --help").out.find("--criterion"), std::string::npos);
  EXPECT_NE(invoke("sample --help").out.find("--overlay"), std::string::npos);
}

TEST_F(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(invoke("").code, 1);
  EXPECT_EQ(invoke("frobnicate").code, 1);
  EXPECT_EQ(invoke("tau").code, 1);
  EXPECT_EQ(invoke("fit --input " + kData + "/fixture_expected.csv --criterion hqc").code, 1);
  const auto missing = invoke("sample --model " + path("none.json"));
  EXPECT_EQ(missing.code, 1);
  EXPECT_NE(missing.err.find("none.json"), std::string::npos) << missing.err;
}
