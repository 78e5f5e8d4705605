#include "ract/cli.hpp"
#include "ract/error.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace fs = std::filesystem;
using ract::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "ract");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("ract_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write_group(const std::string& name, int n, int p, double scale, unsigned seed) {
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> z;
    const auto path = (dir_ / name).string();
    std::ofstream f(path);
    for (int j = 0; j < p; ++j) f << (j ? "," : "") << "x" << j;
    f << '\n';
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < p; ++j) f << (j ? "," : "") << (j == 0 ? scale : 1.0) * z(eng);
      f << '\n';
    }
    return path;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const std::string& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

}  // namespace

TEST(CliHelpers, ParseGrid) {
  EXPECT_EQ(ract::cli::parse_grid("0:1:3"), (std::vector<double>{0.0, 0.5, 1.0}));
  EXPECT_EQ(ract::cli::parse_grid("0.1,2"), (std::vector<double>{0.1, 2.0}));
  EXPECT_THROW(ract::cli::parse_grid("1:2"), std::exception);
  EXPECT_THROW(ract::cli::parse_grid("a,b"), std::exception);
}

TEST(CliHelpers, ValidateConfig) {
  ract::cli::RunConfig c;
  c.B = 18;
  EXPECT_THROW(c.validate(), ract::InvalidConfigError);
  c.B = 19;
  EXPECT_NO_THROW(c.validate());
  c.alpha = 1.0;
  EXPECT_THROW(c.validate(), ract::InvalidConfigError);
  c.alpha = 0.05;
  c.workers = 0;
  EXPECT_THROW(c.validate(), ract::InvalidConfigError);
}

TEST_F(CliTest, UsageErrorsExit64) {
  EXPECT_EQ(invoke({"bogus"}).code, 64);
  EXPECT_EQ(invoke({"test", "--B", "5", "--group1", "a", "--group2", "b"}).code, 64);
  EXPECT_EQ(invoke({"simulate", "--scenario", "S7"}).code, 64);
  EXPECT_EQ(invoke({"power", "--tau-grid", "0,1", "--cutoff-grid", "0.5"}).code, 64);
  const auto g1 = path("bad.csv");
  std::ofstream(g1) << "a,b\n1,2\n3\n";
  EXPECT_EQ(invoke({"test", "--group1", g1, "--group2", g1}).code, 64);
  // Feature columns must agree between the two files.
  const auto a = write_group("a.csv", 10, 3, 1.0, 2);
  const auto b = write_group("b.csv", 10, 4, 1.0, 3);
  EXPECT_EQ(invoke({"test", "--group1", a, "--group2", b, "--B", "19"}).code, 64);
}

TEST_F(CliTest, DataErrorsExit65) {
  const auto tiny = write_group("tiny.csv", 2, 3, 1.0, 1);
  const auto ok = write_group("ok.csv", 10, 3, 1.0, 2);
  EXPECT_EQ(invoke({"test", "--group1", tiny, "--group2", ok, "--B", "19"}).code, 65);
}

TEST_F(CliTest, TestReportAndScriptingExit) {
  const auto g1 = write_group("g1.csv", 30, 5, 6.0, 4);
  const auto g2 = write_group("g2.csv", 30, 5, 1.0, 5);
  const auto out = path("report.json");
  auto r = invoke({"test", "--group1", g1, "--group2", g2, "--B", "99", "--seed", "3", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(slurp(out));
  EXPECT_EQ(j["B"], 99);
  EXPECT_TRUE(j["reject_minp"].get<bool>());
  EXPECT_LE(j["p_minp"].get<double>(), 0.05);
  EXPECT_EQ(j["metadata"]["config_hash"].get<std::string>().size(), 16u);

  r = invoke({"test", "--group1", g1, "--group2", g2, "--B", "99", "--seed", "3", "--scripting"});
  EXPECT_EQ(r.code, 2);
  // Same seed, same bytes, any worker count.
  const auto again = invoke({"test", "--group1", g1, "--group2", g2, "--B", "99", "--seed", "3", "--workers", "3",
                             "--out", path("again.json")});
  ASSERT_EQ(again.code, 0);
  EXPECT_EQ(slurp(path("again.json")), slurp(out));
}

TEST_F(CliTest, PowerCsvShape) {
  const auto out = path("power.csv");
  const auto r = invoke({"power", "--scenario", "S1", "--p", "10", "--n1", "8", "--n2", "8", "--tau-grid",
                       "0:2.5:6", "--methods", "RACT,KyFan-1", "--reps", "4", "--B", "19", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(slurp(out));
  std::vector<std::string> ls;
  for (std::string l; std::getline(in, l);) ls.push_back(l);
  ASSERT_EQ(ls.size(), 2u + 12u);
  EXPECT_EQ(ls[0][0], '#');
  EXPECT_EQ(ls[1], "scenario,method,tau_sq,rate,se,reps,mean_K");
}

TEST_F(CliTest, DiagnoseCrossover) {
  const auto r = invoke({"diagnose", "--prop2", "--c", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\n2,5,"), std::string::npos);
  EXPECT_NE(r.out.find(",0.25,"), std::string::npos);
}

TEST_F(CliTest, NullshapeWritesRequestedColumns) {
  const auto r = invoke({"nullshape", "--covariance", "AR", "--k-list", "1,2", "--n", "20", "--p", "6",
                       "--reps", "5", "--raw"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("dataset,T1_std,T2_std,T1,T2"), std::string::npos);
}
