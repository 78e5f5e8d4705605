#include "ract/error.hpp"
#include "ract/report.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

using namespace ract;

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
  return h;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

RunMetadata meta() {
  RunMetadata m;
  m.command = "power";
  m.master_seed = 11;
  m.B = 99;
  m.config_hash = "00ff";
  return m;
}

}  // namespace

TEST(ConfigHash, MatchesFnvOfCompactDump) {
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);  // published test vector
  const nlohmann::json j = {{"B", 199}, {"alpha", 0.05}};
  const std::string h = config_hash(j);
  ASSERT_EQ(h.size(), 16u);
  EXPECT_EQ(std::strtoull(h.c_str(), nullptr, 16), fnv1a(j.dump()));
  EXPECT_NE(h, config_hash({{"B", 200}, {"alpha", 0.05}}));
  EXPECT_EQ(config_hash(nlohmann::json::parse(R"({"alpha":0.05,"B":199})")), h);
}

TEST(FormatDouble, RoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5, 12345678.9}) {
    EXPECT_EQ(std::strtod(format_double(x).c_str(), nullptr), x);
  }
  EXPECT_EQ(format_double(0.25), "0.25");
  EXPECT_EQ(format_double(3.0), "3");
}

TEST(ExperimentCsv, HeaderAndRows) {
  ExperimentResult res;
  res.grid_name = "tau_sq";
  res.rows.push_back({"S1", "RACT", 0.5, 0.25, 0.01, 100, 3.5});
  res.rows.push_back({"S1", "KyFan-1", 0.5, 0.2, 0.02, 100, 0.0});
  std::ostringstream out;
  write_experiment_csv(out, res, meta());
  const auto ls = lines(out.str());
  ASSERT_EQ(ls.size(), 4u);
  EXPECT_EQ(ls[0].rfind("# ract version=", 0), 0u);
  EXPECT_NE(ls[0].find("command=power seed=11 B=99 config_hash=00ff"), std::string::npos);
  EXPECT_EQ(ls[1], "scenario,method,tau_sq,rate,se,reps,mean_K");
  EXPECT_EQ(ls[2], "S1,RACT,0.5,0.25,0.01,100,3.5");

  const auto j = experiment_json(res, meta());
  EXPECT_EQ(j["grid"], "tau_sq");
  EXPECT_EQ(j["rows"].size(), 2u);
  EXPECT_EQ(j["metadata"]["B"], 99);
}

TEST(NullShapeCsv, Columns) {
  NullShapeResult r;
  r.k_list = {1, 3};
  r.raw = Eigen::MatrixXd::Constant(2, 2, 7.0);
  r.standardized = Eigen::MatrixXd::Zero(2, 2);
  std::ostringstream a, b;
  write_nullshape_csv(a, r, meta(), false);
  write_nullshape_csv(b, r, meta(), true);
  const auto la = lines(a.str()), lb = lines(b.str());
  ASSERT_EQ(la.size(), 4u);
  EXPECT_EQ(la[1], "dataset,T1_std,T3_std");
  EXPECT_EQ(lb[1], "dataset,T1_std,T3_std,T1,T3");
  EXPECT_NE(lb[2].find(",7,7"), std::string::npos);
}

TEST(Diagnose, CrossoverTableAndCsv) {
  const auto rows = diagnose_table(crossover_example(1.0), 5);
  ASSERT_EQ(rows.size(), 2u);  // rank 2 caps kmax
  EXPECT_FALSE(rows[0].has_increment);
  EXPECT_DOUBLE_EQ(rows[1].increment.beta, 0.25);
  std::ostringstream out;
  write_diagnose_csv(out, rows, meta());
  const auto ls = lines(out.str());
  ASSERT_EQ(ls.size(), 4u);
  EXPECT_EQ(ls[1], "k,signal,omega_sq,snr,beta,gamma,threshold,snr_ge_prev");
  EXPECT_EQ(ls[2].rfind("1,4,", 0), 0u);
  EXPECT_EQ(ls[3].rfind("2,5,", 0), 0u);
  EXPECT_THROW(diagnose_table(PopulationPair(SymmetricMatrix::identity(3), SymmetricMatrix::identity(3)), 2),
               DegenerateInputError);
}

TEST(ReportJson, TimingOptional) {
  TestReport r;
  r.runtime_seconds = 1.5;
  EXPECT_FALSE(report_json(r, meta()).contains("runtime_seconds"));
  EXPECT_EQ(report_json(r, meta(), true)["runtime_seconds"], 1.5);
  EXPECT_EQ(report_json(r, meta())["metadata"]["command"], "power");
}
