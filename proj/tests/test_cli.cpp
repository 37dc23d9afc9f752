#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <sys/wait.h>

#include "oql/cli.hpp"
#include "oql/io.hpp"

using namespace oql;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "oql");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    unsetenv("OQL_SEED");
    dir_ = fs::temp_directory_path() /
           ("oql_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, VerifyHalvingPasses) {
  const auto r = cli({"verify", "--construction", "halving", "--n", "1", "--T", "8", "--out", path("c.json")});
  EXPECT_EQ(r.code, exit_code::ok) << r.err;
  const auto cert = json::parse(read_file(path("c.json")));
  EXPECT_EQ(cert["construction"], "halving");
  EXPECT_EQ(cert["mode"], "exhaustive");
  EXPECT_EQ(cert["sample_count"], 256);
  EXPECT_TRUE(cert["pass_at_delta"].get<bool>());
  EXPECT_NEAR(cert["min_margin"].get<double>(), std::ldexp(1.0, -9), 1e-15);
  for (const char* key : {"n", "T", "delta", "paths", "seed"}) EXPECT_TRUE(cert.contains(key)) << key;
}

TEST_F(CliTest, VerifyFailsAtTooLargeDelta) {
  const auto r = cli({"verify", "--construction", "halving", "--n", "1", "--T", "8", "--delta", "0.5"});
  EXPECT_EQ(r.code, exit_code::domain_failure);
  EXPECT_NE(r.err.find("FAIL"), std::string::npos);
}

TEST_F(CliTest, VerifyPureReportsPrefixViolation) {
  const auto r = cli({"verify", "--construction", "pure", "--n", "2", "--T", "3", "--budget", "10000"});
  EXPECT_EQ(r.code, exit_code::ok) << r.err;
  const auto cert = json::parse(r.out);
  EXPECT_NEAR(cert["delta"].get<double>(), std::ldexp(1.0, -5) / std::sqrt(6.0), 1e-15);
  EXPECT_GT(cert["prefix_measurability"]["max_discrepancy"].get<double>(), 0.0);
}

TEST_F(CliTest, CompleteBoundaryIsRankOne) {
  const double b = 1.0 / (2.0 * std::sqrt(2.0));
  write_file(path("p.json"), json{{"dim", 3}, {"first_row", {b, b}}}.dump());
  const auto r = cli({"complete", "--input", path("p.json"), "--out", path("m.json")});
  ASSERT_EQ(r.code, exit_code::ok) << r.err;
  const CMatrix m = matrix_from_json(json::parse(read_file(path("m.json"))));
  const auto d = hermitian_eigen(HermitianOperator(m));
  EXPECT_NEAR(d.values(0), 0.0, 1e-12);
  EXPECT_NEAR(d.values(1), 0.0, 1e-12);
  EXPECT_NEAR(d.values(2), 1.0, 1e-12);
  EXPECT_NE(r.out.find("min_eigenvalue"), std::string::npos);
}

TEST_F(CliTest, CompleteZeroRowIsDiagonal) {
  write_file(path("p.json"), R"({"dim": 4, "first_row": [0, 0, 0]})");
  const auto r = cli({"complete", "--input", path("p.json")});
  ASSERT_EQ(r.code, exit_code::ok) << r.err;
  const CMatrix m = matrix_from_json(json::parse(r.out));
  CMatrix expected = CMatrix::Zero(4, 4);
  expected(0, 0) = 0.5;
  for (int i = 1; i < 4; ++i) expected(i, i) = 0.5 / 3;
  EXPECT_EQ(m, expected);
}

TEST_F(CliTest, CompleteErrors) {
  write_file(path("bad.json"), R"({"dim": 3, "first_row": [0.4, 0]})");
  auto r = cli({"complete", "--input", path("bad.json")});
  EXPECT_EQ(r.code, exit_code::domain_failure);
  EXPECT_NE(r.err.find("w_12"), std::string::npos) << r.err;
  r = cli({"complete", "--input", path("missing.json")});
  EXPECT_EQ(r.code, exit_code::io_error);
  write_file(path("junk.json"), "{not json");
  r = cli({"complete", "--input", path("junk.json")});
  EXPECT_EQ(r.code, exit_code::config_error);
}

TEST_F(CliTest, ConfigErrors) {
  EXPECT_EQ(cli({"game", "--learner", "oracle"}).code, exit_code::config_error);
  EXPECT_EQ(cli({"game", "--epsilon", "0.7", "--T", "5"}).code, exit_code::config_error);
  EXPECT_EQ(cli({"game", "--adversary", "smooth", "--sigma", "0", "--T", "5"}).code, exit_code::config_error);
  EXPECT_EQ(cli({"verify", "--construction", "custom"}).code, exit_code::config_error);
  EXPECT_EQ(cli({"frobnicate"}).code, exit_code::config_error);
  EXPECT_EQ(cli({}).code, exit_code::config_error);
  EXPECT_EQ(cli({"--help"}).code, exit_code::ok);
}

TEST_F(CliTest, UnwritableOutputIsIoError) {
  const auto r = cli({"verify", "--construction", "halving", "--n", "1", "--T", "2", "--out",
                      path("no/such/dir/c.json")});
  EXPECT_EQ(r.code, exit_code::io_error);
}

TEST_F(CliTest, GoldenGameSummary) {
  const auto golden = json::parse(read_file(std::string(OQL_GOLDEN_DIR) + "/game_mmw_realizable_n2_T1000_seed42.json"));
  const auto r = cli({"game", "--learner", "mmw", "--adversary", "realizable", "--n", "2", "--T", "1000",
                      "--epsilon", "0.1", "--seed", "42"});
  ASSERT_EQ(r.code, exit_code::ok) << r.err;
  const auto got = json::parse(r.out);
  EXPECT_EQ(got["config"], golden["config"]);
  const auto& g = golden["replicates"][0];
  const auto& s = got["replicates"][0];
  for (const char* key : {"regret_vs_true", "regret_vs_hindsight", "cumulative_loss", "hindsight_loss",
                          "total_deviation"})
    EXPECT_NEAR(s[key].get<double>(), g[key].get<double>(), 1e-9 * (1 + std::abs(g[key].get<double>())))
        << key;
  for (const char* key : {"mistakes", "clipped_count", "rounds", "game_seed"}) EXPECT_EQ(s[key], g[key]) << key;
}

TEST_F(CliTest, EnvironmentSeedOverridesFlag) {
  setenv("OQL_SEED", "42", 1);
  const auto a = cli({"game", "--n", "1", "--T", "20", "--seed", "7", "--no-hindsight"});
  unsetenv("OQL_SEED");
  const auto b = cli({"game", "--n", "1", "--T", "20", "--seed", "42", "--no-hindsight"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(json::parse(a.out)["replicates"], json::parse(b.out)["replicates"]);
  EXPECT_EQ(json::parse(a.out)["config"]["seed"], 42);
}

TEST_F(CliTest, ReplicatesAreIndependentOfCountAndWorkers) {
  const auto one = cli({"game", "--n", "1", "--T", "50", "--seed", "3", "--replicates", "1", "--no-hindsight"});
  const auto eight = cli({"game", "--n", "1", "--T", "50", "--seed", "3", "--replicates", "8", "--workers", "3",
                          "--no-hindsight"});
  const auto serial = cli({"game", "--n", "1", "--T", "50", "--seed", "3", "--replicates", "8", "--workers", "1",
                           "--no-hindsight"});
  ASSERT_EQ(eight.code, 0) << eight.err;
  EXPECT_EQ(json::parse(one.out)["replicates"][0], json::parse(eight.out)["replicates"][0]);
  EXPECT_EQ(json::parse(eight.out)["replicates"], json::parse(serial.out)["replicates"]);
}

TEST_F(CliTest, TranscriptFiles) {
  auto r = cli({"game", "--n", "1", "--T", "30", "--seed", "1", "--transcript", path("t.csv"), "--summary",
                path("s.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(path("t.csv")));
  EXPECT_TRUE(fs::exists(path("s.json")));
  r = cli({"game", "--n", "1", "--T", "30", "--seed", "1", "--replicates", "2", "--transcript", path("u.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(path("u.csv.r0")));
  EXPECT_TRUE(fs::exists(path("u.csv.r1")));
}

TEST_F(CliTest, TreeAdversaryGame) {
  const auto r = cli({"game", "--adversary", "tree", "--construction", "general", "--n", "2", "--tree-T", "2",
                      "--T", "6", "--no-hindsight"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto s = json::parse(r.out);
  EXPECT_EQ(s["replicates"][0]["rounds"], 6);
}

TEST_F(CliTest, SweepRowsAndColumns) {
  const auto r = cli({"sweep", "--n", "1", "--T", "100", "--sigma", "1,0.5,0.25", "--replicates", "2",
                      "--seed", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string header, line;
  std::getline(in, header);
  EXPECT_EQ(header.rfind("n,T,sigma,epsilon,eta,learner,adversary,loss,replicates,mean_regret_true", 0), 0u);
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 3);
}

TEST_F(CliTest, SfatBruteAndRademacher) {
  auto r = cli({"sfat-brute", "--delta", "0.25", "--grid-step", "0.0625", "--t-max", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_GE(json::parse(r.out)["sfat"].get<int>(), 2);
  r = cli({"sfat-brute", "--delta", "0.0625", "--t-max", "4", "--budget", "1000"});
  EXPECT_EQ(r.code, exit_code::domain_failure);

  r = cli({"rademacher", "--T", "64", "--paths", "2000", "--exact", "--seed", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_NEAR(j["value"].get<double>(), 0.0497, 3 * j["standard_error"].get<double>() + 0.002);
}

TEST(ConfigJson, RoundTrip) {
  ExperimentConfig c;
  c.command = "sweep";
  c.n = 3;
  c.T = 77;
  c.delta = 0.125;
  c.eta = 0.3;
  c.sigma = 0.25;
  c.epsilon = 0.05;
  c.learner = LearnerKind::mmw_anytime;
  c.adversary = AdversaryKind::tree;
  c.loss = LossKind::l2;
  c.construction = Construction::pure;
  c.noise = Noise::gaussian;
  c.state = StateKind::mixed;
  c.seed = 0xffffffffffffffffULL;
  c.replicates = 5;
  const auto j = config_to_json(c);
  EXPECT_TRUE(config_from_json(json::parse(j.dump())) == c);
  ExperimentConfig d;
  EXPECT_TRUE(config_from_json(config_to_json(d)) == d);
  auto bad = j;
  bad["learner"] = "psychic";
  EXPECT_THROW(config_from_json(bad), std::invalid_argument);
}

TEST(MatrixJson, RoundTrip) {
  Rng rng(1);
  const CMatrix m = random_state(StateKind::mixed, 4, rng).matrix();
  EXPECT_EQ(matrix_from_json(json::parse(matrix_to_json(m).dump())), m);
  const PartialStarMatrix p(3, {0.1, -0.2});
  EXPECT_EQ(partial_from_json(json::parse(partial_to_json(p).dump())).first_row(), p.first_row());
  EXPECT_THROW(matrix_from_json(json{{"dim", 2}, {"re", {{1, 0}}}}), std::invalid_argument);
  EXPECT_THROW(partial_from_json(json{{"dim", 3}, {"first_row", {"a", 0}}}), std::invalid_argument);
}

TEST(Binary, ExitCodesFromTheInstalledTool) {
  auto status = [](const std::string& args) {
    const int s = std::system((std::string(OQL_BINARY) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  EXPECT_EQ(status("verify --construction halving --n 1 --T 8"), 0);
  EXPECT_EQ(status("verify --construction halving --n 1 --T 8 --delta 0.5"), 1);
  EXPECT_EQ(status("game --loss l7"), 2);
  EXPECT_EQ(status("complete --input /nonexistent/file.json"), 3);
}
