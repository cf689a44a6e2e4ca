#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"

#include "ldsim/cli.h"

namespace ldsim {
namespace {

namespace fs = std::filesystem;

class Cli_test : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ldsim_cli_" + std::string{::testing::UnitTest::GetInstance()->current_test_info()->name()});
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  auto run(std::vector<std::string> args) -> int {
    args.insert(args.begin(), {"--out", dir_.string()});
    out_.str("");
    err_.str("");
    return run_cli(args, out_, err_);
  }

  auto read(const std::string& name) -> std::string {
    auto in = std::ifstream{dir_ / name};
    return {std::istreambuf_iterator<char>{in}, std::istreambuf_iterator<char>{}};
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(Cli_test, simulate_writes_outputs) {
  EXPECT_EQ(run({"simulate", "--n", "1e2", "--mu", "1e-2", "--sites", "5", "--replicates", "3"}), k_exit_ok);
  auto b = read("b.csv");
  EXPECT_EQ(b.rfind("replicate,site,B,B_hat,events\n", 0), 0u);
  EXPECT_EQ(std::count(b.begin(), b.end(), '\n'), 16);
  EXPECT_EQ(read("sfs.csv").rfind("k,count\n", 0), 0u);
  EXPECT_EQ(read("tail.csv").rfind("a,count,theory_mean\n", 0), 0u);
  auto summary = nlohmann::json::parse(read("summary.json"));
  EXPECT_EQ(summary.at("n"), 100);
  EXPECT_EQ(summary.at("replicates"), 3);
}

TEST_F(Cli_test, json_format) {
  EXPECT_EQ(run({"--format", "json", "ld", "pmf", "--c", "1", "--max", "2"}), k_exit_ok);
  auto rows = nlohmann::json::parse(read("ld_pmf.json"));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_NEAR(rows[0].at("pmf").get<double>(), 0.36787944117144232, 1e-15);
}

TEST_F(Cli_test, ld_tail_and_isa) {
  EXPECT_EQ(run({"ld", "tail", "--c", "2", "--m", "200"}), k_exit_ok);
  EXPECT_NE(read("ld_tail.csv").find("200,0.0105011546"), std::string::npos);
  EXPECT_EQ(run({"isa", "--n", "1e9", "--mu", "1e-9", "--sites", "3e9"}), k_exit_ok);
  auto isa = nlohmann::json::parse(read("isa.json"));
  EXPECT_NEAR(isa.at("p").get<double>(), 0.59399414988415607, 1e-9);
}

TEST_F(Cli_test, estimate_from_bundled_data) {
  auto csv = (fs::path{LDSIM_SOURCE_DIR} / "data" / "lung.csv").string();
  EXPECT_EQ(run({"estimate", "--input", csv, "--sites", "3e8", "--window", "0.1:0.25"}), k_exit_ok);
  auto j = nlohmann::json::parse(read("estimate.json"));
  EXPECT_EQ(j.at("count"), 112);
  EXPECT_NEAR(j.at("mu_hat").get<double>(), 6.2e-8, 0.05e-8);
}

TEST_F(Cli_test, validation_errors_exit_2) {
  EXPECT_EQ(run({"simulate", "--n", "0"}), k_exit_validation);
  EXPECT_EQ(run({"simulate", "--n", "10", "--mu", "2"}), k_exit_validation);
  EXPECT_EQ(run({"simulate", "--n", "10", "--death", "1"}), k_exit_validation);
  EXPECT_EQ(run({"simulate", "--n", "1.5"}), k_exit_validation);
  EXPECT_EQ(run({"estimate", "--input", "x.csv", "--sites", "10", "--window", "0.3:0.1"}), k_exit_validation);
  EXPECT_EQ(run({"genld", "pgf", "--lambda", "1", "--a", "1", "--b", "2", "--c", "1"}), k_exit_validation);
  EXPECT_EQ(run({"bogus"}), k_exit_validation);
  EXPECT_FALSE(err_.str().empty());
}

TEST_F(Cli_test, missing_input_exits_3) {
  EXPECT_EQ(run({"estimate", "--input", "/nonexistent.csv", "--sites", "10"}), k_exit_io);
  EXPECT_EQ(run({"compare", "--input", "/nonexistent.csv", "--c", "2"}), k_exit_io);
}

TEST_F(Cli_test, compare_reads_simulated_counts) {
  ASSERT_EQ(run({"simulate", "--n", "200", "--mu", "5e-3", "--replicates", "200"}), k_exit_ok);
  auto b = (dir_ / "b.csv").string();
  EXPECT_EQ(run({"compare", "--input", b, "--c", "2"}), k_exit_ok);
  EXPECT_EQ(out_.str().rfind("ks ", 0), 0u);
}

TEST_F(Cli_test, help_exits_0) {
  EXPECT_EQ(run({"--help"}), k_exit_ok);
  EXPECT_NE(out_.str().find("simulate"), std::string::npos);
}

}  // namespace
}  // namespace ldsim
