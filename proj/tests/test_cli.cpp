#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nlsinv/cli.hpp"
#include "nlsinv/config.hpp"
#include "nlsinv/solver.hpp"

using namespace nlsinv;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  fs::path dir;
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("nlsinv_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, HelpAndArgumentErrors) {
  EXPECT_EQ(invoke({"--help"}).code, cli::kOk);
  EXPECT_EQ(invoke({}).code, cli::kValidation);
  EXPECT_EQ(invoke({"frobnicate"}).code, cli::kValidation);
  EXPECT_EQ(invoke({"validate"}).code, cli::kValidation);
  EXPECT_EQ(invoke({"reconstruct", "--bogus", "1"}).code, cli::kValidation);
  EXPECT_EQ(invoke({"forward", "--m", "1"}).code, cli::kValidation);
  EXPECT_EQ(invoke({"forward", "--ntheta", "33"}).code, cli::kValidation);
  EXPECT_EQ(invoke({"sweep", "--axis", "sigma", "--values", "1"}).code, cli::kValidation);
  EXPECT_EQ(invoke({"reconstruct", "--config", "/nonexistent/cfg.json"}).code, cli::kValidation);
}

TEST(Cli, ValidatePieAndZeta) {
  const auto pie = invoke({"validate", "pie", "--m", "5"});
  EXPECT_EQ(pie.code, cli::kOk) << pie.out;
  EXPECT_EQ(pie.out.find("FAIL"), std::string::npos);
  const auto zeta = invoke({"validate", "zeta", "--m", "4", "--k", "10", "--ratio", "1.5"});
  EXPECT_EQ(zeta.code, cli::kOk) << zeta.out;
  EXPECT_NE(zeta.out.find("evanescent"), std::string::npos);
}

TEST(Cli, ValidateIdentityReportsToleranceBreach) {
  const std::vector<std::string> base{"validate", "identity", "--m", "2", "--k", "5",
                                      "--nr",     "32",       "--ntheta", "64"};
  auto loose = base;
  loose.insert(loose.end(), {"--tol", "0.5"});
  EXPECT_EQ(invoke(loose).code, cli::kOk);
  auto tight = base;
  tight.insert(tight.end(), {"--tol", "1e-12"});
  const auto r = invoke(tight);
  EXPECT_EQ(r.code, cli::kValidation);
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
}

TEST_F(CliTest, ForwardZeroPotentialRoundTripsDirichlet) {
  const auto r = invoke({"forward", "--potential", "zero", "--m", "2", "--nr", "16", "--ntheta",
                         "32", "--beta", "0.5", "--out", dir.string()});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  for (const char* f : {"config_echo.json", "u.csv", "dirichlet.csv", "neumann.csv", "report.json"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  const PolarGrid g(16, 32, 0.5);
  const auto zeta = waves::make_zeta(2, 5.0, waves::Frequency::from_xi({2.0 * kPi, 0.0}));
  BoundaryTrace expected(g);
  for (int j = 1; j <= 2; ++j)
    expected += BoundaryTrace::from_function(
        g, [&](const Vec2& x) { return waves::ce_value(zeta.zeta(j), x); });
  expected *= 0.5;
  EXPECT_EQ(read_trace_csv((dir / "dirichlet.csv").string()).values(), expected.values());
  EXPECT_EQ(load_run_config((dir / "config_echo.json").string()).beta, 0.5);
}

TEST_F(CliTest, ForwardResonantWavenumberFails) {
  const double k = std::sqrt(dirichlet_eigenvalues(PolarGrid(8, 16, 0.5)).front());
  const auto r = invoke({"forward", "--k", format_double(k), "--nr", "8", "--ntheta", "16",
                         "--out", dir.string()});
  EXPECT_EQ(r.code, cli::kSolver);
  EXPECT_NE(r.err.find("condition_warning"), std::string::npos) << r.err;
  EXPECT_NE(slurp(dir / "report.json").find("\"condition_warning\": true"), std::string::npos);
}

TEST_F(CliTest, ReconstructWritesRunDirectory) {
  const auto r = invoke({"reconstruct", "--m", "2", "--k", "4", "--nr", "24", "--ntheta", "48",
                         "--synthesis-grid", "15", "--out", dir.string()});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  for (const char* f : {"coefficients.csv", "c_inv.csv", "metrics.json", "config_echo.json"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  const std::string metrics = slurp(dir / "metrics.json");
  for (const char* key : {"max_abs_error", "l2_error", "wall_seconds", "missing_count", "partial"})
    EXPECT_NE(metrics.find(key), std::string::npos) << key;
  EXPECT_EQ(slurp(dir / "c_inv.csv").substr(0, 22), "i,j,x1,x2,c_inv,c_true");
}

TEST_F(CliTest, ConfigFileAndFlagPrecedence) {
  fs::create_directories(dir);
  {
    std::ofstream os(dir / "cfg.json");
    os << R"({"m": 2, "k": 4, "grid": {"Nr": 24, "Ntheta": 48}, "synthesis_grid": 15,
              "solver": {"max_fixed_point_iters": 1}})";
  }
  const auto partial = invoke({"reconstruct", "--config", (dir / "cfg.json").string(), "--out",
                               (dir / "run").string()});
  EXPECT_EQ(partial.code, cli::kPartial) << partial.err;
  const auto exact = invoke({"reconstruct", "--config", (dir / "cfg.json").string(), "--mode",
                             "exact_linearized", "--out", (dir / "run2").string()});
  EXPECT_EQ(exact.code, cli::kOk) << exact.err;
  const RunConfig echo = load_run_config((dir / "run2" / "config_echo.json").string());
  EXPECT_EQ(echo.mode, measure::Mode::ExactLinearized);
  EXPECT_EQ(echo.solver.max_fixed_point_iters, 1);

  {
    std::ofstream os(dir / "bad.json");
    os << R"({"m": 2, "wavenumber": 4})";
  }
  EXPECT_EQ(invoke({"reconstruct", "--config", (dir / "bad.json").string()}).code,
            cli::kValidation);
}

TEST_F(CliTest, SweepWritesSummary) {
  const auto r = invoke({"sweep", "--axis", "m", "--values", "2", "3", "--k", "4", "--nr", "24",
                         "--ntheta", "48", "--synthesis-grid", "15", "--mode", "exact_linearized",
                         "--out", dir.string()});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  std::istringstream csv(slurp(dir / "sweep.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "m,max_abs_error,l2_error,wall_seconds,missing_count,partial");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 2);
  EXPECT_TRUE(fs::exists(dir / "m_2" / "metrics.json"));
  EXPECT_TRUE(fs::exists(dir / "m_3" / "coefficients.csv"));
}
