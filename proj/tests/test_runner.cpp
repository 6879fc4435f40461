#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "coagfrag/runner.hpp"
#include "coagfrag/simd/kernels.hpp"

using namespace coagfrag;
namespace fs = std::filesystem;
namespace cr = coagfrag::runner;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto d = fs::temp_directory_path() / ("coagfrag_runner_" + name);
  fs::remove_all(d);
  return d;
}

// versions name the compiler and output is wherever the run was pointed
nlohmann::json comparable(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  j.erase("versions");
  j["config"].erase("output");
  return j;
}

}  // namespace

TEST(Runner, GoldenScottConstant) {
  const fs::path golden = fs::path(COAGFRAG_GOLDEN_DIR) / "scott-constant";
  const auto out = scratch("golden");
  std::ostringstream o, e;
  ASSERT_EQ(cr::run(fixture_config("scott-constant"), out.string(), false, o, e), 0) << e.str();
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(golden)) {
    const auto name = entry.path().filename();
    ASSERT_TRUE(fs::exists(out / name)) << name;
    if (name == "report.json") {
      EXPECT_EQ(comparable(slurp(out / name)), comparable(slurp(entry.path())));
    } else {
      EXPECT_EQ(slurp(out / name), slurp(entry.path())) << name;
    }
    ++compared;
  }
  EXPECT_GE(compared, 3u);
}

TEST(Runner, RepeatedRunsIdentical) {
  for (const char* fx : {"scott-constant", "ziff-linear-binary"}) {
    const auto dir = scratch("rep");
    std::ostringstream o, e;
    ASSERT_EQ(cr::run(fixture_config(fx), dir.string(), false, o, e), 0);
    std::map<std::string, std::string> first;
    for (const auto& entry : fs::directory_iterator(dir)) first[entry.path().filename()] = slurp(entry.path());
    fs::remove_all(dir);
    ASSERT_EQ(cr::run(fixture_config(fx), dir.string(), false, o, e), 0);
    for (const auto& [name, bytes] : first) EXPECT_EQ(slurp(dir / name), bytes) << fx << " " << name;
  }
}

TEST(Runner, ZeroEndTime) {
  auto cfg = fixture_config("scott-constant");
  cfg.time.t_end = 0.0;
  const auto out = scratch("t0");
  std::ostringstream o, e;
  EXPECT_EQ(cr::run(cfg, out.string(), false, o, e), 0) << e.str();
  EXPECT_TRUE(fs::exists(out / "density_t0.csv"));
  EXPECT_FALSE(fs::exists(out / "density_t1.csv"));
}

TEST(Runner, StrictProductKernelExits3) {
  auto cfg = parse_config(R"({"kernel": {"family": "product-power", "mu1": 1, "mu2": 1},
                              "hypotheses": {"k1": 1, "mu": 0.5},
                              "audit": {"points": 1024, "inner": 16}})");
  const auto out = scratch("strict");
  std::ostringstream o, e;
  EXPECT_EQ(cr::run(cfg, out.string(), true, o, e), cr::kExitHypotheses);
  EXPECT_FALSE(fs::exists(out / "report.json"));
  EXPECT_EQ(cr::check_hypotheses(cfg, std::nullopt, o, e), cr::kExitHypotheses);
  auto j = nlohmann::json::parse(o.str());
  EXPECT_EQ(j["verdicts"]["A2"]["verdict"], "fail");
  EXPECT_FALSE(j["witnesses"].empty());
}

TEST(Runner, EchoedConfigReloads) {
  const auto out = scratch("echo");
  auto cfg = fixture_config("ziff-linear-binary");
  cfg.moment_orders = {0.5, 3.0};
  std::ostringstream o, e;
  ASSERT_EQ(cr::run(cfg, out.string(), false, o, e), 0);
  auto j = nlohmann::json::parse(slurp(out / "report.json"));
  auto back = config_from_json(j["config"]);
  cfg.output = out.string();
  EXPECT_EQ(back, cfg);
}

TEST(Runner, MomentsFromRunDirReproduceCsv) {
  const auto out = scratch("mom");
  auto cfg = fixture_config("powerlaw-number-growth");
  cfg.moment_orders = {0.5};
  std::ostringstream o, e;
  ASSERT_EQ(cr::run(cfg, out.string(), false, o, e), 0);
  std::ostringstream csv;
  ASSERT_EQ(cr::moments(out.string(), {}, {}, {}, std::nullopt, csv, e), 0) << e.str();
  EXPECT_EQ(csv.str(), slurp(out / "moments.csv"));
}

TEST(Runner, MomentsFromFiles) {
  const auto out = scratch("mom_files");
  std::ostringstream o, e;
  ASSERT_EQ(cr::run(fixture_config("scott-constant"), out.string(), false, o, e), 0);
  std::ostringstream csv;
  ASSERT_EQ(cr::moments(std::nullopt, {(out / "density_t0.csv").string()}, {0.0}, {0.5},
                        std::nullopt, csv, e),
            0);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "t,M0,M1,M2,M0.5,xnorm");
  EXPECT_EQ(cr::moments(std::nullopt, {(out / "density_t0.csv").string()}, {}, {}, std::nullopt,
                        csv, e),
            cr::kExitConfig);
  EXPECT_EQ(cr::moments(std::nullopt, {"/nonexistent.csv"}, {0.0}, {}, std::nullopt, csv, e),
            cr::kExitIo);
}

TEST(Runner, CompareNeedsConstants) {
  auto cfg = parse_config(R"({"kernel": {"family": "custom-table",
      "table": {"sizes": [0.001, 1000], "values": [1, 1, 1, 1]}}})");
  std::ostringstream o, e;
  EXPECT_EQ(cr::compare(cfg, scratch("cmp_missing").string(), {}, o, e), cr::kExitConfig);
  EXPECT_NE(e.str().find("check-hypotheses"), std::string::npos) << e.str();
}

TEST(Runner, CompareWritesTrace) {
  auto cfg = fixture_config("scott-constant");
  cfg.grid.n_cells = 64;
  cfg.compare.samples = 5;
  const auto out = scratch("cmp");
  std::ostringstream o, e;
  EXPECT_EQ(cr::compare(cfg, out.string(), {32, 64, 128}, o, e), 0) << e.str();
  const auto trace = slurp(out / "gronwall.csv");
  EXPECT_EQ(trace.substr(0, trace.find('\n')), "t,u,phi,integral_phi,bound,margin,verdict");
  EXPECT_TRUE(fs::exists(out / "refinement.csv"));
}

TEST(Runner, UnwritableOutputIsIoError) {
  const auto blocker = scratch("blocker");
  std::ofstream(blocker) << "x";
  std::ostringstream o, e;
  EXPECT_EQ(cr::run(fixture_config("scott-constant"), (blocker / "sub").string(), false, o, e),
            cr::kExitIo);
  fs::remove(blocker);
}

TEST(Runner, LadderJson) {
  std::ostringstream o;
  EXPECT_EQ(cr::ladder(0.5, -0.2, 1.0, 0.05, o), 0);
  auto j = nlohmann::json::parse(o.str());
  EXPECT_EQ(j["sequence"].size(), 3u);
  EXPECT_NEAR(j["terminal"].get<double>(), 1.75, 1e-14);
  std::ostringstream bad;
  EXPECT_EQ(cr::ladder(1.5, 0.0, 1.0, 0.05, bad), cr::kExitConfig);
}

int main(int argc, char** argv) {
  ::testing::InitGoogleTest(&argc, argv);
  // golden bytes are produced by the scalar reference kernels
  simd::select(simd::Level::kScalar);
  return RUN_ALL_TESTS();
}
