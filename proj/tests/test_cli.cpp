#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "cflow/cflow.hpp"

namespace {

namespace fs = std::filesystem;
using cflow::io::json;

int run(const std::string& args, const fs::path& stdout_file = "/dev/null") {
  const std::string cmd = std::string(CFLOW_CLI_PATH) + " " + args + " > " + stdout_file.string() +
                          " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cflow_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string p(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

TEST_F(CliTest, MetricsOfIdenticalMasks) {
  ASSERT_EQ(run("synth --shape letter-c --out " + p("img.pgm") + " --gt " + p("gt.pgm")), 0);
  ASSERT_EQ(run("metrics --pred " + p("gt.pgm") + " --gt " + p("gt.pgm"), p("m.json")), 0);
  const json j = json::parse(slurp(p("m.json")));
  EXPECT_EQ(j.at("dice_percent").get<double>(), 100.0);
  EXPECT_EQ(j.at("bd").get<double>(), 0.0);
  EXPECT_EQ(j.at("bdsd").get<double>(), 0.0);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("sdt --in"), 1);
  EXPECT_EQ(run("no-such-command"), 1);
  EXPECT_EQ(run("sdt --in " + p("missing.pgm") + " --out " + p("x.cff")), 2);
  std::ofstream(p("empty.pgm"), std::ios::binary) << "P5\n4 4\n255\n" << std::string(16, '\0');
  EXPECT_EQ(run("sdt --in " + p("empty.pgm") + " --out " + p("x.cff")), 3);
  ASSERT_EQ(run("synth --out " + p("img.pgm") + " --gt " + p("gt.pgm")), 0);
  ASSERT_EQ(run("sdt --in " + p("gt.pgm") + " --out " + p("phi.cff")), 0);
  EXPECT_EQ(run("refine --feature " + p("phi.cff") + " --flow " + p("phi.cff") + " --out " + p("u.cff")), 3);
  EXPECT_EQ(run("loss --u " + p("phi.cff") + " --flow a --phi b"), 1);
}

TEST_F(CliTest, FlowBorderFlag) {
  ASSERT_EQ(run("synth --size 32 --radius 8 --out " + p("img.pgm") + " --gt " + p("gt.pgm")), 0);
  ASSERT_EQ(run("sdt --in " + p("gt.pgm") + " --out " + p("phi.cff")), 0);
  ASSERT_EQ(run("flow --phi " + p("phi.cff") + " --out " + p("f.cff")), 0);
  ASSERT_EQ(run("flow --phi " + p("phi.cff") + " --no-border-zero --out " + p("g.cff")), 0);
  const cflow::ContourFlow zeroed = cflow::io::read_flow(p("f.cff"));
  const cflow::ContourFlow full = cflow::io::read_flow(p("g.cff"));
  EXPECT_EQ(zeroed.defined.at(0, 5), 0);
  EXPECT_EQ(full.defined.at(0, 5), 1);
  ASSERT_EQ(run("flow-metrics --pred " + p("f.cff") + " --gt " + p("g.cff"), p("fm.json")), 0);
  EXPECT_NEAR(json::parse(slurp(p("fm.json"))).at("acs").get<double>(), 1.0, 1e-12);
}

TEST_F(CliTest, LossSelection) {
  ASSERT_EQ(run("synth --size 32 --radius 8 --out " + p("img.pgm") + " --gt " + p("gt.pgm")), 0);
  ASSERT_EQ(run("features --in " + p("img.pgm") + " --out " + p("o.cff")), 0);
  ASSERT_EQ(run("sdt --in " + p("gt.pgm") + " --out " + p("phi.cff")), 0);
  ASSERT_EQ(run("flow --phi " + p("phi.cff") + " --out " + p("f.cff")), 0);
  ASSERT_EQ(run("refine --feature " + p("o.cff") + " --flow " + p("f.cff") + " --iters 1 --out " + p("u.cff")), 0);
  ASSERT_EQ(run("loss --u " + p("u.cff") + " --gt " + p("gt.pgm") + " --base dice", p("a.json")), 0);
  ASSERT_EQ(run("loss --u " + p("u.cff") + " --flow " + p("f.cff"), p("b.json")), 0);
  ASSERT_EQ(run("loss --u " + p("u.cff") + " --flow " + p("f.cff") + " --gt " + p("gt.pgm") +
                " --alpha 2 --beta 0.5", p("c.json")),
            0);
  const json a = json::parse(slurp(p("a.json")));
  const json b = json::parse(slurp(p("b.json")));
  const json c = json::parse(slurp(p("c.json")));
  EXPECT_TRUE(a.at("per_term").contains("dice"));
  EXPECT_TRUE(b.at("per_term").contains("shape"));
  const double ce = c.at("per_term").at("ce").get<double>();
  EXPECT_NEAR(c.at("loss_total").get<double>(),
              2.0 * ce + 0.5 * b.at("loss_total").get<double>(), 1e-9 * (1.0 + ce));
}

// A demo run and the same steps issued by hand produce identical bytes.
TEST_F(CliTest, DemoMatchesManualPipeline) {
  ASSERT_EQ(run("demo --case noise --shape letter-c --workdir " + p("demo"), p("summary.json")), 0);
  const json summary = json::parse(slurp(p("summary.json")));
  EXPECT_EQ(summary, json::parse(slurp(p("demo/summary.json"))));
  EXPECT_EQ(summary.at("params").at("iters").get<int>(), 100);

  ASSERT_EQ(run("synth --shape letter-c --out " + p("img.pgm") + " --gt " + p("gt.pgm")), 0);
  ASSERT_EQ(run("corrupt --in " + p("img.pgm") + " --mode gaussian --sigma 20 --seed 42 --out " + p("bad.pgm")), 0);
  ASSERT_EQ(run("features --in " + p("bad.pgm") + " --out " + p("o.cff")), 0);
  ASSERT_EQ(run("sdt --in " + p("gt.pgm") + " --out " + p("phi.cff")), 0);
  ASSERT_EQ(run("flow --phi " + p("phi.cff") + " --out " + p("f.cff")), 0);
  ASSERT_EQ(run("refine --feature " + p("o.cff") + " --flow " + p("f.cff") +
                " --eps 10 --tau 10 --iters 100 --out " + p("u.cff") + " --mask-out " + p("seg.pgm")),
            0);
  EXPECT_EQ(slurp(p("bad.pgm")), slurp(p("demo/corrupted.pgm")));
  EXPECT_EQ(slurp(p("o.cff")), slurp(p("demo/feature.cff")));
  EXPECT_EQ(slurp(p("f.cff")), slurp(p("demo/flow.cff")));
  EXPECT_EQ(slurp(p("u.cff")), slurp(p("demo/u.cff")));
  EXPECT_EQ(slurp(p("seg.pgm")), slurp(p("demo/seg.pgm")));

  ASSERT_EQ(run("metrics --pred " + p("seg.pgm") + " --gt " + p("gt.pgm"), p("m.json")), 0);
  const json m = json::parse(slurp(p("m.json")));
  EXPECT_EQ(m.at("dice_percent"), summary.at("refined").at("dice_percent"));
  EXPECT_EQ(m.at("bdsd"), summary.at("refined").at("bdsd"));
}

TEST_F(CliTest, PatchDemoDefaultsToThousandIterations) {
  ASSERT_EQ(run("demo --case patch --workdir " + p("demo"), p("summary.json")), 0);
  const json s = json::parse(slurp(p("summary.json")));
  EXPECT_EQ(s.at("case"), "patch");
  EXPECT_EQ(s.at("params").at("iters").get<int>(), 1000);
  EXPECT_EQ(json::parse(slurp(p("demo/trace.json"))).at("iterations").get<int>(), 1000);
}

}  // namespace
