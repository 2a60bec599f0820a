#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "support/temp_dir.hpp"

using bmikit::testing::read_file;
using bmikit::testing::TempDir;

namespace {

const std::filesystem::path kGolden = BMIKIT_GOLDEN_DIR;

struct Result {
  int status = -1;
  std::string out;
  std::string err;
};

std::string quote(const std::string& arg) {
  std::string q = "'";
  for (char c : arg) {
    if (c == '\'') q += "'\\''";
    else q += c;
  }
  return q + "'";
}

Result run(const TempDir& dir, const std::vector<std::string>& args) {
  std::string cmd = quote(BMIKIT_CLI_PATH);
  for (const auto& a : args) cmd += " " + quote(a);
  const auto out_path = dir / "stdout";
  const auto err_path = dir / "stderr";
  cmd += " >" + quote(out_path.string()) + " 2>" + quote(err_path.string());
  const int raw = std::system(cmd.c_str());
  Result r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = read_file(out_path);
  r.err = read_file(err_path);
  return r;
}

std::string golden(const std::string& name) { return (kGolden / name).string(); }

class Cli : public ::testing::Test {
 protected:
  TempDir dir;
  std::string path(const std::string& name) const { return (dir / name).string(); }

  void make_stats() {
    const auto r = run(dir, {"stats", "--src", golden("three.src"), "--tgt", golden("three.tgt"), "--out",
                             path("c.stats"), "--threads", "2"});
    ASSERT_EQ(r.status, 0) << r.err;
  }
};

}  // namespace

TEST_F(Cli, StatsMatchesGolden) {
  make_stats();
  EXPECT_EQ(read_file(path("c.stats")), read_file(golden("three.stats")));
}

TEST_F(Cli, StatsThenZhEnWeights) {
  make_stats();
  const auto r = run(dir, {"weights", "--stats", path("c.stats"), "--src", golden("three.src"), "--tgt",
                           golden("three.tgt"), "--schedule", "bmi", "--scale", "0.1", "--base", "1.0", "--out",
                           path("w.tsv")});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(read_file(path("w.tsv")), read_file(golden("three.zh-en.weights")));
  EXPECT_NE(r.out.find("schedule=bmi(S=0.1,B=1,threshold=0.4)\n"), std::string::npos);
  EXPECT_NE(r.out.find("pairs=3\ntokens=4\nzeroed=3\n"), std::string::npos) << r.out;
}

TEST_F(Cli, PresetEqualsExplicitValues) {
  make_stats();
  const std::vector<std::string> common = {"weights", "--stats", path("c.stats"), "--src", golden("three.src"),
                                           "--tgt", golden("three.tgt")};
  auto preset = common;
  preset.insert(preset.end(), {"--preset", "zh-en", "--out", path("p.tsv")});
  ASSERT_EQ(run(dir, preset).status, 0);
  EXPECT_EQ(read_file(path("p.tsv")), read_file(golden("three.zh-en.weights")));
}

TEST_F(Cli, ScoreMatchesGolden) {
  make_stats();
  const auto r = run(dir, {"score", "--stats", path("c.stats"), "--src", golden("three.src"), "--tgt",
                           golden("three.tgt")});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(r.out, read_file(golden("three.score")));
}

TEST_F(Cli, RerunsAreByteIdentical) {
  make_stats();
  const auto first = read_file(path("c.stats"));
  make_stats();
  EXPECT_EQ(read_file(path("c.stats")), first);
  for (const char* out : {"a.tsv", "b.tsv"}) {
    ASSERT_EQ(run(dir, {"weights", "--stats", path("c.stats"), "--src", golden("three.src"), "--tgt",
                        golden("three.tgt"), "--schedule", "chi2", "--amplitude", "2", "--decay", "0.5", "--out",
                        path(out)})
                  .status,
              0);
  }
  EXPECT_EQ(read_file(path("a.tsv")), read_file(path("b.tsv")));
}

TEST_F(Cli, InvalidScheduleExitsTwoWithoutOutput) {
  make_stats();
  const auto r = run(dir, {"weights", "--stats", path("c.stats"), "--src", golden("three.src"), "--tgt",
                           golden("three.tgt"), "--schedule", "bmi", "--scale", "-1", "--out", path("w.tsv")});
  EXPECT_EQ(r.status, 2);
  EXPECT_TRUE(r.out.empty());
  EXPECT_NE(r.err.find("error:"), std::string::npos);
  EXPECT_FALSE(std::filesystem::exists(path("w.tsv")));
  for (const auto& entry : std::filesystem::directory_iterator(dir.path())) {
    EXPECT_EQ(entry.path().filename().string().find(".tmp."), std::string::npos);
  }
}

TEST_F(Cli, DataErrorLeavesNoPartialFile) {
  dir.write_lines("s.txt", {"a", "b", "c"});
  dir.write_lines("t.txt", {"U", "V"});
  const auto r = run(dir, {"stats", "--src", path("s.txt"), "--tgt", path("t.txt"), "--out", path("c.stats")});
  EXPECT_EQ(r.status, 2);
  EXPECT_FALSE(std::filesystem::exists(path("c.stats")));
}

TEST_F(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run(dir, {"frobnicate"}).status, 1);
  EXPECT_EQ(run(dir, {}).status, 1);
  const auto r = run(dir, {"stats", "--bogus"});
  EXPECT_EQ(r.status, 1);
  EXPECT_TRUE(r.out.empty());
  EXPECT_FALSE(r.err.empty());
}

TEST_F(Cli, UnseenTokensGetZeroWeight) {
  make_stats();
  dir.write_lines("s.txt", {"z"});
  dir.write_lines("t.txt", {"U"});
  const auto r = run(dir, {"weights", "--stats", path("c.stats"), "--src", path("s.txt"), "--tgt", path("t.txt"),
                           "--out", path("w.tsv")});
  // Unseen tokens score 0, which falls under the threshold.
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(read_file(path("w.tsv")), "0.000000\n");
}

TEST_F(Cli, BucketAndReport) {
  make_stats();
  auto r = run(dir, {"bucket", "--stats", path("c.stats"), "--src", golden("three.src"), "--tgt",
                     golden("three.tgt"), "--k", "2"});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(r.out,
            "index=0 score=0.117783 bucket=1\n"
            "index=1 score=0.058892 bucket=0\n"
            "index=2 score=-0.287682 bucket=0\n");
  EXPECT_NE(r.err.find("bucket=0 size=2"), std::string::npos);

  r = run(dir, {"report", "--stats", path("c.stats"), "--token", "V", "--tsv"});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_LT(r.out.find("a\t1"), r.out.find("b\t1"));

  r = run(dir, {"report", "--stats", path("c.stats"), "--token", "pleasing"});
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("pleasing"), std::string::npos);
}

TEST_F(Cli, Lexdiv) {
  dir.write_lines("text.txt", {"a a a a"});
  auto r = run(dir, {"lexdiv", "--input", path("text.txt"), "--metric", "mattr", "--window", "2"});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(r.out, "metric=mattr value=0.500000 params=window:2 N=4\n");
  r = run(dir, {"lexdiv", "--input", path("text.txt"), "--metric", "hdd"});
  EXPECT_EQ(r.status, 2);
  dir.write_lines("unique.txt", {"a b c d e"});
  r = run(dir, {"lexdiv", "--input", path("unique.txt"), "--metric", "mtld"});
  EXPECT_EQ(r.status, 2);
}

TEST_F(Cli, LossCheckPasses) {
  const auto r = run(dir, {"loss-check", "--batches", "20"});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("status=pass"), std::string::npos);
}

TEST_F(Cli, ToyTrainWritesOneLinePerEpoch) {
  make_stats();
  ASSERT_EQ(run(dir, {"weights", "--stats", path("c.stats"), "--src", golden("three.src"), "--tgt",
                      golden("three.tgt"), "--out", path("w.tsv")})
                .status,
            0);
  const auto r = run(dir, {"toy-train", "--src", golden("three.src"), "--tgt", golden("three.tgt"), "--weights",
                           path("w.tsv"), "--epochs", "4", "--probe", "V"});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 4);
  EXPECT_EQ(r.out.rfind("epoch=1 loss=", 0), 0u);
  EXPECT_NE(r.out.find("probe:V="), std::string::npos);
}

TEST_F(Cli, ValidateReportsViolations) {
  dir.write_lines("s.txt", {"a", "b", "c", "d", "e", "f"});
  dir.write_lines("t.txt", {"U", "V", "W", "X", "", "Z"});
  const auto r = run(dir, {"validate", "--src", path("s.txt"), "--tgt", path("t.txt")});
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.out.find("violation kind=empty side=target line=5"), std::string::npos) << r.out;
}

TEST_F(Cli, DefaultsCarryProvenance) {
  const auto r = run(dir, {"defaults"});
  ASSERT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("threshold=0.4 source=paper-given"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("window=50 source=artifact-chosen"), std::string::npos);
  EXPECT_NE(r.out.find("amplitude=1.0 source=artifact-chosen"), std::string::npos);
  EXPECT_NE(r.out.find("decay=1e-05 source=artifact-chosen"), std::string::npos);
}
