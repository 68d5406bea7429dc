#include <gtest/gtest.h>

#include "chartlink/corpus.h"
#include "test_util.h"

namespace chartlink {
namespace {

using nlohmann::json;
using testing::CliPath;
using testing::CopyCase;
using testing::CorpusDir;
using testing::FixturesDir;
using testing::RunCommand;
using testing::TempDir;

std::string Quote(const std::filesystem::path &p) { return "'" + p.string() + "'"; }

std::filesystem::path CopyCorpus(const TempDir &tmp) {
  std::filesystem::path root = tmp / "corpus";
  for (const auto &dir : ListCases(CorpusDir())) CopyCase(dir, root);
  return root;
}

TEST(Cli, RunIsByteDeterministic) {
  TempDir tmp;
  std::filesystem::path corpus = CopyCorpus(tmp);
  std::string cli = Quote(CliPath());
  ASSERT_EQ(RunCommand(cli + " run " + Quote(corpus) + " --out " + Quote(tmp / "a")), 0);
  ASSERT_EQ(RunCommand(cli + " run " + Quote(corpus) + " --out " + Quote(tmp / "b") +
                       " --jobs 3"),
            0);
  for (const auto &dir : ListCases(corpus)) {
    std::string name = dir.filename().string();
    EXPECT_EQ(ReadFile(tmp / "a" / name / "links.json"), ReadFile(tmp / "b" / name / "links.json"))
        << name;
  }
}

TEST(Cli, EvalReportsCorpusScore) {
  TempDir tmp;
  std::filesystem::path corpus = CopyCorpus(tmp);
  std::string cli = Quote(CliPath());
  std::filesystem::path report = tmp / "report.json";
  ASSERT_EQ(RunCommand(cli + " eval " + Quote(corpus) + " --format json --report " +
                       Quote(report)),
            0);
  json doc = json::parse(ReadFile(report));
  EXPECT_EQ(doc["cases"].size(), 6u);
  EXPECT_GE(doc["meanF1"].get<double>(), 0.9);
}

TEST(Cli, ExitCodes) {
  TempDir tmp;
  std::string cli = Quote(CliPath());
  EXPECT_EQ(RunCommand(cli), 2);
  EXPECT_EQ(RunCommand(cli + " frobnicate"), 2);
  EXPECT_EQ(RunCommand(cli + " run " + Quote(tmp / "nowhere")), 2);

  // No case in the fixtures set has gold.
  std::filesystem::path fixtures = tmp / "fixtures";
  CopyCase(FixturesDir() / "semantic", fixtures);
  EXPECT_EQ(RunCommand(cli + " eval " + Quote(fixtures)), 1);

  std::filesystem::path oracle = CopyCase(CorpusDir() / "oracle", tmp / "one");
  EXPECT_EQ(RunCommand(cli + " overlays " + Quote(oracle) + " --group g-none"), 2);
  EXPECT_EQ(RunCommand(cli + " overlays " + Quote(oracle) + " --out " + Quote(tmp / "ov")), 0);
  json specs = json::parse(ReadFile(tmp / "ov" / "overlays.json"));
  ASSERT_EQ(specs.size(), 1u);
  std::string group = specs[0]["groupId"];
  EXPECT_TRUE(std::filesystem::exists(tmp / "ov" / (group + ".png")));
}

}  // namespace
}  // namespace chartlink
