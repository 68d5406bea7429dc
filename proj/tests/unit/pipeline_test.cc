#include <gtest/gtest.h>

#include "chartlink/corpus.h"
#include "chartlink/errors.h"
#include "chartlink/metrics.h"
#include "chartlink/pipeline.h"
#include "test_util.h"

namespace chartlink {
namespace {

using testing::BackendFor;
using testing::CorpusDir;

struct Fixture {
  Case c = LoadCase(CorpusDir() / "deptype");
  std::shared_ptr<FixtureBackend> backend = BackendFor(c.dir);
  EmbeddingCache cache{*backend};

  PipelineOutput Run(std::span<const IndividualLink> previous = {}) {
    return RunPipeline(c.paragraph, c.encoding, *backend, &cache, {}, previous);
  }
};

const IndividualLink *ById(const std::vector<IndividualLink> &links, const std::string &id) {
  for (const auto &l : links) {
    if (l.id == id) return &l;
  }
  return nullptr;
}

TEST(RunPipeline, DeterministicOutput) {
  Fixture f;
  PipelineOutput a = f.Run();
  PipelineOutput b = f.Run();
  EXPECT_EQ(a.links, b.links);
  EXPECT_EQ(a.groups, b.groups);
  // Rerunning over untouched automatic links changes nothing.
  PipelineOutput c = f.Run(a.links);
  EXPECT_EQ(c.links, a.links);
  EXPECT_EQ(c.groups, a.groups);
}

TEST(RunPipeline, KeepsHumanCorrections) {
  Fixture f;
  std::vector<IndividualLink> links = f.Run().links;
  ASSERT_EQ(links.size(), 3u);
  std::string x_id = links[0].id, color_id = links[1].id, y_id = links[2].id;
  ApplyEdit(links, x_id, EditAction::kConfirm, std::nullopt, f.c.encoding);
  ApplyEdit(links, color_id, EditAction::kRemove, std::nullopt, f.c.encoding);
  ApplyEdit(links, y_id, EditAction::kReassign, "y-label-20", f.c.encoding);

  PipelineOutput out = f.Run(links);
  ASSERT_EQ(out.links.size(), 3u);
  EXPECT_EQ(ById(out.links, x_id)->status, LinkStatus::kConfirmed);
  EXPECT_EQ(ById(out.links, color_id)->status, LinkStatus::kRemoved);
  const IndividualLink *edited = ById(out.links, y_id);
  ASSERT_NE(edited, nullptr);
  EXPECT_EQ(edited->status, LinkStatus::kEdited);
  EXPECT_EQ(edited->element_id, "y-label-20");
  EXPECT_EQ(edited->channel, ChannelName::kY);

  ASSERT_EQ(out.groups.size(), 1u);
  EXPECT_EQ(out.groups[0].channels, (std::set<ChannelName>{ChannelName::kX, ChannelName::kY}));
  EXPECT_EQ(out.groups[0].member_link_ids.size(), 2u);
}

TEST(ApplyEdit, RejectsUnknownLinksAndTargets) {
  Fixture f;
  std::vector<IndividualLink> links = f.Run().links;
  EXPECT_THROW(ApplyEdit(links, "l-nope", EditAction::kRemove, std::nullopt, f.c.encoding),
               NotFoundError);
  try {
    ApplyEdit(links, links[0].id, EditAction::kReassign, "ghost", f.c.encoding);
    FAIL() << "expected ParseError";
  } catch (const ParseError &e) {
    EXPECT_EQ(e.field(), "elementId");
  }
  EXPECT_THROW(ApplyEdit(links, links[0].id, EditAction::kReassign, std::nullopt, f.c.encoding),
               ParseError);
  EXPECT_EQ(links, f.Run().links);
}

TEST(ParseEditAction, KnownNames) {
  EXPECT_EQ(ParseEditAction("reassign"), EditAction::kReassign);
  EXPECT_EQ(ParseEditAction("remove"), EditAction::kRemove);
  EXPECT_EQ(ParseEditAction("confirm"), EditAction::kConfirm);
  EXPECT_FALSE(ParseEditAction("delete"));
}

TEST(ToScoredGroups, IgnoresRemovedLinks) {
  Fixture f;
  PipelineOutput out = f.Run();
  auto scored = ToScoredGroups(out.groups, out.links);
  ASSERT_EQ(scored.size(), 1u);
  EXPECT_EQ(scored[0].element_ids,
            (std::set<std::string>{"x-label-100-million", "legend-deptype", "y-label-30"}));
  for (auto &l : out.links) l.status = LinkStatus::kRemoved;
  EXPECT_TRUE(ToScoredGroups(out.groups, out.links).empty());
}

TEST(RunPipeline, ScoresGoldOnDepType) {
  Fixture f;
  PipelineOutput out = f.Run();
  GoldAnnotation gold = ImportGold(f.c.dir / "gold.json", f.c);
  Score s = CaseScore(ToScoredGroups(out.groups, out.links), gold.groups);
  EXPECT_DOUBLE_EQ(s.f1, 1.0);
}

}  // namespace
}  // namespace chartlink
