#include <gtest/gtest.h>

#include "chartlink/corpus.h"
#include "chartlink/errors.h"
#include "chartlink/transcript.h"
#include "test_util.h"

namespace chartlink {
namespace {

using nlohmann::json;
using testing::BackendFor;
using testing::CorpusDir;

std::vector<TranscriptSegment> NumeracyTranscript() {
  return ParseTranscript(json::parse(ReadFile(CorpusDir() / "numeracy" / "transcript.json")));
}

TEST(ParseTranscript, AcceptsArrayOrObject) {
  json items = json::parse(R"json([{"text": "a", "t_start": 0, "t_end": 1.5}])json");
  auto bare = ParseTranscript(items);
  auto wrapped = ParseTranscript({{"segments", items}});
  ASSERT_EQ(bare.size(), 1u);
  EXPECT_EQ(bare[0].text, "a");
  EXPECT_EQ(bare[0].t_end, 1.5);
  EXPECT_EQ(wrapped.size(), 1u);
}

TEST(ParseTranscript, NamesBadFields) {
  try {
    ParseTranscript(json::parse(R"json([{"text": "a", "t_start": "zero", "t_end": 1}])json"));
    FAIL() << "expected ParseError";
  } catch (const ParseError &e) {
    EXPECT_EQ(e.field(), "segments/0/t_start");
  }
  EXPECT_THROW(ParseTranscript(json::parse(R"json({"items": []})json")), ParseError);
  EXPECT_THROW(ParseTranscript(json::parse(R"json([3])json")), ParseError);
}

TEST(ValidateTranscript, RejectsReversedOrUnorderedSegments) {
  EXPECT_NO_THROW(ValidateTranscript({{"a", 0, 1}, {"b", 1, 2}}));
  EXPECT_THROW(ValidateTranscript({{"a", 2, 1}}), PreconditionError);
  EXPECT_THROW(ValidateTranscript({{"a", 3, 4}, {"b", 1, 2}}), PreconditionError);
}

TEST(BuildOverlayEvents, SchedulesEventsPerSegment) {
  Case c = LoadCase(CorpusDir() / "numeracy");
  auto backend = BackendFor(c.dir);
  EmbeddingCache cache(*backend);
  auto events = BuildOverlayEvents(NumeracyTranscript(), c.encoding, *backend, &cache, {});
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[0].segment_index, 0u);
  EXPECT_EQ(events[1].segment_index, 1u);
  EXPECT_DOUBLE_EQ(events[0].t_show, 0.0);
  EXPECT_DOUBLE_EQ(events[0].t_hide, 3.6);
  EXPECT_DOUBLE_EQ(events[1].t_show, 3.6);
  EXPECT_DOUBLE_EQ(events[1].t_hide, 6.0 + 2.0);
  for (const auto &e : events) {
    EXPECT_FALSE(e.specs.empty());
    EXPECT_FALSE(e.group_ids.empty());
    EXPECT_LT(e.t_show, e.t_hide);
  }

  TranscriptOptions quick;
  quick.final_hold = 0.5;
  auto held = BuildOverlayEvents(NumeracyTranscript(), c.encoding, *backend, &cache, quick);
  EXPECT_DOUBLE_EQ(held.back().t_hide, 6.5);

  json doc = EventsToJson(events);
  ASSERT_EQ(doc.size(), 2u);
  EXPECT_EQ(doc[1]["segment"], 1);
  EXPECT_EQ(doc[0]["t_hide"], 3.6);
}

TEST(BuildOverlayEvents, EmptyTranscriptHasNoEvents) {
  Case c = LoadCase(CorpusDir() / "numeracy");
  auto backend = BackendFor(c.dir);
  EmbeddingCache cache(*backend);
  EXPECT_TRUE(BuildOverlayEvents({}, c.encoding, *backend, &cache, {}).empty());
  EXPECT_THROW(BuildOverlayEvents({{"x", 5, 1}}, c.encoding, *backend, &cache, {}),
               PreconditionError);
}

}  // namespace
}  // namespace chartlink
