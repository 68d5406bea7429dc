#include <gtest/gtest.h>

#include "chartlink/errors.h"
#include "chartlink/nlp.h"
#include "test_util.h"

namespace chartlink {
namespace {

using nlohmann::json;
using testing::CorpusDir;
using testing::FixturesDir;

json SmallDoc() {
  return json::parse(R"json({
    "paragraph": "Spain follows with 30 percent. It grew.",
    "sentences": [
      {"ptb": "(S (NP (NNP Spain)) (VP (VBZ follows) (PP (IN with) (NP (CD 30) (NN percent)))) (. .))",
       "deps": [[1, "nsubj"], [-1, "ROOT"], [1, "prep"], [4, "nummod"], [2, "pobj"], [1, "punct"]]},
      {"ptb": "(S (NP (PRP It)) (VP (VBD grew)) (. .))",
       "deps": [[1, "nsubj"], [-1, "ROOT"], [1, "punct"]]}
    ],
    "entities": [{"text": "30 percent", "type": "PERCENT", "value": 30}]
  })json");
}

TEST(AnnotationFromJson, AlignsLeavesToParagraph) {
  SyntaxAnnotation a = AnnotationFromJson(SmallDoc());
  ASSERT_EQ(a.sentences.size(), 2u);
  const Sentence &s = a.sentences[0];
  EXPECT_EQ(s.span, (CharSpan{0, 30}));
  ASSERT_EQ(s.tokens.size(), 6u);
  EXPECT_EQ(s.tokens[3].text, "30");
  EXPECT_EQ(s.tokens[3].pos, "CD");
  EXPECT_EQ(s.tokens[3].span, (CharSpan{19, 21}));
  EXPECT_TRUE(s.tokens[1].is_root());
  EXPECT_EQ(s.tokens[0].dep, "nsubj");
  EXPECT_EQ(a.Slice(s.root.children[1].span), "follows with 30 percent");
  EXPECT_EQ(a.sentences[1].span, (CharSpan{31, 39}));
  ASSERT_EQ(a.entities.size(), 1u);
  EXPECT_EQ(a.Slice(a.entities[0].span), "30 percent");
  EXPECT_EQ(a.entities[0].type, EntityType::kPercent);
  EXPECT_EQ(a.SentenceOf({19, 29}), 0u);
  EXPECT_FALSE(a.SentenceOf({25, 35}));
}

TEST(AnnotationFromJson, RoundTripsThroughExplicitForm) {
  SyntaxAnnotation a = AnnotationFromJson(SmallDoc());
  EXPECT_EQ(AnnotationFromJson(AnnotationToJson(a)), a);
}

TEST(AnnotationFromJson, RejectsMisalignedOrMalformedInput) {
  json doc = SmallDoc();
  doc["sentences"][0]["ptb"] = "(S (NP (NNP France)) (. .))";
  EXPECT_THROW(AnnotationFromJson(doc), ParseError);

  doc = SmallDoc();
  doc["sentences"][0]["ptb"] = "(S (NP (NNP Spain)";
  EXPECT_THROW(AnnotationFromJson(doc), ParseError);

  doc = SmallDoc();
  doc["sentences"][1]["deps"] = {{1, "nsubj"}, {0, "x"}, {1, "punct"}};
  EXPECT_THROW(AnnotationFromJson(doc), ParseError);

  doc = SmallDoc();
  doc["entities"][0]["text"] = "31 percent";
  EXPECT_THROW(AnnotationFromJson(doc), ParseError);
}

TEST(Dependencies, HeadsAndDistances) {
  SyntaxAnnotation a = AnnotationFromJson(SmallDoc());
  const Sentence &s = a.sentences[0];
  EXPECT_EQ(SpanHead(s, {19, 29}), 4);
  EXPECT_EQ(TokensInSpan(s, {19, 29}), (std::vector<int>{3, 4}));
  EXPECT_EQ(TokenDistance(s, 4, 0), 3);
  EXPECT_EQ(TokenDistance(s, 0, 4), 3);
  EXPECT_EQ(TokenDistance(s, 2, 2), 0);
  EXPECT_EQ(DependencyPathLength(a, {0, 5}, {19, 29}), 3);
  EXPECT_THROW(DependencyPathLength(a, {0, 5}, {31, 33}), NoPathError);
}

TEST(FixtureBackend, AnnotatesKnownParagraphsOnly) {
  FixtureBackend backend;
  backend.AddDocument(SmallDoc());
  EXPECT_EQ(backend.paragraph_count(), 1u);
  EXPECT_EQ(backend.Annotate("Spain follows with 30 percent. It grew.").sentences.size(), 2u);
  EXPECT_THROW(backend.Annotate("Unknown text."), BackendError);
  EXPECT_THROW(backend.Annotate(""), PreconditionError);
}

TEST(FixtureBackend, HashedEmbeddingsAreDeterministic) {
  FixtureBackend a, b;
  EmbeddingVector u = a.Embed("religious wear");
  EXPECT_EQ(u.dim(), FixtureBackend::kDefaultDim);
  EXPECT_EQ(u.components, b.Embed("religious wear").components);
  EXPECT_EQ(u.components, a.Embed("Religious  WEAR").components);
  EXPECT_NE(u.components, a.Embed("zebra").components);
  a.set_hash_fallback(false);
  EXPECT_THROW(a.Embed("zebra"), BackendError);
}

TEST(FixtureBackend, AuthoredEmbeddingsArePadded) {
  FixtureBackend backend;
  backend.AddFile(FixturesDir() / "semantic" / "fixture.json");
  EmbeddingVector v = backend.Embed("accuracy");
  ASSERT_EQ(v.dim(), FixtureBackend::kDefaultDim);
  EXPECT_EQ(v.components[3], 1.0);
  EXPECT_EQ(v.components[0], 0.0);
}

TEST(FixtureBackend, LoadsCorpusDirectoriesAndDocumentArrays) {
  FixtureBackend backend;
  backend.AddDirectory(CorpusDir());
  // Six case fixtures plus three transcript segments.
  EXPECT_EQ(backend.paragraph_count(), 9u);
  EXPECT_NO_THROW(backend.Annotate("That gap matters"));
}

TEST(EmbeddingCache, ReturnsStableVectors) {
  FixtureBackend backend;
  EmbeddingCache cache(backend);
  EXPECT_EQ(cache.Get("Oracle").components, backend.Embed("Oracle").components);
  EXPECT_EQ(cache.Get("Oracle").components, cache.Get("Oracle").components);
}

}  // namespace
}  // namespace chartlink
