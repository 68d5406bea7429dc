#ifndef CHARTLINK_MATCHING_H_
#define CHARTLINK_MATCHING_H_

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "chartlink/encoding.h"
#include "chartlink/errors.h"
#include "chartlink/nlp.h"

namespace chartlink {

inline constexpr double kDefaultSemanticThreshold = 0.78;
inline constexpr int kMaxPhraseTokens = 8;

struct Phrase {
  CharSpan span;
  std::string text;
  int sentence_index = 0;
  // Label of the constituency node the phrase came from, if any.
  std::optional<std::string> source_label;

  bool operator==(const Phrase &) const = default;
};

// Listed in pipeline order; earlier operators win overlaps.
enum class MatchOperator { kDirect, kUniqueWord, kSemantic, kNumerical };

std::string_view ToString(MatchOperator op);
std::optional<MatchOperator> ParseMatchOperator(std::string_view name);

struct MatchProvenance {
  MatchOperator op = MatchOperator::kDirect;
  double score = 1.0;  // angular similarity for semantic links, else 1

  bool operator==(const MatchProvenance &) const = default;
};

enum class LinkStatus { kAuto, kConfirmed, kEdited, kRemoved };

std::string_view ToString(LinkStatus status);
std::optional<LinkStatus> ParseLinkStatus(std::string_view name);

struct IndividualLink {
  std::string id;
  Phrase phrase;
  std::string element_id;
  std::optional<ChannelName> channel;
  MatchProvenance provenance;
  LinkStatus status = LinkStatus::kAuto;

  bool operator==(const IndividualLink &) const = default;
};

// "l-<start>-<end>-<element id>"
std::string MakeLinkId(const CharSpan &span, const std::string &element_id);

// Raised when an ambiguous numeric phrase cannot be attributed to one axis.
class AmbiguityError : public Error {
 public:
  using Error::Error;
};

struct MatchOptions {
  double semantic_threshold = kDefaultSemanticThreshold;
  int max_phrase_tokens = kMaxPhraseTokens;
  bool enable_semantic = true;
};

// Shared inputs of the comparison operators. `embeddings` may be null, in
// which case semantic comparison is skipped.
struct MatchContext {
  const SyntaxAnnotation &annotation;
  const VisualEncoding &encoding;
  EmbeddingCache *embeddings = nullptr;
  MatchOptions options;
  // Links that already exist (previous runs, human edits). Non-removed
  // ones count as already linked for every operator.
  std::span<const IndividualLink> existing;
};

struct MatchResult {
  std::vector<IndividualLink> links;
  std::vector<std::string> warnings;
};

// Constituency nodes of at most `max_tokens` tokens, one per distinct span,
// in document order.
std::vector<Phrase> CandidatePhrases(const SyntaxAnnotation &annotation,
                                     int max_tokens = kMaxPhraseTokens);

std::vector<IndividualLink> MatchDirect(const MatchContext &context);

// For each element of `role`, the words that appear in no other element of
// the same role. With fewer than two elements every word is unique.
std::map<std::string, std::set<std::string>> UniqueWords(
    std::span<const TextualElement> elements, TextRole role);

std::vector<IndividualLink> MatchUnique(const MatchContext &context);

// 1 - arccos(cos(u, v)) / pi. Throws PreconditionError on zero vectors or
// mismatched dimensions.
double AngularSimilarity(const EmbeddingVector &u, const EmbeddingVector &v);

std::vector<IndividualLink> MatchSemantic(const MatchContext &context);

// Axes whose linear domain contains the entity's value, filtered by noun
// attachment. Entities without a number token yield nothing. Axes without
// a title are kept; titled axes are kept only when a noun governing or
// governed by the number (see README for the four dependency templates)
// matches the title of one of the titled candidates.
std::set<ChannelName> ResolveNounAttachment(const MatchContext &context,
                                            const EntityMention &entity,
                                            const std::set<ChannelName> &candidates);

// Picks the candidate axis whose title is mentioned closest to the entity
// in the dependency tree; ties prefer x over y. Throws AmbiguityError when
// no candidate title is mentioned in the sentence.
ChannelName ResolveAxisAmbiguity(const MatchContext &context,
                                 const EntityMention &entity,
                                 const std::set<ChannelName> &candidates);

MatchResult MatchNumeric(const MatchContext &context);

// Direct, unique-word, semantic and numerical operators in that order.
// Later operators skip pairs already linked; overlapping phrases linked to
// one element keep the earliest operator, then the shortest span. Output
// is sorted by phrase span, then element id.
MatchResult RunMatching(const MatchContext &context);

}  // namespace chartlink

#endif  // CHARTLINK_MATCHING_H_
