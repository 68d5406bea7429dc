#ifndef CHARTLINK_PIPELINE_H_
#define CHARTLINK_PIPELINE_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chartlink/encoding.h"
#include "chartlink/grouping.h"
#include "chartlink/matching.h"
#include "chartlink/nlp.h"

namespace chartlink {

struct PipelineOutput {
  SyntaxAnnotation annotation;
  std::vector<IndividualLink> links;
  std::vector<GroupedLink> groups;
  std::vector<std::string> warnings;
};

// Annotates, matches and groups one paragraph. Links of `previous` that a
// person touched (confirmed, edited, removed) are kept as they are; fresh
// automatic links are dropped when they land on the phrase of a confirmed
// or edited link, or repeat a removed (phrase, element) pair.
PipelineOutput RunPipeline(std::string_view paragraph, const VisualEncoding &encoding,
                           NlpBackend &backend, EmbeddingCache *embeddings,
                           const MatchOptions &options,
                           std::span<const IndividualLink> previous = {});

// Recomputes channels and groups over the given links.
std::vector<GroupedLink> Regroup(const SyntaxAnnotation &annotation,
                                 std::vector<IndividualLink> &links,
                                 const VisualEncoding &encoding);

enum class EditAction { kReassign, kRemove, kConfirm };

std::optional<EditAction> ParseEditAction(std::string_view name);

// Applies one human correction in place. Throws NotFoundError for an
// unknown link and ParseError("elementId", ...) for a missing or unknown
// reassignment target.
void ApplyEdit(std::vector<IndividualLink> &links, const std::string &link_id,
               EditAction action, const std::optional<std::string> &element_id,
               const VisualEncoding &encoding);

}  // namespace chartlink

#endif  // CHARTLINK_PIPELINE_H_
