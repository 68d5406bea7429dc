#include "chartlink/pipeline.h"

#include <algorithm>
#include <set>

#include "chartlink/errors.h"

namespace chartlink {

namespace {

void SortLinks(std::vector<IndividualLink> &links) {
  std::sort(links.begin(), links.end(), [](const IndividualLink &a, const IndividualLink &b) {
    if (a.phrase.span != b.phrase.span) return a.phrase.span < b.phrase.span;
    if (a.element_id != b.element_id) return a.element_id < b.element_id;
    return a.id < b.id;
  });
}

}  // namespace

PipelineOutput RunPipeline(std::string_view paragraph, const VisualEncoding &encoding,
                           NlpBackend &backend, EmbeddingCache *embeddings,
                           const MatchOptions &options,
                           std::span<const IndividualLink> previous) {
  PipelineOutput out;
  out.annotation = backend.Annotate(paragraph);

  std::vector<IndividualLink> kept;
  std::set<CharSpan> settled_spans;
  std::set<std::pair<CharSpan, std::string>> removed;
  for (const IndividualLink &link : previous) {
    if (link.status == LinkStatus::kAuto) continue;
    kept.push_back(link);
    if (link.status == LinkStatus::kRemoved) {
      removed.insert({link.phrase.span, link.element_id});
    } else {
      settled_spans.insert(link.phrase.span);
    }
  }

  MatchContext context{out.annotation, encoding, embeddings, options, kept};
  MatchResult matched = RunMatching(context);
  out.warnings = std::move(matched.warnings);

  std::set<std::string> ids;
  for (const IndividualLink &link : kept) ids.insert(link.id);
  for (IndividualLink &link : matched.links) {
    if (settled_spans.count(link.phrase.span)) continue;
    if (removed.count({link.phrase.span, link.element_id})) continue;
    if (ids.count(link.id)) continue;
    kept.push_back(std::move(link));
  }

  out.links = std::move(kept);
  out.groups = Regroup(out.annotation, out.links, encoding);
  return out;
}

std::vector<GroupedLink> Regroup(const SyntaxAnnotation &annotation,
                                 std::vector<IndividualLink> &links,
                                 const VisualEncoding &encoding) {
  links = TransferChannels(std::move(links), encoding).links;
  SortLinks(links);
  return FindGroups(annotation, links);
}

std::optional<EditAction> ParseEditAction(std::string_view name) {
  if (name == "reassign") return EditAction::kReassign;
  if (name == "remove") return EditAction::kRemove;
  if (name == "confirm") return EditAction::kConfirm;
  return std::nullopt;
}

void ApplyEdit(std::vector<IndividualLink> &links, const std::string &link_id,
               EditAction action, const std::optional<std::string> &element_id,
               const VisualEncoding &encoding) {
  auto it = std::find_if(links.begin(), links.end(),
                         [&](const IndividualLink &l) { return l.id == link_id; });
  if (it == links.end()) throw NotFoundError("unknown link " + link_id);
  switch (action) {
    case EditAction::kReassign:
      if (!element_id) throw ParseError("elementId", "required for reassign");
      if (!encoding.element(*element_id)) {
        throw ParseError("elementId", "unknown element '" + *element_id + "'");
      }
      it->element_id = *element_id;
      it->channel = encoding.OwningChannel(*element_id);
      it->status = LinkStatus::kEdited;
      break;
    case EditAction::kRemove:
      it->status = LinkStatus::kRemoved;
      break;
    case EditAction::kConfirm:
      it->status = LinkStatus::kConfirmed;
      break;
  }
}

}  // namespace chartlink
