#include "chartlink/transcript.h"

#include "chartlink/errors.h"
#include "chartlink/pipeline.h"

namespace chartlink {

using nlohmann::json;

std::vector<TranscriptSegment> ParseTranscript(const json &doc) {
  const json *items = &doc;
  if (doc.is_object()) {
    if (!doc.contains("segments")) throw ParseError("segments", "missing");
    items = &doc["segments"];
  }
  if (!items->is_array()) throw ParseError("segments", "expected an array");
  std::vector<TranscriptSegment> segments;
  for (size_t i = 0; i < items->size(); ++i) {
    const json &item = (*items)[i];
    std::string field = "segments/" + std::to_string(i);
    if (!item.is_object()) throw ParseError(field, "expected an object");
    TranscriptSegment segment;
    try {
      segment.text = item.at("text").get<std::string>();
    } catch (const json::exception &) {
      throw ParseError(field + "/text", "expected a string");
    }
    for (auto [key, out] : {std::pair{"t_start", &segment.t_start},
                            std::pair{"t_end", &segment.t_end}}) {
      if (!item.contains(key) || !item[key].is_number()) {
        throw ParseError(field + "/" + key, "expected a number");
      }
      *out = item[key].get<double>();
    }
    segments.push_back(std::move(segment));
  }
  return segments;
}

void ValidateTranscript(const std::vector<TranscriptSegment> &segments) {
  for (size_t i = 0; i < segments.size(); ++i) {
    if (segments[i].t_end < segments[i].t_start) {
      throw PreconditionError("segment " + std::to_string(i) + " ends before it starts");
    }
    if (i > 0 && segments[i].t_start < segments[i - 1].t_start) {
      throw PreconditionError("segment " + std::to_string(i) +
                              " starts before the previous segment");
    }
  }
}

std::vector<OverlayEvent> BuildOverlayEvents(const std::vector<TranscriptSegment> &segments,
                                             const VisualEncoding &encoding,
                                             NlpBackend &backend, EmbeddingCache *embeddings,
                                             const TranscriptOptions &options) {
  ValidateTranscript(segments);
  std::vector<OverlayEvent> events;
  for (size_t i = 0; i < segments.size(); ++i) {
    const TranscriptSegment &segment = segments[i];
    if (NormalizeText(segment.text).empty()) continue;
    PipelineOutput out = RunPipeline(segment.text, encoding, backend, embeddings, options.match);
    OverlayEvent event;
    event.t_show = segment.t_start;
    event.segment_index = i;
    event.text = segment.text;
    for (const GroupedLink &group : out.groups) {
      std::vector<OverlaySpec> specs = BuildOverlays(group, out.links, encoding, options.style);
      if (specs.empty()) continue;
      event.group_ids.push_back(group.id);
      event.specs.insert(event.specs.end(), specs.begin(), specs.end());
    }
    if (event.specs.empty()) continue;
    if (!events.empty()) events.back().t_hide = event.t_show;
    events.push_back(std::move(event));
  }
  if (!events.empty()) {
    events.back().t_hide = segments[events.back().segment_index].t_end + options.final_hold;
  }
  return events;
}

json EventsToJson(const std::vector<OverlayEvent> &events) {
  json out = json::array();
  for (const OverlayEvent &event : events) {
    json specs = json::array();
    for (const OverlaySpec &spec : event.specs) specs.push_back(OverlayToJson(spec));
    out.push_back({{"t_show", event.t_show},
                   {"t_hide", event.t_hide},
                   {"segment", event.segment_index},
                   {"text", event.text},
                   {"groupIds", event.group_ids},
                   {"specs", specs}});
  }
  return out;
}

}  // namespace chartlink
