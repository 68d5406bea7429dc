#ifndef CHARTLINK_TRANSCRIPT_H_
#define CHARTLINK_TRANSCRIPT_H_

#include <string>
#include <vector>

#include "chartlink/encoding.h"
#include "chartlink/matching.h"
#include "chartlink/nlp.h"
#include "chartlink/overlay.h"
#include "json.hpp"

namespace chartlink {

// One recognized sentence of speech, times in seconds.
struct TranscriptSegment {
  std::string text;
  double t_start = 0;
  double t_end = 0;
};

// Overlays shown while [t_show, t_hide).
struct OverlayEvent {
  double t_show = 0;
  double t_hide = 0;
  size_t segment_index = 0;
  std::string text;
  std::vector<std::string> group_ids;
  std::vector<OverlaySpec> specs;
};

// Accepts either a bare array or {"segments": [...]}, each item
// {"text", "t_start", "t_end"}. Throws ParseError naming the field.
std::vector<TranscriptSegment> ParseTranscript(const nlohmann::json &doc);

// Throws PreconditionError unless t_start <= t_end for every segment and
// segments start in non-decreasing order.
void ValidateTranscript(const std::vector<TranscriptSegment> &segments);

struct TranscriptOptions {
  MatchOptions match;
  OverlayStyle style;
  double final_hold = 2.0;
};

// Runs the pipeline on every segment. Segments whose groups produce no
// overlay are skipped. Each event shows from its segment's start until the
// next event starts; the last one stays until its segment's end plus
// `final_hold`.
std::vector<OverlayEvent> BuildOverlayEvents(const std::vector<TranscriptSegment> &segments,
                                             const VisualEncoding &encoding,
                                             NlpBackend &backend, EmbeddingCache *embeddings,
                                             const TranscriptOptions &options);

nlohmann::json EventsToJson(const std::vector<OverlayEvent> &events);

}  // namespace chartlink

#endif  // CHARTLINK_TRANSCRIPT_H_
