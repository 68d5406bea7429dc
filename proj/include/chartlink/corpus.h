#ifndef CHARTLINK_CORPUS_H_
#define CHARTLINK_CORPUS_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "chartlink/encoding.h"
#include "chartlink/grouping.h"
#include "chartlink/matching.h"
#include "chartlink/metrics.h"
#include "json.hpp"

namespace chartlink {

enum class CaseSource { kWeb, kAcademic, kSynthetic };

std::string_view ToString(CaseSource source);

// One paragraph-chart pair stored as a directory:
//   paragraph.txt   the paragraph (a single trailing newline is ignored)
//   chart.png       the chart raster, sized as the encoding declares
//   encoding.json   the visual encoding
//   case.json       optional {"source": "web" | "academic" | "synthetic"}
//   links.json      machine links and human corrections (written by runs)
//   gold.json       optional gold grouped links
struct Case {
  std::string case_id;
  std::filesystem::path dir;
  std::string paragraph;
  std::filesystem::path chart_path;
  VisualEncoding encoding;
  CaseSource source = CaseSource::kSynthetic;
};

// Throws LoadError for missing files or a chart whose size disagrees with
// the encoding; encoding errors propagate as ParseError or
// UnsupportedChartError.
Case LoadCase(const std::filesystem::path &dir);

// Case directories (those holding encoding.json) directly under `root`,
// sorted by name.
std::vector<std::filesystem::path> ListCases(const std::filesystem::path &root);

struct LinksRecord {
  bool exists = false;
  int revision = 0;
  std::vector<IndividualLink> links;
  std::vector<GroupedLink> groups;

  bool operator==(const LinksRecord &) const = default;
};

nlohmann::json LinksToJson(const LinksRecord &record);
// Throws ParseError naming the offending field.
LinksRecord LinksFromJson(const nlohmann::json &doc);

// True when both would be stored as the same links and groups. Revisions
// are ignored.
bool SameStoredLinks(const LinksRecord &a, const LinksRecord &b);

// Returns {exists = false} when the case has no links file yet.
LinksRecord LoadLinks(const std::filesystem::path &case_dir);

// Writes links.json atomically with revision + 1 and returns the new
// revision. When `expected_revision` is given and differs from the stored
// revision, throws ConflictError and leaves the file untouched.
int SaveLinks(const std::filesystem::path &case_dir, const std::vector<IndividualLink> &links,
              const std::vector<GroupedLink> &groups,
              std::optional<int> expected_revision = std::nullopt);

struct GoldAnnotation {
  std::string case_id;
  std::vector<ScoredGroup> groups;
  std::string annotator;
  std::string guideline_version;
  std::vector<std::string> warnings;
};

// Reads gold.json: {"groups": [{"phrases": [{"start", "end"}], "elementIds":
// [...]}], "annotator"?, "guidelineVersion"?}. Spans must lie inside the
// paragraph and element ids must resolve (ParseError otherwise). Duplicate
// groups are kept with a warning.
GoldAnnotation ImportGold(const std::filesystem::path &path, const Case &c);

// Sorted keys, floats rounded to six decimals, two-space indent, trailing
// newline. Identical values always serialize to identical bytes.
std::string CanonicalJson(const nlohmann::json &doc);

// Writes through a temporary file and rename.
void WriteFileAtomically(const std::filesystem::path &path, const std::string &content);
std::string ReadFile(const std::filesystem::path &path);

}  // namespace chartlink

#endif  // CHARTLINK_CORPUS_H_
