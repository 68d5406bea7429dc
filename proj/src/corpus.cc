#include "chartlink/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "chartlink/errors.h"
#include "chartlink/raster.h"

namespace chartlink {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void RoundFloats(json &value) {
  if (value.is_number_float()) {
    double rounded = std::round(value.get<double>() * 1e6) / 1e6;
    value = rounded == 0 ? 0.0 : rounded;  // no "-0.0"
  } else if (value.is_structured()) {
    for (json &child : value) RoundFloats(child);
  }
}

json SpanJson(const CharSpan &span) { return {{"start", span.start}, {"end", span.end}}; }

CharSpan SpanFrom(const json &doc, const std::string &field) {
  if (!doc.is_object()) throw ParseError(field, "expected {start, end}");
  CharSpan span;
  try {
    span = {doc.at("start").get<int>(), doc.at("end").get<int>()};
  } catch (const json::exception &) {
    throw ParseError(field, "expected integer start and end");
  }
  if (span.start < 0 || span.end <= span.start) throw ParseError(field, "empty or negative span");
  return span;
}

template <typename T>
T Get(const json &doc, const char *key, const std::string &field) {
  if (!doc.contains(key)) throw ParseError(field + "/" + key, "missing");
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception &) {
    throw ParseError(field + "/" + key, "wrong type");
  }
}

std::string Trimmed(std::string text) {
  if (!text.empty() && text.back() == '\n') text.pop_back();
  if (!text.empty() && text.back() == '\r') text.pop_back();
  return text;
}

}  // namespace

std::string_view ToString(CaseSource source) {
  switch (source) {
    case CaseSource::kWeb: return "web";
    case CaseSource::kAcademic: return "academic";
    case CaseSource::kSynthetic: return "synthetic";
  }
  return "";
}

std::string ReadFile(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFileAtomically(const fs::path &path, const std::string &content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out.write(content.data(), static_cast<std::streamsize>(content.size()))) {
      throw Error("cannot write " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

std::string CanonicalJson(const json &doc) {
  json copy = doc;
  RoundFloats(copy);
  return copy.dump(2) + "\n";
}

Case LoadCase(const fs::path &dir) {
  if (!fs::is_directory(dir)) throw LoadError("case directory not found: " + dir.string());
  for (const char *name : {"paragraph.txt", "chart.png", "encoding.json"}) {
    if (!fs::is_regular_file(dir / name)) {
      throw LoadError("case " + dir.string() + " is missing " + name);
    }
  }
  Case c{dir.filename().string(), dir, Trimmed(ReadFile(dir / "paragraph.txt")),
         dir / "chart.png", ParseEncoding(ReadFile(dir / "encoding.json")),
         CaseSource::kSynthetic};
  if (c.case_id.empty()) c.case_id = fs::absolute(dir).parent_path().filename().string();
  if (c.paragraph.empty()) throw LoadError("case " + c.case_id + " has an empty paragraph");

  Image chart = ReadPng(c.chart_path);
  ImageSize declared = c.encoding.image_size();
  if (chart.width != declared.width || chart.height != declared.height) {
    throw LoadError("case " + c.case_id + ": chart.png is " + std::to_string(chart.width) + "x" +
                    std::to_string(chart.height) + " but encoding.json declares " +
                    std::to_string(declared.width) + "x" + std::to_string(declared.height));
  }

  if (fs::is_regular_file(dir / "case.json")) {
    json meta;
    try {
      meta = json::parse(ReadFile(dir / "case.json"));
    } catch (const json::parse_error &e) {
      throw ParseError("case.json", e.what());
    }
    std::string source = meta.value("source", "synthetic");
    if (source == "web") {
      c.source = CaseSource::kWeb;
    } else if (source == "academic") {
      c.source = CaseSource::kAcademic;
    } else if (source != "synthetic") {
      throw ParseError("case.json/source", "unknown source '" + source + "'");
    }
  }
  return c;
}

std::vector<fs::path> ListCases(const fs::path &root) {
  if (!fs::is_directory(root)) throw LoadError("corpus directory not found: " + root.string());
  std::vector<fs::path> out;
  for (const auto &entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && fs::is_regular_file(entry.path() / "encoding.json")) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

json LinksToJson(const LinksRecord &record) {
  json links = json::array();
  for (const IndividualLink &link : record.links) {
    json phrase = {{"start", link.phrase.span.start},
                   {"end", link.phrase.span.end},
                   {"text", link.phrase.text},
                   {"sentence", link.phrase.sentence_index}};
    if (link.phrase.source_label) phrase["label"] = *link.phrase.source_label;
    links.push_back({{"id", link.id},
                     {"phrase", phrase},
                     {"elementId", link.element_id},
                     {"channel", link.channel ? json(ToString(*link.channel)) : json(nullptr)},
                     {"operator", ToString(link.provenance.op)},
                     {"score", link.provenance.score},
                     {"status", ToString(link.status)}});
  }
  json groups = json::array();
  for (const GroupedLink &group : record.groups) {
    json channels = json::array();
    for (ChannelName c : group.channels) channels.push_back(ToString(c));
    groups.push_back({{"id", group.id},
                      {"memberIds", group.member_link_ids},
                      {"span", SpanJson(group.span)},
                      {"channels", channels}});
  }
  return {{"revision", record.revision}, {"individualLinks", links}, {"groupedLinks", groups}};
}

bool SameStoredLinks(const LinksRecord &a, const LinksRecord &b) {
  json left = LinksToJson(a), right = LinksToJson(b);
  left.erase("revision");
  right.erase("revision");
  return CanonicalJson(left) == CanonicalJson(right);
}

LinksRecord LinksFromJson(const json &doc) {
  if (!doc.is_object()) throw ParseError("", "links document must be an object");
  LinksRecord record;
  record.exists = true;
  record.revision = doc.value("revision", 0);
  const json &links = doc.contains("individualLinks") ? doc["individualLinks"] : json::array();
  for (size_t i = 0; i < links.size(); ++i) {
    std::string field = "individualLinks/" + std::to_string(i);
    const json &item = links[i];
    IndividualLink link;
    link.id = Get<std::string>(item, "id", field);
    if (!item.contains("phrase")) throw ParseError(field + "/phrase", "missing");
    link.phrase.span = SpanFrom(item["phrase"], field + "/phrase");
    link.phrase.text = Get<std::string>(item["phrase"], "text", field + "/phrase");
    link.phrase.sentence_index = item["phrase"].value("sentence", 0);
    if (item["phrase"].contains("label")) {
      link.phrase.source_label = Get<std::string>(item["phrase"], "label", field + "/phrase");
    }
    link.element_id = Get<std::string>(item, "elementId", field);
    if (item.contains("channel") && !item["channel"].is_null()) {
      auto channel = ParseChannelName(Get<std::string>(item, "channel", field));
      if (!channel) throw ParseError(field + "/channel", "unknown channel");
      link.channel = channel;
    }
    auto op = ParseMatchOperator(Get<std::string>(item, "operator", field));
    if (!op) throw ParseError(field + "/operator", "unknown operator");
    link.provenance = {*op, item.value("score", 1.0)};
    auto status = ParseLinkStatus(Get<std::string>(item, "status", field));
    if (!status) throw ParseError(field + "/status", "unknown status");
    link.status = *status;
    record.links.push_back(std::move(link));
  }
  const json &groups = doc.contains("groupedLinks") ? doc["groupedLinks"] : json::array();
  for (size_t i = 0; i < groups.size(); ++i) {
    std::string field = "groupedLinks/" + std::to_string(i);
    const json &item = groups[i];
    GroupedLink group;
    group.id = Get<std::string>(item, "id", field);
    group.member_link_ids = Get<std::vector<std::string>>(item, "memberIds", field);
    if (!item.contains("span")) throw ParseError(field + "/span", "missing");
    group.span = SpanFrom(item["span"], field + "/span");
    for (const std::string &name : Get<std::vector<std::string>>(item, "channels", field)) {
      auto channel = ParseChannelName(name);
      if (!channel) throw ParseError(field + "/channels", "unknown channel '" + name + "'");
      group.channels.insert(*channel);
    }
    record.groups.push_back(std::move(group));
  }
  return record;
}

LinksRecord LoadLinks(const fs::path &case_dir) {
  fs::path path = case_dir / "links.json";
  if (!fs::exists(path)) return {};
  try {
    return LinksFromJson(json::parse(ReadFile(path)));
  } catch (const json::parse_error &e) {
    throw ParseError("", path.string() + ": " + e.what());
  }
}

int SaveLinks(const fs::path &case_dir, const std::vector<IndividualLink> &links,
              const std::vector<GroupedLink> &groups, std::optional<int> expected_revision) {
  if (!fs::is_directory(case_dir)) throw NotFoundError("unknown case " + case_dir.string());
  LinksRecord current = LoadLinks(case_dir);
  if (expected_revision && *expected_revision != current.revision) {
    throw ConflictError("stale revision " + std::to_string(*expected_revision) +
                        "; current revision is " + std::to_string(current.revision));
  }
  LinksRecord next{true, current.revision + 1, links, groups};
  WriteFileAtomically(case_dir / "links.json", CanonicalJson(LinksToJson(next)));
  return next.revision;
}

GoldAnnotation ImportGold(const fs::path &path, const Case &c) {
  json doc;
  try {
    doc = json::parse(ReadFile(path));
  } catch (const json::parse_error &e) {
    throw ParseError("", path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("groups") || !doc["groups"].is_array()) {
    throw ParseError("groups", "gold file needs a groups array");
  }
  GoldAnnotation gold;
  gold.case_id = c.case_id;
  gold.annotator = doc.value("annotator", "");
  gold.guideline_version = doc.value("guidelineVersion", "");
  const int length = static_cast<int>(c.paragraph.size());
  for (size_t g = 0; g < doc["groups"].size(); ++g) {
    std::string field = "groups/" + std::to_string(g);
    const json &item = doc["groups"][g];
    ScoredGroup group;
    if (!item.contains("phrases") || !item["phrases"].is_array()) {
      throw ParseError(field + "/phrases", "missing");
    }
    for (size_t p = 0; p < item["phrases"].size(); ++p) {
      std::string pfield = field + "/phrases/" + std::to_string(p);
      CharSpan span = SpanFrom(item["phrases"][p], pfield);
      if (span.end > length) throw ParseError(pfield, "span lies outside the paragraph");
      group.phrases.insert(span);
    }
    for (const std::string &id : Get<std::vector<std::string>>(item, "elementIds", field)) {
      if (!c.encoding.element(id)) {
        throw ParseError(field + "/elementIds", "unknown element id '" + id + "'");
      }
      group.element_ids.insert(id);
    }
    if (std::find(gold.groups.begin(), gold.groups.end(), group) != gold.groups.end()) {
      gold.warnings.push_back(field + " duplicates an earlier group");
    }
    gold.groups.push_back(std::move(group));
  }
  return gold;
}

}  // namespace chartlink
