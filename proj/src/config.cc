#include "chartlink/config.h"

#include <cstdlib>
#include <set>

#include "chartlink/corpus.h"
#include "chartlink/errors.h"

namespace chartlink {

using nlohmann::json;

namespace {

void CheckKeys(const json &doc, const std::string &path, const std::set<std::string> &allowed) {
  if (!doc.is_object()) throw ParseError(path, "expected an object");
  for (const auto &item : doc.items()) {
    if (!allowed.count(item.key())) {
      throw ParseError(path.empty() ? item.key() : path + "/" + item.key(), "unknown key");
    }
  }
}

template <typename T>
void Read(const json &doc, const char *key, const std::string &path, T &out) {
  if (!doc.contains(key)) return;
  try {
    out = doc.at(key).get<T>();
  } catch (const json::exception &) {
    throw ParseError(path.empty() ? key : path + "/" + key, "wrong type");
  }
}

double ParseNumber(const std::string &name, const std::string &text) {
  try {
    size_t used = 0;
    double value = std::stod(text, &used);
    if (used == text.size()) return value;
  } catch (const std::exception &) {
  }
  throw ParseError(name, "expected a number, got '" + text + "'");
}

}  // namespace

void ApplyConfigJson(Config &config, const json &doc) {
  CheckKeys(doc, "", {"host", "port", "data_dir", "nlp", "semantic", "overlay", "transcript",
                      "audio"});
  Read(doc, "host", "", config.host);
  Read(doc, "port", "", config.port);
  std::string data_dir;
  Read(doc, "data_dir", "", data_dir);
  if (!data_dir.empty()) config.data_dir = data_dir;
  if (doc.contains("nlp")) {
    const json &nlp = doc["nlp"];
    CheckKeys(nlp, "nlp", {"backend", "fixture_path", "external_url"});
    Read(nlp, "backend", "nlp", config.nlp_backend);
    std::string fixture;
    Read(nlp, "fixture_path", "nlp", fixture);
    if (!fixture.empty()) config.fixture_path = fixture;
    Read(nlp, "external_url", "nlp", config.external_url);
  }
  if (doc.contains("semantic")) {
    CheckKeys(doc["semantic"], "semantic", {"threshold"});
    Read(doc["semantic"], "threshold", "semantic", config.semantic_threshold);
  }
  if (doc.contains("overlay")) {
    const json &overlay = doc["overlay"];
    CheckKeys(overlay, "overlay", {"stroke_width", "stroke", "dim_alpha", "tolerance"});
    Read(overlay, "stroke_width", "overlay", config.overlay.stroke_width);
    Read(overlay, "dim_alpha", "overlay", config.overlay.dim_alpha);
    Read(overlay, "tolerance", "overlay", config.overlay.tolerance);
    if (overlay.contains("stroke")) {
      std::array<int, 3> rgb{};
      Read(overlay, "stroke", "overlay", rgb);
      config.overlay.stroke = {rgb[0], rgb[1], rgb[2]};
    }
  }
  if (doc.contains("transcript")) {
    CheckKeys(doc["transcript"], "transcript", {"final_hold"});
    Read(doc["transcript"], "final_hold", "transcript", config.transcript_final_hold);
  }
  if (doc.contains("audio")) {
    CheckKeys(doc["audio"], "audio", {"enabled", "speech_url"});
    Read(doc["audio"], "enabled", "audio", config.audio_enabled);
    Read(doc["audio"], "speech_url", "audio", config.speech_url);
  }
}

void ApplyEnvironment(Config &config, const EnvLookup &lookup) {
  if (auto v = lookup("CHARTLINK_HOST")) config.host = *v;
  if (auto v = lookup("CHARTLINK_PORT")) {
    config.port = static_cast<int>(ParseNumber("CHARTLINK_PORT", *v));
  }
  if (auto v = lookup("CHARTLINK_DATA_DIR")) config.data_dir = *v;
  if (auto v = lookup("CHARTLINK_NLP_BACKEND")) config.nlp_backend = *v;
  if (auto v = lookup("CHARTLINK_NLP_FIXTURE_PATH")) config.fixture_path = *v;
  if (auto v = lookup("CHARTLINK_NLP_EXTERNAL_URL")) config.external_url = *v;
  if (auto v = lookup("CHARTLINK_SEMANTIC_THRESHOLD")) {
    config.semantic_threshold = ParseNumber("CHARTLINK_SEMANTIC_THRESHOLD", *v);
  }
  if (auto v = lookup("CHARTLINK_OVERLAY_STROKE_WIDTH")) {
    config.overlay.stroke_width = ParseNumber("CHARTLINK_OVERLAY_STROKE_WIDTH", *v);
  }
  if (auto v = lookup("CHARTLINK_OVERLAY_DIM_ALPHA")) {
    config.overlay.dim_alpha = ParseNumber("CHARTLINK_OVERLAY_DIM_ALPHA", *v);
  }
  if (auto v = lookup("CHARTLINK_OVERLAY_TOLERANCE")) {
    config.overlay.tolerance = ParseNumber("CHARTLINK_OVERLAY_TOLERANCE", *v);
  }
  if (auto v = lookup("CHARTLINK_AUDIO_ENABLED")) {
    config.audio_enabled = *v == "1" || *v == "true";
  }
  if (auto v = lookup("CHARTLINK_SPEECH_URL")) config.speech_url = *v;
}

Config LoadConfig(const std::optional<std::filesystem::path> &path) {
  Config config;
  if (path) {
    try {
      ApplyConfigJson(config, json::parse(ReadFile(*path)));
    } catch (const json::parse_error &e) {
      throw ParseError("", path->string() + ": " + e.what());
    }
  }
  ApplyEnvironment(config, [](const std::string &name) -> std::optional<std::string> {
    const char *value = std::getenv(name.c_str());
    if (!value) return std::nullopt;
    return std::string(value);
  });
  ValidateConfig(config);
  return config;
}

void ValidateConfig(const Config &config) {
  if (config.port < 0 || config.port > 65535) throw ParseError("port", "out of range");
  if (config.semantic_threshold < 0 || config.semantic_threshold > 1) {
    throw ParseError("semantic/threshold", "must lie in [0, 1]");
  }
  if (config.overlay.dim_alpha < 0 || config.overlay.dim_alpha > 1) {
    throw ParseError("overlay/dim_alpha", "must lie in [0, 1]");
  }
  if (config.overlay.stroke_width <= 0) throw ParseError("overlay/stroke_width", "must be positive");
  if (config.overlay.tolerance < 0) throw ParseError("overlay/tolerance", "must be non-negative");
  for (int c : {config.overlay.stroke.r, config.overlay.stroke.g, config.overlay.stroke.b}) {
    if (c < 0 || c > 255) throw ParseError("overlay/stroke", "components must lie in [0, 255]");
  }
  if (config.transcript_final_hold < 0) {
    throw ParseError("transcript/final_hold", "must be non-negative");
  }
  if (config.nlp_backend != "fixture" && config.nlp_backend != "external") {
    throw ParseError("nlp/backend", "must be 'fixture' or 'external'");
  }
}

std::unique_ptr<NlpBackend> MakeBackend(const Config &config) {
  if (config.nlp_backend == "external") {
    if (config.external_url.empty()) {
      throw BackendError("nlp.backend is external but nlp.external_url is not set");
    }
    return std::make_unique<ExternalBackend>(config.external_url);
  }
  auto backend = std::make_unique<FixtureBackend>();
  std::filesystem::path source = config.fixture_path.empty() ? config.data_dir : config.fixture_path;
  if (std::filesystem::is_directory(source)) {
    backend->AddDirectory(source);
  } else if (std::filesystem::is_regular_file(source)) {
    backend->AddFile(source);
  } else {
    throw BackendError("fixture path not found: " + source.string());
  }
  return backend;
}

}  // namespace chartlink
