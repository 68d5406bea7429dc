#ifndef CHARTLINK_CONFIG_H_
#define CHARTLINK_CONFIG_H_

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "chartlink/nlp.h"
#include "chartlink/overlay.h"
#include "json.hpp"

namespace chartlink {

struct Config {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir = "data/cases";
  std::string nlp_backend = "fixture";  // fixture | external
  // Fixture files or directories; empty means data_dir.
  std::filesystem::path fixture_path;
  std::string external_url;
  double semantic_threshold = 0.78;
  OverlayStyle overlay;
  double transcript_final_hold = 2.0;  // seconds the last overlay stays up
  bool audio_enabled = false;
  std::string speech_url;
};

// Applies a JSON config document over `config`:
//   {"host", "port", "data_dir",
//    "nlp": {"backend", "fixture_path", "external_url"},
//    "semantic": {"threshold"},
//    "overlay": {"stroke_width", "stroke": [r, g, b], "dim_alpha", "tolerance"},
//    "transcript": {"final_hold"},
//    "audio": {"enabled", "speech_url"}}
// Unknown keys raise ParseError.
void ApplyConfigJson(Config &config, const nlohmann::json &doc);

// CHARTLINK_HOST, CHARTLINK_PORT, CHARTLINK_DATA_DIR, CHARTLINK_NLP_BACKEND,
// CHARTLINK_NLP_FIXTURE_PATH, CHARTLINK_NLP_EXTERNAL_URL,
// CHARTLINK_SEMANTIC_THRESHOLD, CHARTLINK_OVERLAY_STROKE_WIDTH,
// CHARTLINK_OVERLAY_DIM_ALPHA, CHARTLINK_OVERLAY_TOLERANCE,
// CHARTLINK_AUDIO_ENABLED, CHARTLINK_SPEECH_URL.
using EnvLookup = std::function<std::optional<std::string>(const std::string &)>;
void ApplyEnvironment(Config &config, const EnvLookup &lookup);

// Defaults, then the file (if given), then the process environment.
Config LoadConfig(const std::optional<std::filesystem::path> &path);

// Throws ParseError for out-of-range values.
void ValidateConfig(const Config &config);

std::unique_ptr<NlpBackend> MakeBackend(const Config &config);

}  // namespace chartlink

#endif  // CHARTLINK_CONFIG_H_
