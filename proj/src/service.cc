#include "chartlink/service.h"

#include <filesystem>
#include <map>
#include <mutex>
#include <regex>

#include "chartlink/corpus.h"
#include "chartlink/errors.h"
#include "chartlink/overlay.h"
#include "chartlink/pipeline.h"
#include "chartlink/raster.h"
#include "chartlink/transcript.h"
#include "httplib.h"

namespace chartlink {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Error carrying an HTTP status and a problem code.
class HttpError : public Error {
 public:
  HttpError(int status, std::string code, const std::string &message, std::string field = "")
      : Error(message), status_(status), code_(std::move(code)), field_(std::move(field)) {}
  int status() const { return status_; }
  const std::string &code() const { return code_; }
  const std::string &field() const { return field_; }

 private:
  int status_;
  std::string code_;
  std::string field_;
};

void SendJson(httplib::Response &res, const json &body, int status = 200) {
  res.status = status;
  res.set_content(CanonicalJson(body), "application/json");
}

void SendProblem(httplib::Response &res, int status, const std::string &code,
                 const std::string &message, const std::string &field = "") {
  json body = {{"code", code}, {"message", message}};
  if (!field.empty()) body["field"] = field;
  SendJson(res, body, status);
}

void SendError(httplib::Response &res, std::exception_ptr error) {
  try {
    std::rethrow_exception(error);
  } catch (const HttpError &e) {
    SendProblem(res, e.status(), e.code(), e.what(), e.field());
  } catch (const ParseError &e) {
    SendProblem(res, 422, "invalid-input", e.what(), e.field());
  } catch (const UnsupportedChartError &e) {
    SendProblem(res, 422, "unsupported-chart", e.what());
  } catch (const PreconditionError &e) {
    SendProblem(res, 422, "precondition-failed", e.what());
  } catch (const GeometryError &e) {
    SendProblem(res, 422, "geometry-error", e.what());
  } catch (const NotFoundError &e) {
    SendProblem(res, 404, "not-found", e.what());
  } catch (const ConflictError &e) {
    SendProblem(res, 409, "conflict", e.what());
  } catch (const BackendError &e) {
    SendProblem(res, 502, "backend-error", e.what());
  } catch (const std::exception &e) {
    SendProblem(res, 500, "internal-error", e.what());
  } catch (...) {
    SendProblem(res, 500, "internal-error", "unknown error");
  }
}

json ParseBody(const httplib::Request &req, bool required) {
  if (req.body.empty()) {
    if (required) throw HttpError(422, "invalid-input", "request body is required");
    return json::object();
  }
  try {
    return json::parse(req.body);
  } catch (const json::parse_error &e) {
    throw HttpError(422, "invalid-input", std::string("malformed JSON body: ") + e.what());
  }
}

std::optional<int> RevisionOf(const json &body, bool required) {
  if (!body.is_object() || !body.contains("revision")) {
    if (required) throw HttpError(422, "invalid-input", "revision is required", "revision");
    return std::nullopt;
  }
  if (!body["revision"].is_number_integer()) {
    throw HttpError(422, "invalid-input", "revision must be an integer", "revision");
  }
  return body["revision"].get<int>();
}

bool ValidCaseId(const std::string &id) {
  static const std::regex pattern("[A-Za-z0-9][A-Za-z0-9_.-]{0,127}");
  return std::regex_match(id, pattern);
}

std::string HashId(const std::string &text) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buffer[24];
  std::snprintf(buffer, sizeof buffer, "case-%012llx",
                static_cast<unsigned long long>(h & 0xffffffffffffULL));
  return buffer;
}

std::pair<std::string, std::string> SplitUrl(const std::string &url) {
  size_t scheme = url.find("://");
  size_t path = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (path == std::string::npos) return {url, "/"};
  return {url.substr(0, path), url.substr(path)};
}

json RecordBody(const LinksRecord &record, const std::vector<std::string> &warnings = {}) {
  json body = LinksToJson(record);
  body["warnings"] = warnings;
  return body;
}

}  // namespace

struct Service::Impl {
  Config config;
  std::shared_ptr<NlpBackend> backend;
  EmbeddingCache embeddings;
  httplib::Server server;

  std::mutex locks_mu;
  std::map<std::string, std::shared_ptr<std::mutex>> case_locks;
  std::mutex create_mu;

  Impl(Config c, std::shared_ptr<NlpBackend> b)
      : config(std::move(c)), backend(std::move(b)), embeddings(*backend) {
    fs::create_directories(config.data_dir);
    Routes();
  }

  MatchOptions Options() const {
    MatchOptions options;
    options.semantic_threshold = config.semantic_threshold;
    return options;
  }

  std::shared_ptr<std::mutex> CaseLock(const std::string &id) {
    std::lock_guard lock(locks_mu);
    auto &slot = case_locks[id];
    if (!slot) slot = std::make_shared<std::mutex>();
    return slot;
  }

  Case Load(const std::string &id) {
    fs::path dir = config.data_dir / id;
    if (!ValidCaseId(id) || !fs::is_regular_file(dir / "encoding.json")) {
      throw NotFoundError("unknown case " + id);
    }
    return LoadCase(dir);
  }

  void Guard(httplib::Server &s, const char *method, const std::string &pattern,
             std::function<void(const httplib::Request &, httplib::Response &)> handler) {
    auto wrapped = [handler](const httplib::Request &req, httplib::Response &res) {
      try {
        handler(req, res);
      } catch (...) {
        SendError(res, std::current_exception());
      }
    };
    std::string m = method;
    if (m == "GET") s.Get(pattern, wrapped);
    if (m == "POST") s.Post(pattern, wrapped);
    if (m == "PATCH") s.Patch(pattern, wrapped);
  }

  void Routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Headers", "Content-Type"},
                                {"Access-Control-Allow-Methods", "GET, POST, PATCH, OPTIONS"}});
    server.Options(".*", [](const httplib::Request &, httplib::Response &res) {
      res.status = 204;
    });

    Guard(server, "GET", "/health", [](const httplib::Request &, httplib::Response &res) {
      SendJson(res, {{"status", "ok"}});
    });
    Guard(server, "GET", "/cases", [this](const httplib::Request &, httplib::Response &res) {
      json ids = json::array();
      for (const fs::path &dir : ListCases(config.data_dir)) ids.push_back(dir.filename().string());
      SendJson(res, {{"cases", ids}});
    });
    Guard(server, "POST", "/cases",
          [this](const httplib::Request &req, httplib::Response &res) { CreateCase(req, res); });
    Guard(server, "GET", R"(/cases/([^/]+))",
          [this](const httplib::Request &req, httplib::Response &res) {
            Case c = Load(req.matches[1]);
            SendJson(res, {{"caseId", c.case_id},
                           {"paragraph", c.paragraph},
                           {"source", ToString(c.source)},
                           {"encoding", EncodingToJson(c.encoding)},
                           {"revision", LoadLinks(c.dir).revision}});
          });
    Guard(server, "GET", R"(/cases/([^/]+)/chart\.png)",
          [this](const httplib::Request &req, httplib::Response &res) {
            Case c = Load(req.matches[1]);
            res.set_content(ReadFile(c.chart_path), "image/png");
          });
    Guard(server, "GET", R"(/cases/([^/]+)/links)",
          [this](const httplib::Request &req, httplib::Response &res) {
            Case c = Load(req.matches[1]);
            LinksRecord record = LoadLinks(c.dir);
            SendJson(res, RecordBody(record));
          });
    Guard(server, "POST", R"(/cases/([^/]+)/links:run)",
          [this](const httplib::Request &req, httplib::Response &res) { RunLinks(req, res); });
    Guard(server, "PATCH", R"(/cases/([^/]+)/links/([^/]+))",
          [this](const httplib::Request &req, httplib::Response &res) { EditLink(req, res); });
    Guard(server, "POST", R"(/cases/([^/]+)/links:regroup)",
          [this](const httplib::Request &req, httplib::Response &res) { RegroupLinks(req, res); });
    Guard(server, "GET", R"(/cases/([^/]+)/overlays)",
          [this](const httplib::Request &req, httplib::Response &res) { Overlays(req, res); });
    Guard(server, "POST", R"(/cases/([^/]+)/transcript)",
          [this](const httplib::Request &req, httplib::Response &res) {
            Case c = Load(req.matches[1]);
            SendJson(res, {{"events", Events(c, ParseTranscript(ParseBody(req, true)))}});
          });
    Guard(server, "POST", R"(/cases/([^/]+)/audio)",
          [this](const httplib::Request &req, httplib::Response &res) { Audio(req, res); });
  }

  void CreateCase(const httplib::Request &req, httplib::Response &res) {
    if (!req.is_multipart_form_data()) {
      throw HttpError(422, "invalid-input", "expected multipart/form-data");
    }
    for (const char *part : {"paragraph", "chart", "encoding"}) {
      if (!req.has_file(part)) {
        throw HttpError(422, "invalid-input", std::string("missing part ") + part, part);
      }
    }
    std::string paragraph = req.get_file_value("paragraph").content;
    std::string chart = req.get_file_value("chart").content;
    std::string encoding_text = req.get_file_value("encoding").content;
    if (NormalizeText(paragraph).empty()) {
      throw HttpError(422, "invalid-input", "paragraph is empty", "paragraph");
    }
    VisualEncoding encoding = ParseEncoding(encoding_text);
    Image image;
    try {
      image = DecodePng(chart);
    } catch (const LoadError &e) {
      throw HttpError(422, "invalid-input", e.what(), "chart");
    }
    if (image.width != encoding.image_size().width ||
        image.height != encoding.image_size().height) {
      throw HttpError(422, "invalid-input", "chart size differs from encoding imageSize", "chart");
    }
    std::optional<json> fixture;
    if (req.has_file("fixture")) {
      try {
        fixture = json::parse(req.get_file_value("fixture").content);
      } catch (const json::parse_error &e) {
        throw HttpError(422, "invalid-input", e.what(), "fixture");
      }
    }

    std::string id = req.has_file("case_id") ? req.get_file_value("case_id").content
                                              : HashId(paragraph + "\n" + encoding_text);
    if (!ValidCaseId(id)) throw HttpError(422, "invalid-input", "invalid case id", "case_id");

    std::lock_guard lock(create_mu);
    fs::path dir = config.data_dir / id;
    if (fs::exists(dir)) throw ConflictError("case " + id + " already exists");
    if (fixture) {
      auto *fixtures = dynamic_cast<FixtureBackend *>(backend.get());
      if (fixtures) fixtures->AddDocument(*fixture, "fixture");
    }
    fs::path staging = config.data_dir / ("." + id + ".new");
    fs::remove_all(staging);
    fs::create_directories(staging);
    WriteFileAtomically(staging / "paragraph.txt", paragraph);
    WriteFileAtomically(staging / "chart.png", chart);
    WriteFileAtomically(staging / "encoding.json", CanonicalJson(EncodingToJson(encoding)));
    if (fixture) WriteFileAtomically(staging / "fixture.json", CanonicalJson(*fixture));
    fs::rename(staging, dir);
    SendJson(res, {{"caseId", id}, {"revision", 0}}, 201);
  }

  void RunLinks(const httplib::Request &req, httplib::Response &res) {
    Case c = Load(req.matches[1]);
    std::optional<int> revision = RevisionOf(ParseBody(req, false), false);
    auto lock = CaseLock(c.case_id);
    std::lock_guard guard(*lock);
    LinksRecord previous = LoadLinks(c.dir);
    PipelineOutput out =
        RunPipeline(c.paragraph, c.encoding, *backend, &embeddings, Options(), previous.links);
    int next = previous.revision;
    if (revision && *revision != previous.revision) {
      throw ConflictError("stale revision " + std::to_string(*revision) +
                          "; current revision is " + std::to_string(previous.revision));
    }
    // An unchanged result keeps its revision so reruns are stable.
    if (!previous.exists || !SameStoredLinks(previous, {true, 0, out.links, out.groups})) {
      next = SaveLinks(c.dir, out.links, out.groups, previous.revision);
    }
    SendJson(res, RecordBody({true, next, out.links, out.groups}, out.warnings));
  }

  void EditLink(const httplib::Request &req, httplib::Response &res) {
    Case c = Load(req.matches[1]);
    std::string link_id = req.matches[2];
    json body = ParseBody(req, true);
    if (!body.is_object() || !body.contains("action") || !body["action"].is_string()) {
      throw HttpError(422, "invalid-input", "action is required", "action");
    }
    auto action = ParseEditAction(body["action"].get<std::string>());
    if (!action) {
      throw HttpError(422, "invalid-input", "action must be reassign, remove or confirm",
                      "action");
    }
    std::optional<std::string> element_id;
    if (body.contains("elementId")) {
      if (!body["elementId"].is_string()) {
        throw HttpError(422, "invalid-input", "elementId must be a string", "elementId");
      }
      element_id = body["elementId"].get<std::string>();
    }
    int revision = *RevisionOf(body, true);

    auto lock = CaseLock(c.case_id);
    std::lock_guard guard(*lock);
    LinksRecord record = LoadLinks(c.dir);
    if (revision != record.revision) {
      throw ConflictError("stale revision " + std::to_string(revision) +
                          "; current revision is " + std::to_string(record.revision));
    }
    ApplyEdit(record.links, link_id, *action, element_id, c.encoding);
    record.revision = SaveLinks(c.dir, record.links, record.groups, revision);
    auto it = std::find_if(record.links.begin(), record.links.end(),
                           [&](const IndividualLink &l) { return l.id == link_id; });
    json body_out = RecordBody(record);
    body_out["link"] = LinksToJson({true, 0, {*it}, {}})["individualLinks"][0];
    SendJson(res, body_out);
  }

  void RegroupLinks(const httplib::Request &req, httplib::Response &res) {
    Case c = Load(req.matches[1]);
    std::optional<int> revision = RevisionOf(ParseBody(req, false), false);
    auto lock = CaseLock(c.case_id);
    std::lock_guard guard(*lock);
    LinksRecord record = LoadLinks(c.dir);
    SyntaxAnnotation annotation = backend->Annotate(c.paragraph);
    record.groups = Regroup(annotation, record.links, c.encoding);
    record.revision = SaveLinks(c.dir, record.links, record.groups, revision);
    SendJson(res, RecordBody(record));
  }

  void Overlays(const httplib::Request &req, httplib::Response &res) {
    Case c = Load(req.matches[1]);
    std::string emit = req.has_param("emit") ? req.get_param_value("emit") : "specs";
    if (emit != "specs" && emit != "png") {
      throw HttpError(422, "invalid-input", "emit must be specs or png", "emit");
    }
    LinksRecord record = LoadLinks(c.dir);
    std::vector<const GroupedLink *> selected;
    if (req.has_param("group")) {
      std::string id = req.get_param_value("group");
      for (const GroupedLink &g : record.groups) {
        if (g.id == id) selected.push_back(&g);
      }
      if (selected.empty()) throw NotFoundError("unknown group " + id);
    } else {
      for (const GroupedLink &g : record.groups) selected.push_back(&g);
    }
    std::vector<OverlaySpec> specs;
    json groups = json::array();
    for (const GroupedLink *g : selected) {
      std::vector<OverlaySpec> built = BuildOverlays(*g, record.links, c.encoding, config.overlay);
      json list = json::array();
      for (const OverlaySpec &spec : built) list.push_back(OverlayToJson(spec));
      groups.push_back({{"groupId", g->id}, {"specs", list}});
      specs.insert(specs.end(), built.begin(), built.end());
    }
    if (emit == "png") {
      Image out = Composite(ReadPng(c.chart_path), specs, c.encoding.image_size());
      res.set_content(EncodePng(out), "image/png");
      return;
    }
    SendJson(res, {{"groups", groups}});
  }

  json Events(const Case &c, const std::vector<TranscriptSegment> &segments) {
    TranscriptOptions options;
    options.match = Options();
    options.style = config.overlay;
    options.final_hold = config.transcript_final_hold;
    return EventsToJson(BuildOverlayEvents(segments, c.encoding, *backend, &embeddings, options));
  }

  void Audio(const httplib::Request &req, httplib::Response &res) {
    if (!config.audio_enabled || config.speech_url.empty()) {
      throw HttpError(501, "audio-disabled",
                      "audio ingestion is disabled; post a transcript instead");
    }
    Case c = Load(req.matches[1]);
    auto [origin, path] = SplitUrl(config.speech_url);
    httplib::Client client(origin);
    client.set_read_timeout(120);
    std::string type = req.get_header_value("Content-Type");
    auto reply = client.Post(path, req.body, type.empty() ? "application/octet-stream" : type);
    if (!reply || reply->status != 200) {
      throw BackendError("speech-to-text service failed" +
                         (reply ? " with HTTP " + std::to_string(reply->status) : std::string()));
    }
    json transcript;
    try {
      transcript = json::parse(reply->body);
    } catch (const json::parse_error &e) {
      throw BackendError(std::string("malformed speech-to-text reply: ") + e.what());
    }
    SendJson(res, {{"events", Events(c, ParseTranscript(transcript))}});
  }
};

Service::Service(Config config, std::shared_ptr<NlpBackend> backend)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(backend))) {}

Service::~Service() = default;

bool Service::Listen() { return impl_->server.listen(impl_->config.host, impl_->config.port); }

int Service::BindToAnyPort() { return impl_->server.bind_to_any_port(impl_->config.host); }

bool Service::ListenAfterBind() { return impl_->server.listen_after_bind(); }

void Service::Stop() { impl_->server.stop(); }

}  // namespace chartlink
