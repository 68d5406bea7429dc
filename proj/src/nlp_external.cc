#include <set>

#include "chartlink/errors.h"
#include "chartlink/nlp.h"
#include "httplib.h"

namespace chartlink {

using nlohmann::json;

struct ExternalBackend::Client {
  std::unique_ptr<httplib::Client> http;
  std::string prefix;
};

namespace {

const std::set<std::string> kRequiredCapabilities = {
    "sentences", "constituency", "dependency", "entities", "embedding"};

}  // namespace

ExternalBackend::ExternalBackend(const std::string &base_url)
    : client_(std::make_unique<Client>()) {
  // Split "http://host:port/prefix" into origin and path prefix.
  size_t scheme = base_url.find("://");
  size_t path_start = base_url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  std::string origin = base_url.substr(0, path_start);
  if (path_start != std::string::npos) {
    client_->prefix = base_url.substr(path_start);
    while (!client_->prefix.empty() && client_->prefix.back() == '/') {
      client_->prefix.pop_back();
    }
  }
  client_->http = std::make_unique<httplib::Client>(origin);
  client_->http->set_connection_timeout(5);
  client_->http->set_read_timeout(60);

  auto res = client_->http->Get(client_->prefix + "/capabilities");
  if (!res) {
    throw BackendError("external NLP backend unreachable at " + base_url + ": " +
                       httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw BackendError("external NLP backend capability probe failed with HTTP " +
                       std::to_string(res->status));
  }
  json caps;
  try {
    caps = json::parse(res->body);
  } catch (const json::exception &e) {
    throw BackendError(std::string("malformed capability response: ") + e.what());
  }
  std::set<std::string> offered;
  for (const json &c : caps.value("capabilities", json::array())) {
    if (c.is_string()) offered.insert(c.get<std::string>());
  }
  std::vector<std::string> missing;
  for (const std::string &c : kRequiredCapabilities) {
    if (!offered.count(c)) missing.push_back(c);
  }
  if (!missing.empty()) {
    throw BackendError("external NLP backend lacks capabilities: " + Join(missing, ", "));
  }
  dim_ = caps.value("embeddingDim", size_t{0});
  if (dim_ == 0) throw BackendError("external NLP backend reports no embedding dimension");
}

ExternalBackend::~ExternalBackend() = default;

json ExternalBackend::Post(const std::string &path, const json &body) {
  std::lock_guard lock(mu_);
  auto res = client_->http->Post(client_->prefix + path, body.dump(), "application/json");
  if (!res) {
    throw BackendError("external NLP backend request " + path +
                       " failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw BackendError("external NLP backend request " + path + " returned HTTP " +
                       std::to_string(res->status) + ": " + res->body);
  }
  try {
    return json::parse(res->body);
  } catch (const json::exception &e) {
    throw BackendError("malformed response from " + path + ": " + e.what());
  }
}

SyntaxAnnotation ExternalBackend::DoAnnotate(std::string_view paragraph) {
  json doc = Post("/annotate", {{"paragraph", std::string(paragraph)}});
  try {
    SyntaxAnnotation annotation = AnnotationFromJson(doc);
    if (annotation.paragraph != paragraph) {
      throw BackendError("external backend annotated a different paragraph");
    }
    return annotation;
  } catch (const ParseError &e) {
    throw BackendError(std::string("invalid annotation from external backend: ") + e.what());
  } catch (const json::exception &e) {
    throw BackendError(std::string("invalid annotation from external backend: ") + e.what());
  }
}

EmbeddingVector ExternalBackend::DoEmbed(std::string_view text) {
  json doc = Post("/embed", {{"text", std::string(text)}});
  EmbeddingVector out;
  try {
    out.components = doc.at("vector").get<std::vector<double>>();
  } catch (const json::exception &e) {
    throw BackendError(std::string("invalid embedding from external backend: ") + e.what());
  }
  if (out.dim() != dim_) {
    throw BackendError("external backend returned a vector of dimension " +
                       std::to_string(out.dim()) + ", expected " + std::to_string(dim_));
  }
  return out;
}

}  // namespace chartlink
