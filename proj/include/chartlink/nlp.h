#ifndef CHARTLINK_NLP_H_
#define CHARTLINK_NLP_H_

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "chartlink/text.h"
#include "json.hpp"

namespace chartlink {

// One word of a sentence. `index` and `head` are positions within the
// sentence; the root token is its own head.
struct Token {
  int index = 0;
  std::string text;
  CharSpan span;
  std::string pos;
  int head = 0;
  std::string dep;

  bool is_root() const { return head == index; }
  bool operator==(const Token &) const = default;
};

// Constituency node. Leaves are preterminals (label = POS tag) spanning
// exactly one token. `level` is the depth below the sentence root (0).
struct ConstituencyNode {
  std::string label;
  CharSpan span;
  int level = 0;
  std::vector<ConstituencyNode> children;

  bool is_leaf() const { return children.empty(); }
  bool operator==(const ConstituencyNode &) const = default;
};

enum class EntityType { kPercent, kMoney, kCardinal, kDate };

std::string_view ToString(EntityType type);
std::optional<EntityType> ParseEntityType(std::string_view name);

struct EntityMention {
  CharSpan span;
  EntityType type = EntityType::kCardinal;
  // Numeric reading reported by the backend (years for dates), if any.
  std::optional<double> normalized_value;

  bool operator==(const EntityMention &) const = default;
};

struct Sentence {
  CharSpan span;
  ConstituencyNode root;
  std::vector<Token> tokens;

  bool operator==(const Sentence &) const = default;
};

struct SyntaxAnnotation {
  std::string paragraph;
  std::vector<Sentence> sentences;
  std::vector<EntityMention> entities;

  std::string_view Slice(const CharSpan &span) const {
    return std::string_view(paragraph).substr(span.start, span.length());
  }
  // Index of the sentence containing the whole span, if any.
  std::optional<size_t> SentenceOf(const CharSpan &span) const;

  bool operator==(const SyntaxAnnotation &) const = default;
};

struct EmbeddingVector {
  std::vector<double> components;
  size_t dim() const { return components.size(); }
};

// POS helpers accepting both universal (NUM, NOUN) and Penn (CD, NNS) tags.
bool IsNumTag(std::string_view pos);
bool IsNounTag(std::string_view pos);
bool IsVerbTag(std::string_view pos);
bool IsAdpositionTag(std::string_view pos);
// Determiners, adpositions, conjunctions, pronouns, particles, punctuation.
bool IsFunctionTag(std::string_view pos);

// Token positions of `sentence` that overlap `span`.
std::vector<int> TokensInSpan(const Sentence &sentence, const CharSpan &span);

// The token of the span whose dependency head lies outside the span (or
// the root); the shallowest such token wins, then the leftmost. Returns
// nullopt when the span covers no token.
std::optional<int> SpanHead(const Sentence &sentence, const CharSpan &span);

// Number of dependency edges between the head tokens of two spans of the
// same sentence. Throws NoPathError when the spans are in different
// sentences (or outside every sentence).
int DependencyPathLength(const SyntaxAnnotation &annotation,
                         const CharSpan &span_a, const CharSpan &span_b);

// Edges between two tokens of one sentence.
int TokenDistance(const Sentence &sentence, int a, int b);

// Validates structural invariants (token order, single-rooted dependency
// tree, constituency leaves on tokens, entities inside sentences).
// Throws ParseError describing the first violation.
void ValidateAnnotation(const SyntaxAnnotation &annotation);

// Canonical JSON form used by fixtures and the external adapter. The
// reader also accepts the compact authoring form where a sentence is given
// as {"ptb": "(S (NP (NNP DepType)) ...)", "deps": [[head, "label"], ...]}
// and entities as {"text": "27.0%", "type": "PERCENT"}.
SyntaxAnnotation AnnotationFromJson(const nlohmann::json &doc);
nlohmann::json AnnotationToJson(const SyntaxAnnotation &annotation);

// Linguistic analysis capabilities. Implementations must be safe to call
// concurrently.
class NlpBackend {
 public:
  virtual ~NlpBackend() = default;

  // Throws PreconditionError for an empty paragraph, BackendError when the
  // engine fails.
  SyntaxAnnotation Annotate(std::string_view paragraph);
  // Throws PreconditionError for empty text.
  EmbeddingVector Embed(std::string_view text);

  virtual size_t embedding_dim() const = 0;

 protected:
  virtual SyntaxAnnotation DoAnnotate(std::string_view paragraph) = 0;
  virtual EmbeddingVector DoEmbed(std::string_view text) = 0;
};

// Deterministic backend serving pre-authored annotations keyed by exact
// paragraph text, plus an embedding table keyed by exact string. Strings
// absent from the table fall back to a hashed bag-of-words vector (sum of
// per-word pseudo-random vectors) unless the fallback is disabled.
class FixtureBackend : public NlpBackend {
 public:
  static constexpr size_t kDefaultDim = 64;

  FixtureBackend() = default;

  // Adds one fixture document (see AnnotationFromJson); a document may
  // carry only "embeddings". Throws ParseError on malformed input. Safe to
  // call while other threads annotate.
  void AddDocument(const nlohmann::json &doc, const std::string &origin = "");
  // A file holds one document or an array of them.
  void AddFile(const std::filesystem::path &path);
  // Recursively loads every "fixture.json" and "*.fixture.json".
  void AddDirectory(const std::filesystem::path &dir);

  void set_hash_fallback(bool enabled) { hash_fallback_ = enabled; }
  size_t embedding_dim() const override;
  size_t paragraph_count() const;

 protected:
  SyntaxAnnotation DoAnnotate(std::string_view paragraph) override;
  EmbeddingVector DoEmbed(std::string_view text) override;

 private:
  EmbeddingVector HashedEmbedding(std::string_view text) const;

  mutable std::shared_mutex mu_;
  size_t dim_ = kDefaultDim;
  bool dim_fixed_ = false;
  bool hash_fallback_ = true;
  std::map<std::string, SyntaxAnnotation, std::less<>> annotations_;
  std::map<std::string, std::vector<double>, std::less<>> embeddings_;
};

// Adapter for an out-of-process engine speaking the JSON protocol:
//   GET  /capabilities -> {"capabilities": [...], "embeddingDim": n}
//   POST /annotate {"paragraph"} -> canonical annotation JSON
//   POST /embed {"text"} -> {"vector": [...]}
// The constructor fails with BackendError unless all of sentences,
// constituency, dependency, entities and embedding are advertised.
class ExternalBackend : public NlpBackend {
 public:
  explicit ExternalBackend(const std::string &base_url);
  ~ExternalBackend() override;

  size_t embedding_dim() const override { return dim_; }

 protected:
  SyntaxAnnotation DoAnnotate(std::string_view paragraph) override;
  EmbeddingVector DoEmbed(std::string_view text) override;

 private:
  nlohmann::json Post(const std::string &path, const nlohmann::json &body);

  struct Client;
  std::unique_ptr<Client> client_;
  std::mutex mu_;
  size_t dim_ = 0;
};

// Memoizes embeddings of a backend; safe under concurrent lookups/inserts.
class EmbeddingCache {
 public:
  explicit EmbeddingCache(NlpBackend &backend) : backend_(backend) {}

  EmbeddingVector Get(std::string_view text);

 private:
  NlpBackend &backend_;
  std::shared_mutex mu_;
  std::unordered_map<std::string, EmbeddingVector> cache_;
};

}  // namespace chartlink

#endif  // CHARTLINK_NLP_H_
