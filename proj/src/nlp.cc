#include "chartlink/nlp.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "chartlink/errors.h"

namespace chartlink {

using nlohmann::json;

namespace {

bool OneOf(std::string_view value, std::initializer_list<std::string_view> options) {
  return std::find(options.begin(), options.end(), value) != options.end();
}

int Depth(const Sentence &sentence, int token) {
  int depth = 0;
  int current = token;
  while (!sentence.tokens[current].is_root()) {
    current = sentence.tokens[current].head;
    if (++depth > static_cast<int>(sentence.tokens.size())) break;
  }
  return depth;
}

CharSpan SpanFromJson(const json &value, const std::string &path) {
  if (!value.is_array() || value.size() != 2 || !value[0].is_number_integer() ||
      !value[1].is_number_integer()) {
    throw ParseError(path, "expected [start, end]");
  }
  return {value[0].get<int>(), value[1].get<int>()};
}

json SpanToJson(const CharSpan &span) { return json::array({span.start, span.end}); }

void AssignLevels(ConstituencyNode &node, int level) {
  node.level = level;
  for (ConstituencyNode &child : node.children) AssignLevels(child, level + 1);
}

ConstituencyNode NodeFromJson(const json &doc, const std::string &path) {
  if (!doc.is_object()) throw ParseError(path, "expected an object");
  ConstituencyNode node;
  if (!doc.contains("label") || !doc["label"].is_string()) {
    throw ParseError(path + "/label", "expected a string");
  }
  node.label = doc["label"].get<std::string>();
  if (!doc.contains("span")) throw ParseError(path + "/span", "missing span");
  node.span = SpanFromJson(doc["span"], path + "/span");
  if (doc.contains("children")) {
    const json &children = doc["children"];
    if (!children.is_array()) throw ParseError(path + "/children", "expected an array");
    for (size_t i = 0; i < children.size(); ++i) {
      node.children.push_back(
          NodeFromJson(children[i], path + "/children/" + std::to_string(i)));
    }
  }
  return node;
}

json NodeToJson(const ConstituencyNode &node) {
  json out = {{"label", node.label}, {"span", SpanToJson(node.span)}};
  if (!node.children.empty()) {
    json children = json::array();
    for (const ConstituencyNode &child : node.children) {
      children.push_back(NodeToJson(child));
    }
    out["children"] = children;
  }
  return out;
}

// Reader for bracketed trees whose leaves are aligned against the
// paragraph starting at a cursor.
class PtbReader {
 public:
  PtbReader(std::string ptb, std::string_view paragraph, int cursor,
            std::string path)
      : ptb_(std::move(ptb)), paragraph_(paragraph), cursor_(cursor), path_(std::move(path)) {}

  ConstituencyNode Read(std::vector<Token> &tokens) {
    ConstituencyNode root = ReadNode(tokens);
    SkipSpace();
    if (pos_ != ptb_.size()) Fail("trailing characters after tree");
    return root;
  }

  int cursor() const { return cursor_; }

 private:
  [[noreturn]] void Fail(const std::string &message) const {
    throw ParseError(path_, message + " (at offset " + std::to_string(pos_) + ")");
  }

  void SkipSpace() {
    while (pos_ < ptb_.size() && std::isspace(static_cast<unsigned char>(ptb_[pos_]))) {
      ++pos_;
    }
  }

  std::string ReadAtom() {
    SkipSpace();
    size_t start = pos_;
    while (pos_ < ptb_.size() && ptb_[pos_] != '(' && ptb_[pos_] != ')' &&
           !std::isspace(static_cast<unsigned char>(ptb_[pos_]))) {
      ++pos_;
    }
    if (start == pos_) Fail("expected a label or word");
    return std::string(ptb_.substr(start, pos_ - start));
  }

  void Expect(char c) {
    SkipSpace();
    if (pos_ >= ptb_.size() || ptb_[pos_] != c) Fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  static std::string Unescape(const std::string &word) {
    if (word == "-LRB-") return "(";
    if (word == "-RRB-") return ")";
    if (word == "-LSB-") return "[";
    if (word == "-RSB-") return "]";
    return word;
  }

  CharSpan Align(const std::string &word) {
    while (cursor_ < static_cast<int>(paragraph_.size()) &&
           std::isspace(static_cast<unsigned char>(paragraph_[cursor_]))) {
      ++cursor_;
    }
    if (paragraph_.substr(cursor_, word.size()) != word) {
      Fail("leaf '" + word + "' does not match paragraph text at offset " +
           std::to_string(cursor_));
    }
    CharSpan span{cursor_, cursor_ + static_cast<int>(word.size())};
    cursor_ = span.end;
    return span;
  }

  ConstituencyNode ReadNode(std::vector<Token> &tokens) {
    Expect('(');
    ConstituencyNode node;
    node.label = ReadAtom();
    SkipSpace();
    if (pos_ < ptb_.size() && ptb_[pos_] != '(') {
      std::string word = Unescape(ReadAtom());
      node.span = Align(word);
      Token token;
      token.index = static_cast<int>(tokens.size());
      token.text = word;
      token.span = node.span;
      token.pos = node.label;
      tokens.push_back(std::move(token));
      Expect(')');
      return node;
    }
    while (true) {
      SkipSpace();
      if (pos_ >= ptb_.size()) Fail("unbalanced brackets");
      if (ptb_[pos_] == ')') break;
      node.children.push_back(ReadNode(tokens));
    }
    Expect(')');
    if (node.children.empty()) Fail("empty constituent");
    node.span = {node.children.front().span.start, node.children.back().span.end};
    return node;
  }

  std::string ptb_;
  std::string_view paragraph_;
  int cursor_;
  std::string path_;
  size_t pos_ = 0;
};

void CollectLeaves(const ConstituencyNode &node, std::vector<const ConstituencyNode *> &out) {
  if (node.is_leaf()) {
    out.push_back(&node);
    return;
  }
  for (const ConstituencyNode &child : node.children) CollectLeaves(child, out);
}

void ValidateNode(const ConstituencyNode &node, const std::string &path) {
  if (node.span.empty()) throw ParseError(path, "empty constituent span");
  int cursor = node.span.start;
  for (size_t i = 0; i < node.children.size(); ++i) {
    const ConstituencyNode &child = node.children[i];
    std::string child_path = path + "/children/" + std::to_string(i);
    if (child.span.start < cursor || !node.span.contains(child.span)) {
      throw ParseError(child_path, "child span out of order or outside parent");
    }
    cursor = child.span.end;
    ValidateNode(child, child_path);
  }
}

uint64_t Fnv1a(std::string_view text) {
  uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

uint64_t SplitMix64(uint64_t &state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::string_view ToString(EntityType type) {
  switch (type) {
    case EntityType::kPercent: return "PERCENT";
    case EntityType::kMoney: return "MONEY";
    case EntityType::kCardinal: return "CARDINAL";
    case EntityType::kDate: return "DATE";
  }
  return "";
}

std::optional<EntityType> ParseEntityType(std::string_view name) {
  if (name == "PERCENT") return EntityType::kPercent;
  if (name == "MONEY") return EntityType::kMoney;
  if (name == "CARDINAL") return EntityType::kCardinal;
  if (name == "DATE") return EntityType::kDate;
  return std::nullopt;
}

bool IsNumTag(std::string_view pos) { return OneOf(pos, {"NUM", "CD"}); }

bool IsNounTag(std::string_view pos) {
  return OneOf(pos, {"NOUN", "PROPN", "NN", "NNS", "NNP", "NNPS"});
}

bool IsVerbTag(std::string_view pos) {
  return OneOf(pos, {"VERB", "AUX", "VB", "VBD", "VBG", "VBN", "VBP", "VBZ", "MD"});
}

bool IsAdpositionTag(std::string_view pos) { return OneOf(pos, {"ADP", "IN", "TO"}); }

bool IsFunctionTag(std::string_view pos) {
  return OneOf(pos, {"DET", "DT", "PDT", "ADP", "IN", "TO", "CCONJ", "SCONJ", "CC",
                     "PRON", "PRP", "PRP$", "WP", "WDT", "EX", "PART", "POS", "RP",
                     "AUX", "PUNCT", ",", ".", ":", "``", "''", "-LRB-", "-RRB-",
                     "HYPH", "SYM"});
}

std::optional<size_t> SyntaxAnnotation::SentenceOf(const CharSpan &span) const {
  for (size_t i = 0; i < sentences.size(); ++i) {
    if (sentences[i].span.contains(span)) return i;
  }
  return std::nullopt;
}

std::vector<int> TokensInSpan(const Sentence &sentence, const CharSpan &span) {
  std::vector<int> out;
  for (const Token &t : sentence.tokens) {
    if (t.span.overlaps(span)) out.push_back(t.index);
  }
  return out;
}

std::optional<int> SpanHead(const Sentence &sentence, const CharSpan &span) {
  std::vector<int> members = TokensInSpan(sentence, span);
  std::optional<int> best;
  int best_depth = 0;
  for (int index : members) {
    const Token &t = sentence.tokens[index];
    bool head_outside = t.is_root() ||
                        std::find(members.begin(), members.end(), t.head) == members.end();
    if (!head_outside) continue;
    int depth = Depth(sentence, index);
    if (!best || depth < best_depth) {
      best = index;
      best_depth = depth;
    }
  }
  return best;
}

int TokenDistance(const Sentence &sentence, int a, int b) {
  // Walk both tokens up to their lowest common ancestor.
  std::vector<int> path_a{a};
  while (!sentence.tokens[path_a.back()].is_root()) {
    path_a.push_back(sentence.tokens[path_a.back()].head);
  }
  int steps_b = 0;
  int current = b;
  while (true) {
    auto it = std::find(path_a.begin(), path_a.end(), current);
    if (it != path_a.end()) return static_cast<int>(it - path_a.begin()) + steps_b;
    if (sentence.tokens[current].is_root()) break;
    current = sentence.tokens[current].head;
    ++steps_b;
  }
  throw NoPathError("dependency structure is not a tree");
}

int DependencyPathLength(const SyntaxAnnotation &annotation, const CharSpan &span_a,
                         const CharSpan &span_b) {
  auto sa = annotation.SentenceOf(span_a);
  auto sb = annotation.SentenceOf(span_b);
  if (!sa || !sb || *sa != *sb) {
    throw NoPathError("spans are not within one sentence");
  }
  const Sentence &sentence = annotation.sentences[*sa];
  auto ha = SpanHead(sentence, span_a);
  auto hb = SpanHead(sentence, span_b);
  if (!ha || !hb) throw NoPathError("span covers no token");
  return TokenDistance(sentence, *ha, *hb);
}

void ValidateAnnotation(const SyntaxAnnotation &annotation) {
  const int size = static_cast<int>(annotation.paragraph.size());
  int cursor = 0;
  for (size_t s = 0; s < annotation.sentences.size(); ++s) {
    const Sentence &sentence = annotation.sentences[s];
    std::string path = "sentences/" + std::to_string(s);
    if (sentence.span.start < cursor || sentence.span.end > size || sentence.span.empty()) {
      throw ParseError(path + "/span", "sentence spans must be ordered inside the paragraph");
    }
    cursor = sentence.span.end;
    if (sentence.tokens.empty()) throw ParseError(path + "/tokens", "sentence has no tokens");

    int token_cursor = sentence.span.start;
    int roots = 0;
    const int n = static_cast<int>(sentence.tokens.size());
    for (int i = 0; i < n; ++i) {
      const Token &t = sentence.tokens[i];
      std::string tpath = path + "/tokens/" + std::to_string(i);
      if (t.index != i) throw ParseError(tpath, "token index out of order");
      if (t.span.empty() || t.span.start < token_cursor || t.span.end > sentence.span.end) {
        throw ParseError(tpath + "/span", "token spans must be ordered inside the sentence");
      }
      token_cursor = t.span.end;
      if (annotation.Slice(t.span) != t.text) {
        throw ParseError(tpath + "/text", "token text differs from paragraph slice");
      }
      if (t.head < 0 || t.head >= n) throw ParseError(tpath + "/head", "head out of range");
      if (t.is_root()) ++roots;
    }
    if (roots != 1) throw ParseError(path + "/tokens", "dependency tree needs exactly one root");
    for (int i = 0; i < n; ++i) {
      int current = i;
      for (int steps = 0; !sentence.tokens[current].is_root(); ++steps) {
        if (steps > n) throw ParseError(path + "/tokens", "dependency heads form a cycle");
        current = sentence.tokens[current].head;
      }
    }

    ValidateNode(sentence.root, path + "/tree");
    std::vector<const ConstituencyNode *> leaves;
    CollectLeaves(sentence.root, leaves);
    if (static_cast<int>(leaves.size()) != n) {
      throw ParseError(path + "/tree", "constituency leaves do not match tokens");
    }
    for (int i = 0; i < n; ++i) {
      if (leaves[i]->span != sentence.tokens[i].span) {
        throw ParseError(path + "/tree", "constituency leaf not aligned to token " +
                                             std::to_string(i));
      }
    }
  }
  for (size_t e = 0; e < annotation.entities.size(); ++e) {
    if (!annotation.SentenceOf(annotation.entities[e].span)) {
      throw ParseError("entities/" + std::to_string(e), "entity not inside one sentence");
    }
  }
}

SyntaxAnnotation AnnotationFromJson(const json &doc) {
  if (!doc.is_object()) throw ParseError("", "expected an object");
  if (!doc.contains("paragraph") || !doc["paragraph"].is_string()) {
    throw ParseError("paragraph", "expected a string");
  }
  SyntaxAnnotation annotation;
  annotation.paragraph = doc["paragraph"].get<std::string>();

  const json sentences = doc.value("sentences", json::array());
  int cursor = 0;
  for (size_t s = 0; s < sentences.size(); ++s) {
    const json &js = sentences[s];
    std::string path = "sentences/" + std::to_string(s);
    Sentence sentence;
    if (js.contains("ptb")) {
      PtbReader reader(js["ptb"].get<std::string>(), annotation.paragraph, cursor,
                       path + "/ptb");
      sentence.root = reader.Read(sentence.tokens);
      cursor = reader.cursor();
      sentence.span = sentence.root.span;
      const json deps = js.value("deps", json::array());
      if (deps.size() != sentence.tokens.size()) {
        throw ParseError(path + "/deps", "expected one [head, label] per token (" +
                                             std::to_string(sentence.tokens.size()) + ")");
      }
      for (size_t i = 0; i < deps.size(); ++i) {
        const json &d = deps[i];
        if (!d.is_array() || d.size() != 2 || !d[0].is_number_integer() || !d[1].is_string()) {
          throw ParseError(path + "/deps/" + std::to_string(i), "expected [head, label]");
        }
        int head = d[0].get<int>();
        sentence.tokens[i].head = head < 0 ? static_cast<int>(i) : head;
        sentence.tokens[i].dep = d[1].get<std::string>();
      }
      if (js.contains("pos")) {
        const json &pos = js["pos"];
        if (!pos.is_array() || pos.size() != sentence.tokens.size()) {
          throw ParseError(path + "/pos", "expected one tag per token");
        }
        for (size_t i = 0; i < pos.size(); ++i) {
          sentence.tokens[i].pos = pos[i].get<std::string>();
        }
      }
    } else {
      sentence.span = SpanFromJson(js.at("span"), path + "/span");
      sentence.root = NodeFromJson(js.at("tree"), path + "/tree");
      const json &tokens = js.at("tokens");
      for (size_t i = 0; i < tokens.size(); ++i) {
        const json &jt = tokens[i];
        std::string tpath = path + "/tokens/" + std::to_string(i);
        Token t;
        t.index = static_cast<int>(i);
        t.text = jt.at("text").get<std::string>();
        t.span = SpanFromJson(jt.at("span"), tpath + "/span");
        t.pos = jt.at("pos").get<std::string>();
        t.head = jt.at("head").get<int>();
        t.dep = jt.value("dep", "");
        sentence.tokens.push_back(std::move(t));
      }
    }
    AssignLevels(sentence.root, 0);
    annotation.sentences.push_back(std::move(sentence));
  }

  const json entities = doc.value("entities", json::array());
  for (size_t e = 0; e < entities.size(); ++e) {
    const json &je = entities[e];
    std::string path = "entities/" + std::to_string(e);
    EntityMention mention;
    std::string type = je.at("type").get<std::string>();
    auto parsed = ParseEntityType(type);
    if (!parsed) throw ParseError(path + "/type", "unsupported entity type '" + type + "'");
    mention.type = *parsed;
    if (je.contains("span")) {
      mention.span = SpanFromJson(je["span"], path + "/span");
    } else {
      std::string text = je.at("text").get<std::string>();
      int occurrence = je.value("occurrence", 0);
      size_t found = std::string::npos;
      size_t from = 0;
      for (int k = 0; k <= occurrence; ++k) {
        found = annotation.paragraph.find(text, from);
        if (found == std::string::npos) break;
        from = found + 1;
      }
      if (found == std::string::npos) {
        throw ParseError(path + "/text", "'" + text + "' not found in paragraph");
      }
      mention.span = {static_cast<int>(found), static_cast<int>(found + text.size())};
    }
    if (je.contains("value") && !je["value"].is_null()) {
      mention.normalized_value = je["value"].get<double>();
    }
    annotation.entities.push_back(mention);
  }
  ValidateAnnotation(annotation);
  return annotation;
}

json AnnotationToJson(const SyntaxAnnotation &annotation) {
  json sentences = json::array();
  for (const Sentence &s : annotation.sentences) {
    json tokens = json::array();
    for (const Token &t : s.tokens) {
      tokens.push_back({{"text", t.text},
                        {"span", SpanToJson(t.span)},
                        {"pos", t.pos},
                        {"head", t.head},
                        {"dep", t.dep}});
    }
    sentences.push_back(
        {{"span", SpanToJson(s.span)}, {"tree", NodeToJson(s.root)}, {"tokens", tokens}});
  }
  json entities = json::array();
  for (const EntityMention &e : annotation.entities) {
    json je = {{"span", SpanToJson(e.span)}, {"type", ToString(e.type)}};
    if (e.normalized_value) je["value"] = *e.normalized_value;
    entities.push_back(je);
  }
  return {{"paragraph", annotation.paragraph},
          {"sentences", sentences},
          {"entities", entities}};
}

SyntaxAnnotation NlpBackend::Annotate(std::string_view paragraph) {
  if (paragraph.empty()) throw PreconditionError("cannot annotate an empty paragraph");
  return DoAnnotate(paragraph);
}

EmbeddingVector NlpBackend::Embed(std::string_view text) {
  if (text.empty()) throw PreconditionError("cannot embed empty text");
  return DoEmbed(text);
}

size_t FixtureBackend::embedding_dim() const {
  std::shared_lock lock(mu_);
  return dim_;
}

size_t FixtureBackend::paragraph_count() const {
  std::shared_lock lock(mu_);
  return annotations_.size();
}

void FixtureBackend::AddDocument(const json &doc, const std::string &origin) {
  std::unique_lock lock(mu_);
  try {
    if (doc.contains("embeddingDim")) {
      size_t dim = doc["embeddingDim"].get<size_t>();
      if (dim == 0) throw ParseError("embeddingDim", "must be positive");
      if (dim_fixed_ && dim != dim_) {
        throw ParseError("embeddingDim", "conflicts with previously loaded fixtures");
      }
      dim_ = dim;
      dim_fixed_ = true;
    }
    if (doc.contains("embeddings")) {
      for (const auto &item : doc["embeddings"].items()) {
        std::vector<double> v = item.value().get<std::vector<double>>();
        if (v.size() > dim_) {
          throw ParseError("embeddings/" + item.key(), "vector longer than embeddingDim");
        }
        v.resize(dim_, 0.0);
        embeddings_[item.key()] = std::move(v);
      }
    }
    if (doc.contains("paragraph")) {
      SyntaxAnnotation annotation = AnnotationFromJson(doc);
      std::string key = annotation.paragraph;
      annotations_[key] = std::move(annotation);
    }
  } catch (const ParseError &e) {
    throw ParseError(e.field(), (origin.empty() ? "" : origin + ": ") +
                                    std::string(e.what()));
  } catch (const json::exception &e) {
    throw ParseError("", (origin.empty() ? "" : origin + ": ") + e.what());
  }
}

void FixtureBackend::AddFile(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot read fixture " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error &e) {
    throw ParseError("", path.string() + ": " + e.what());
  }
  if (doc.is_array()) {
    for (const json &item : doc) AddDocument(item, path.string());
  } else {
    AddDocument(doc, path.string());
  }
}

void FixtureBackend::AddDirectory(const std::filesystem::path &dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw LoadError("fixture directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto &entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string name = entry.path().filename().string();
    if (name == "fixture.json" ||
        (name.size() > 13 && name.ends_with(".fixture.json"))) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const fs::path &file : files) AddFile(file);
}

SyntaxAnnotation FixtureBackend::DoAnnotate(std::string_view paragraph) {
  std::shared_lock lock(mu_);
  auto it = annotations_.find(paragraph);
  if (it == annotations_.end()) {
    throw BackendError("fixture backend has no annotation for paragraph \"" +
                       std::string(paragraph.substr(0, 60)) + "\"");
  }
  return it->second;
}

EmbeddingVector FixtureBackend::DoEmbed(std::string_view text) {
  std::shared_lock lock(mu_);
  auto it = embeddings_.find(text);
  if (it != embeddings_.end()) return {it->second};
  if (!hash_fallback_) {
    throw BackendError("fixture backend has no embedding for \"" + std::string(text) + "\"");
  }
  return HashedEmbedding(text);
}

EmbeddingVector FixtureBackend::HashedEmbedding(std::string_view text) const {
  std::vector<std::string> words = WordTokens(text);
  if (words.empty()) words.push_back(std::string(text));
  EmbeddingVector out{std::vector<double>(dim_, 0.0)};
  for (const std::string &word : words) {
    uint64_t state = Fnv1a(word);
    for (size_t i = 0; i < dim_; ++i) {
      // Uniform in [-1, 1).
      double u = static_cast<double>(SplitMix64(state) >> 11) * 0x1.0p-53;
      out.components[i] += 2.0 * u - 1.0;
    }
  }
  return out;
}

EmbeddingVector EmbeddingCache::Get(std::string_view text) {
  std::string key(text);
  {
    std::shared_lock lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  EmbeddingVector vector = backend_.Embed(text);
  std::unique_lock lock(mu_);
  return cache_.emplace(std::move(key), std::move(vector)).first->second;
}

}  // namespace chartlink
