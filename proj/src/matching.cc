#include "chartlink/matching.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "chartlink/numbers.h"

namespace chartlink {

namespace {

using PairKey = std::pair<CharSpan, std::string>;

void CollectNodes(const ConstituencyNode &node, const Sentence &sentence, int sentence_index,
                  int max_tokens, const SyntaxAnnotation &annotation,
                  std::map<CharSpan, Phrase> &out) {
  int tokens = static_cast<int>(TokensInSpan(sentence, node.span).size());
  if (tokens <= max_tokens && !out.count(node.span)) {
    out[node.span] = Phrase{node.span, std::string(annotation.Slice(node.span)),
                            sentence_index, node.label};
  }
  for (const ConstituencyNode &child : node.children) {
    CollectNodes(child, sentence, sentence_index, max_tokens, annotation, out);
  }
}

// Phrases made of a single function word ("the", "of", ",").
bool IsFunctionWord(const SyntaxAnnotation &annotation, const Phrase &phrase) {
  const Sentence &sentence = annotation.sentences[phrase.sentence_index];
  std::vector<int> tokens = TokensInSpan(sentence, phrase.span);
  return tokens.size() == 1 && IsFunctionTag(sentence.tokens[tokens[0]].pos);
}

bool IsNumberOnly(const std::vector<std::string> &words) {
  return std::all_of(words.begin(), words.end(), [](const std::string &w) {
    return std::all_of(w.begin(), w.end(), [](char c) { return c >= '0' && c <= '9'; });
  });
}

IndividualLink MakeLink(const Phrase &phrase, const TextualElement &element,
                        const VisualEncoding &encoding, MatchOperator op, double score) {
  IndividualLink link;
  link.id = MakeLinkId(phrase.span, element.id);
  link.phrase = phrase;
  link.element_id = element.id;
  link.channel = encoding.OwningChannel(element.id);
  link.provenance = {op, score};
  return link;
}

// Comparison operators over arbitrary text, shared by the matching
// operators, noun attachment and title mention search.
class Comparator {
 public:
  explicit Comparator(const MatchContext &context) : context_(context) {
    const auto &elements = context.encoding.elements();
    for (TextRole role : {TextRole::kXAxisTitle, TextRole::kXAxisLabel, TextRole::kYAxisTitle,
                          TextRole::kYAxisLabel, TextRole::kLegendTitle,
                          TextRole::kLegendLabel, TextRole::kChartTitle}) {
      for (auto &[id, words] : UniqueWords(elements, role)) unique_[id] = std::move(words);
    }
  }

  bool Direct(std::string_view text, const TextualElement &element) const {
    std::string a = NormalizeText(text);
    return !a.empty() && a == NormalizeText(element.text);
  }

  // `text`'s words form a contiguous run of the element's words that are
  // all unique to the element within its role.
  bool Unique(std::string_view text, const TextualElement &element) const {
    std::vector<std::string> words = WordTokens(text);
    if (words.empty() || IsNumberOnly(words)) return false;
    auto it = unique_.find(element.id);
    if (it == unique_.end()) return false;
    const std::set<std::string> &unique = it->second;
    for (const std::string &w : words) {
      if (!unique.count(w)) return false;
    }
    std::vector<std::string> element_words = WordTokens(element.text);
    return std::search(element_words.begin(), element_words.end(), words.begin(),
                       words.end()) != element_words.end();
  }

  std::optional<double> Semantic(std::string_view text, const TextualElement &element) const {
    if (!context_.embeddings || !context_.options.enable_semantic) return std::nullopt;
    if (WordTokens(text).empty() || WordTokens(element.text).empty()) return std::nullopt;
    double similarity = AngularSimilarity(context_.embeddings->Get(text),
                                          context_.embeddings->Get(element.text));
    if (similarity >= context_.options.semantic_threshold) return similarity;
    return std::nullopt;
  }

  bool Any(std::string_view text, const TextualElement &element) const {
    return Direct(text, element) || Unique(text, element) || Semantic(text, element);
  }

 private:
  const MatchContext &context_;
  std::map<std::string, std::set<std::string>> unique_;
};

std::set<PairKey> LinkedPairs(std::span<const IndividualLink> links) {
  std::set<PairKey> out;
  for (const IndividualLink &link : links) {
    if (link.status != LinkStatus::kRemoved) out.insert({link.phrase.span, link.element_id});
  }
  return out;
}

const Channel *AxisChannel(const VisualEncoding &encoding, ChannelName name) {
  if (name == ChannelName::kColor) return nullptr;
  return encoding.channel(name);
}

std::optional<double> EntityValue(const SyntaxAnnotation &annotation,
                                  const EntityMention &entity) {
  if (auto parsed = ParseQuantity(annotation.Slice(entity.span))) return parsed;
  return entity.normalized_value;
}

bool HasNumberToken(const Sentence &sentence, const CharSpan &span) {
  for (int index : TokensInSpan(sentence, span)) {
    if (IsNumTag(sentence.tokens[index].pos)) return true;
  }
  return false;
}

// Noun tokens related to the number whose span head is `head`.
std::vector<int> AttachedNouns(const Sentence &sentence, const CharSpan &entity_span,
                               int head) {
  const std::vector<Token> &tokens = sentence.tokens;
  auto outside = [&](int index) { return !entity_span.overlaps(tokens[index].span); };
  std::vector<int> nouns;
  auto add = [&](int index) {
    if (outside(index) && std::find(nouns.begin(), nouns.end(), index) == nouns.end()) {
      nouns.push_back(index);
    }
  };
  const Token &number = tokens[head];
  const Token *governor = number.is_root() ? nullptr : &tokens[number.head];

  // 1. The number modifies a noun directly ("96.23% accuracy").
  if (governor && IsNounTag(governor->pos)) add(governor->index);

  // 2. A noun governs the number through a preposition ("accuracy of 27%").
  if (governor && IsAdpositionTag(governor->pos) && !governor->is_root()) {
    const Token &above = tokens[governor->head];
    if (IsNounTag(above.pos)) add(above.index);
  }

  // 3. The number attaches (possibly through a preposition) to a verb whose
  //    subject is the noun ("accuracy rises to 27%").
  const Token *verb = nullptr;
  if (governor && IsVerbTag(governor->pos)) {
    verb = governor;
  } else if (governor && IsAdpositionTag(governor->pos) && !governor->is_root() &&
             IsVerbTag(tokens[governor->head].pos)) {
    verb = &tokens[governor->head];
  }
  if (verb) {
    for (const Token &t : tokens) {
      if (t.head == verb->index && !t.is_root() && t.dep.starts_with("nsubj") &&
          IsNounTag(t.pos)) {
        add(t.index);
      }
    }
  }

  // 4. The number governs a noun through a preposition ("27% of teens").
  for (const Token &prep : tokens) {
    if (prep.is_root() || prep.head != head || !IsAdpositionTag(prep.pos)) continue;
    for (const Token &object : tokens) {
      if (!object.is_root() && object.head == prep.index && IsNounTag(object.pos)) {
        add(object.index);
      }
    }
  }
  return nouns;
}

// The noun alone and the noun with its contiguous left compound/adjective
// modifiers ("active agents", "Coverage PC").
std::vector<std::string> NounPhrases(const SyntaxAnnotation &annotation,
                                     const Sentence &sentence, int noun) {
  std::vector<std::string> out{sentence.tokens[noun].text};
  int left = noun;
  while (left > 0) {
    const Token &prev = sentence.tokens[left - 1];
    bool modifier = prev.head == noun || (prev.head >= left && prev.head <= noun);
    if (!modifier || prev.is_root()) break;
    if (!(prev.dep == "compound" || prev.dep == "amod" || prev.dep == "nn" ||
          IsNounTag(prev.pos))) {
      break;
    }
    --left;
  }
  if (left < noun) {
    CharSpan span{sentence.tokens[left].span.start, sentence.tokens[noun].span.end};
    out.emplace_back(annotation.Slice(span));
  }
  return out;
}

}  // namespace

std::string_view ToString(MatchOperator op) {
  switch (op) {
    case MatchOperator::kDirect: return "direct";
    case MatchOperator::kUniqueWord: return "unique-word";
    case MatchOperator::kSemantic: return "semantic";
    case MatchOperator::kNumerical: return "numerical";
  }
  return "";
}

std::optional<MatchOperator> ParseMatchOperator(std::string_view name) {
  if (name == "direct") return MatchOperator::kDirect;
  if (name == "unique-word") return MatchOperator::kUniqueWord;
  if (name == "semantic") return MatchOperator::kSemantic;
  if (name == "numerical") return MatchOperator::kNumerical;
  return std::nullopt;
}

std::string_view ToString(LinkStatus status) {
  switch (status) {
    case LinkStatus::kAuto: return "auto";
    case LinkStatus::kConfirmed: return "confirmed";
    case LinkStatus::kEdited: return "edited";
    case LinkStatus::kRemoved: return "removed";
  }
  return "";
}

std::optional<LinkStatus> ParseLinkStatus(std::string_view name) {
  if (name == "auto") return LinkStatus::kAuto;
  if (name == "confirmed") return LinkStatus::kConfirmed;
  if (name == "edited") return LinkStatus::kEdited;
  if (name == "removed") return LinkStatus::kRemoved;
  return std::nullopt;
}

std::string MakeLinkId(const CharSpan &span, const std::string &element_id) {
  return "l-" + std::to_string(span.start) + "-" + std::to_string(span.end) + "-" + element_id;
}

std::vector<Phrase> CandidatePhrases(const SyntaxAnnotation &annotation, int max_tokens) {
  std::map<CharSpan, Phrase> by_span;
  for (size_t s = 0; s < annotation.sentences.size(); ++s) {
    const Sentence &sentence = annotation.sentences[s];
    CollectNodes(sentence.root, sentence, static_cast<int>(s), max_tokens, annotation,
                 by_span);
  }
  std::vector<Phrase> out;
  for (auto &[span, phrase] : by_span) out.push_back(std::move(phrase));
  return out;
}

namespace {

// Phrases touching a numeric mention are left to the numerical operator.
bool TouchesEntity(const SyntaxAnnotation &annotation, const Phrase &phrase) {
  return std::any_of(annotation.entities.begin(), annotation.entities.end(),
                     [&](const EntityMention &e) { return e.span.overlaps(phrase.span); });
}

}  // namespace

std::vector<IndividualLink> MatchDirect(const MatchContext &context) {
  Comparator compare(context);
  std::set<PairKey> linked = LinkedPairs(context.existing);
  std::vector<IndividualLink> out;
  for (const Phrase &phrase : CandidatePhrases(context.annotation,
                                               context.options.max_phrase_tokens)) {
    if (TouchesEntity(context.annotation, phrase)) continue;
    for (const TextualElement &element : context.encoding.elements()) {
      if (linked.count({phrase.span, element.id})) continue;
      if (compare.Direct(phrase.text, element)) {
        out.push_back(MakeLink(phrase, element, context.encoding, MatchOperator::kDirect, 1.0));
      }
    }
  }
  return out;
}

std::map<std::string, std::set<std::string>> UniqueWords(
    std::span<const TextualElement> elements, TextRole role) {
  std::map<std::string, std::set<std::string>> words;
  for (const TextualElement &e : elements) {
    if (e.role != role) continue;
    std::vector<std::string> tokens = WordTokens(e.text);
    words[e.id] = std::set<std::string>(tokens.begin(), tokens.end());
  }
  if (words.size() < 2) return words;
  std::map<std::string, int> frequency;
  for (const auto &[id, set] : words) {
    for (const std::string &w : set) ++frequency[w];
  }
  for (auto &[id, set] : words) {
    std::erase_if(set, [&](const std::string &w) { return frequency[w] > 1; });
  }
  return words;
}

std::vector<IndividualLink> MatchUnique(const MatchContext &context) {
  Comparator compare(context);
  std::set<PairKey> linked = LinkedPairs(context.existing);
  std::vector<IndividualLink> out;
  for (const Phrase &phrase : CandidatePhrases(context.annotation,
                                               context.options.max_phrase_tokens)) {
    if (TouchesEntity(context.annotation, phrase)) continue;
    if (IsFunctionWord(context.annotation, phrase)) continue;
    for (const TextualElement &element : context.encoding.elements()) {
      if (linked.count({phrase.span, element.id})) continue;
      // Exact matches belong to the direct operator.
      if (compare.Direct(phrase.text, element)) continue;
      if (compare.Unique(phrase.text, element)) {
        out.push_back(
            MakeLink(phrase, element, context.encoding, MatchOperator::kUniqueWord, 1.0));
      }
    }
  }
  return out;
}

double AngularSimilarity(const EmbeddingVector &u, const EmbeddingVector &v) {
  if (u.dim() != v.dim()) throw PreconditionError("embedding dimensions differ");
  double nu = 0, nv = 0;
  for (size_t i = 0; i < u.dim(); ++i) {
    nu += u.components[i] * u.components[i];
    nv += v.components[i] * v.components[i];
  }
  if (nu == 0 || nv == 0) throw PreconditionError("angular similarity of a zero vector");
  nu = std::sqrt(nu);
  nv = std::sqrt(nv);
  // Angle as 2 atan2(|a - b|, |a + b|) over unit vectors, exact at 0 and pi.
  double diff = 0, sum = 0;
  for (size_t i = 0; i < u.dim(); ++i) {
    double a = u.components[i] / nu, b = v.components[i] / nv;
    diff += (a - b) * (a - b);
    sum += (a + b) * (a + b);
  }
  double angle = 2 * std::atan2(std::sqrt(diff), std::sqrt(sum));
  return 1.0 - angle / std::numbers::pi;
}

std::vector<IndividualLink> MatchSemantic(const MatchContext &context) {
  std::vector<IndividualLink> out;
  if (!context.embeddings || !context.options.enable_semantic) return out;
  std::set<PairKey> linked = LinkedPairs(context.existing);
  for (const Phrase &phrase : CandidatePhrases(context.annotation,
                                               context.options.max_phrase_tokens)) {
    if (TouchesEntity(context.annotation, phrase)) continue;
    if (IsFunctionWord(context.annotation, phrase)) continue;
    if (WordTokens(phrase.text).empty()) continue;
    EmbeddingVector pv = context.embeddings->Get(phrase.text);
    for (const TextualElement &element : context.encoding.elements()) {
      if (linked.count({phrase.span, element.id})) continue;
      if (WordTokens(element.text).empty()) continue;
      double similarity = AngularSimilarity(pv, context.embeddings->Get(element.text));
      if (similarity >= context.options.semantic_threshold) {
        out.push_back(MakeLink(phrase, element, context.encoding, MatchOperator::kSemantic,
                               similarity));
      }
    }
  }
  return out;
}

std::set<ChannelName> ResolveNounAttachment(const MatchContext &context,
                                            const EntityMention &entity,
                                            const std::set<ChannelName> &candidates) {
  const SyntaxAnnotation &annotation = context.annotation;
  auto sentence_index = annotation.SentenceOf(entity.span);
  if (!sentence_index) return {};
  const Sentence &sentence = annotation.sentences[*sentence_index];
  if (!HasNumberToken(sentence, entity.span)) return {};

  std::set<ChannelName> accepted;
  std::vector<const TextualElement *> titles;
  for (ChannelName axis : candidates) {
    const Channel *channel = AxisChannel(context.encoding, axis);
    if (!channel) continue;
    const TextualElement *title =
        channel->title_id ? context.encoding.element(*channel->title_id) : nullptr;
    if (title) {
      titles.push_back(title);
    } else {
      accepted.insert(axis);
    }
  }
  if (titles.empty()) return accepted;

  auto head = SpanHead(sentence, entity.span);
  if (!head) return accepted;
  Comparator compare(context);
  bool title_matched = false;
  for (int noun : AttachedNouns(sentence, entity.span, *head)) {
    for (const std::string &phrase : NounPhrases(annotation, sentence, noun)) {
      for (const TextualElement *title : titles) {
        if (compare.Any(phrase, *title)) title_matched = true;
      }
    }
  }
  if (title_matched) {
    for (ChannelName axis : candidates) {
      if (AxisChannel(context.encoding, axis)) accepted.insert(axis);
    }
  }
  return accepted;
}

ChannelName ResolveAxisAmbiguity(const MatchContext &context, const EntityMention &entity,
                                 const std::set<ChannelName> &candidates) {
  if (candidates.empty()) throw AmbiguityError("no candidate axis");
  if (candidates.size() == 1) return *candidates.begin();

  const SyntaxAnnotation &annotation = context.annotation;
  auto sentence_index = annotation.SentenceOf(entity.span);
  if (!sentence_index) throw AmbiguityError("entity lies outside every sentence");
  const Sentence &sentence = annotation.sentences[*sentence_index];
  auto head = SpanHead(sentence, entity.span);
  if (!head) throw AmbiguityError("entity covers no token");

  Comparator compare(context);
  std::vector<Phrase> phrases =
      CandidatePhrases(annotation, context.options.max_phrase_tokens);
  std::optional<ChannelName> best;
  int best_distance = 0;
  // std::set iterates x before y, so strict comparison keeps x on ties.
  for (ChannelName axis : candidates) {
    const Channel *channel = AxisChannel(context.encoding, axis);
    if (!channel || !channel->title_id) continue;
    const TextualElement *title = context.encoding.element(*channel->title_id);
    if (!title) continue;
    std::vector<CharSpan> mentions;
    for (const Phrase &phrase : phrases) {
      if (phrase.sentence_index != static_cast<int>(*sentence_index)) continue;
      if (phrase.span.overlaps(entity.span)) continue;
      if (IsFunctionWord(annotation, phrase)) continue;
      if (compare.Any(phrase.text, *title)) mentions.push_back(phrase.span);
    }
    std::optional<int> nearest;
    for (const CharSpan &span : mentions) {
      // Only the smallest phrases that mention the title count.
      bool minimal = std::none_of(mentions.begin(), mentions.end(), [&](const CharSpan &other) {
        return other != span && span.contains(other);
      });
      if (!minimal) continue;
      auto mention_head = SpanHead(sentence, span);
      if (!mention_head) continue;
      int distance = TokenDistance(sentence, *head, *mention_head);
      if (!nearest || distance < *nearest) nearest = distance;
    }
    if (nearest && (!best || *nearest < best_distance)) {
      best = axis;
      best_distance = *nearest;
    }
  }
  if (!best) {
    throw AmbiguityError("no axis title of the candidates is mentioned in the sentence");
  }
  return *best;
}

MatchResult MatchNumeric(const MatchContext &context) {
  const SyntaxAnnotation &annotation = context.annotation;
  const VisualEncoding &encoding = context.encoding;
  MatchResult result;
  std::set<PairKey> linked = LinkedPairs(context.existing);

  for (const EntityMention &entity : annotation.entities) {
    auto sentence_index = annotation.SentenceOf(entity.span);
    if (!sentence_index) continue;
    std::string text(annotation.Slice(entity.span));
    std::optional<double> value = EntityValue(annotation, entity);

    std::set<ChannelName> linear;
    std::map<ChannelName, const TextualElement *> dated;
    for (ChannelName axis : {ChannelName::kX, ChannelName::kY}) {
      const Channel *channel = encoding.channel(axis);
      if (!channel || !channel->scale) continue;
      if (channel->scale->kind() == ScaleKind::kLinear) {
        if (value && ValueInDomain(*channel->scale, *value)) linear.insert(axis);
      } else if (entity.type == EntityType::kDate) {
        auto year = YearToken(text);
        if (!year) continue;
        for (const std::string &id : channel->label_ids) {
          const TextualElement *label = encoding.element(id);
          if (label && YearToken(label->text) == year) {
            dated[axis] = label;
            break;
          }
        }
      }
    }
    if (linear.empty() && dated.empty()) continue;

    std::set<ChannelName> accepted = ResolveNounAttachment(context, entity, linear);
    for (const auto &[axis, label] : dated) accepted.insert(axis);
    if (accepted.empty()) continue;

    ChannelName axis;
    try {
      axis = ResolveAxisAmbiguity(context, entity, accepted);
    } catch (const AmbiguityError &e) {
      result.warnings.push_back("dropped numeric phrase '" + text + "': " + e.what());
      continue;
    }

    const TextualElement *target = nullptr;
    if (auto it = dated.find(axis); it != dated.end()) {
      target = it->second;
    } else {
      // The axis label closest in value stands for the position on the axis.
      const Channel *channel = encoding.channel(axis);
      double best = 0;
      for (const std::string &id : channel->label_ids) {
        const TextualElement *label = encoding.element(id);
        if (!label || !label->numeric_value) continue;
        double gap = std::fabs(*label->numeric_value - *value);
        if (!target || gap < best) {
          target = label;
          best = gap;
        }
      }
      if (!target && channel->title_id) target = encoding.element(*channel->title_id);
    }
    if (!target) {
      result.warnings.push_back("numeric phrase '" + text + "' fits the " +
                                std::string(ToString(axis)) +
                                " axis, which has no labels or title to link");
      continue;
    }
    if (linked.count({entity.span, target->id})) continue;
    Phrase phrase{entity.span, text, static_cast<int>(*sentence_index), std::nullopt};
    IndividualLink link = MakeLink(phrase, *target, encoding, MatchOperator::kNumerical, 1.0);
    link.channel = axis;
    result.links.push_back(std::move(link));
    linked.insert({entity.span, target->id});
  }
  return result;
}

MatchResult RunMatching(const MatchContext &context) {
  MatchResult result;
  std::vector<IndividualLink> pool(context.existing.begin(), context.existing.end());
  std::vector<IndividualLink> found;

  auto absorb = [&](std::vector<IndividualLink> links) {
    for (IndividualLink &link : links) {
      found.push_back(link);
      pool.push_back(std::move(link));
    }
  };
  auto stage_context = [&]() {
    MatchContext stage{context.annotation, context.encoding, context.embeddings,
                       context.options, pool};
    return stage;
  };

  absorb(MatchDirect(stage_context()));
  absorb(MatchUnique(stage_context()));
  absorb(MatchSemantic(stage_context()));
  MatchResult numeric = MatchNumeric(stage_context());
  absorb(std::move(numeric.links));
  result.warnings = std::move(numeric.warnings);

  // Overlap resolution per element: earliest operator, then shortest span.
  std::stable_sort(found.begin(), found.end(), [](const IndividualLink &a,
                                                  const IndividualLink &b) {
    if (a.provenance.op != b.provenance.op) return a.provenance.op < b.provenance.op;
    if (a.phrase.span.length() != b.phrase.span.length()) {
      return a.phrase.span.length() < b.phrase.span.length();
    }
    return a.phrase.span < b.phrase.span;
  });
  std::map<std::string, std::vector<CharSpan>> kept_spans;
  for (IndividualLink &link : found) {
    std::vector<CharSpan> &spans = kept_spans[link.element_id];
    bool overlaps = std::any_of(spans.begin(), spans.end(), [&](const CharSpan &s) {
      return s.overlaps(link.phrase.span);
    });
    if (overlaps) continue;
    spans.push_back(link.phrase.span);
    result.links.push_back(std::move(link));
  }
  std::sort(result.links.begin(), result.links.end(),
            [](const IndividualLink &a, const IndividualLink &b) {
              if (a.phrase.span != b.phrase.span) return a.phrase.span < b.phrase.span;
              return a.element_id < b.element_id;
            });
  return result;
}

}  // namespace chartlink
