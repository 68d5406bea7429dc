#include "chartlink/grouping.h"

#include <algorithm>
#include <map>
#include <numeric>

namespace chartlink {

namespace {

class Selector {
 public:
  Selector(const std::vector<CharSpan> &phrases, const std::vector<ChannelName> &channels)
      : phrases_(phrases), channels_(channels), claimed_(phrases.size(), false) {}

  void Visit(const ConstituencyNode &node) {
    std::vector<size_t> covered = Covered(node);
    if (covered.empty()) return;
    size_t variety = Variety(covered);

    bool straddles = std::any_of(covered.begin(), covered.end(), [&](size_t i) {
      return std::none_of(node.children.begin(), node.children.end(),
                          [&](const ConstituencyNode &c) { return c.span.contains(phrases_[i]); });
    });
    bool deeper = !straddles && std::any_of(node.children.begin(), node.children.end(),
                                            [&](const ConstituencyNode &c) {
                                              return Variety(Covered(c)) == variety;
                                            });
    if (!deeper) {
      for (size_t i : covered) claimed_[i] = true;
      selections_.push_back({&node, std::move(covered)});
      return;
    }
    for (const ConstituencyNode &child : node.children) Visit(child);
  }

  std::vector<NodeSelection> Take() { return std::move(selections_); }

 private:
  std::vector<size_t> Covered(const ConstituencyNode &node) const {
    std::vector<size_t> out;
    for (size_t i = 0; i < phrases_.size(); ++i) {
      if (!claimed_[i] && node.span.contains(phrases_[i])) out.push_back(i);
    }
    return out;
  }

  size_t Variety(const std::vector<size_t> &members) const {
    std::set<ChannelName> distinct;
    for (size_t i : members) distinct.insert(channels_[i]);
    return distinct.size();
  }

  const std::vector<CharSpan> &phrases_;
  const std::vector<ChannelName> &channels_;
  std::vector<bool> claimed_;
  std::vector<NodeSelection> selections_;
};

// Smallest node of the tree containing `span`.
const ConstituencyNode *SmallestContaining(const ConstituencyNode &node, const CharSpan &span) {
  if (!node.span.contains(span)) return nullptr;
  for (const ConstituencyNode &child : node.children) {
    if (const ConstituencyNode *found = SmallestContaining(child, span)) return found;
  }
  return &node;
}

struct Draft {
  CharSpan span;
  std::vector<size_t> members;
};

}  // namespace

TransferResult TransferChannels(std::vector<IndividualLink> links,
                                const VisualEncoding &encoding) {
  TransferResult result;
  for (IndividualLink &link : links) {
    const TextualElement *element = encoding.element(link.element_id);
    link.channel = encoding.OwningChannel(link.element_id);
    if (!element) {
      result.warnings.push_back("link " + link.id + " references unknown element '" +
                                link.element_id + "'");
    } else if (!link.channel && element->role != TextRole::kChartTitle) {
      result.warnings.push_back("element '" + link.element_id + "' belongs to no channel");
    }
  }
  result.links = std::move(links);
  return result;
}

std::vector<NodeSelection> SelectGroupNodes(const ConstituencyNode &root,
                                            const std::vector<CharSpan> &phrases,
                                            const std::vector<ChannelName> &channels) {
  Selector selector(phrases, channels);
  selector.Visit(root);
  return selector.Take();
}

std::vector<GroupedLink> FindGroups(const SyntaxAnnotation &annotation,
                                    const std::vector<IndividualLink> &links) {
  std::vector<size_t> live;
  for (size_t i = 0; i < links.size(); ++i) {
    if (links[i].status != LinkStatus::kRemoved) live.push_back(i);
  }

  std::vector<Draft> drafts;
  std::vector<bool> placed(links.size(), false);
  for (size_t s = 0; s < annotation.sentences.size(); ++s) {
    const Sentence &sentence = annotation.sentences[s];
    std::vector<size_t> with_channel, without_channel;
    for (size_t i : live) {
      if (!sentence.span.contains(links[i].phrase.span)) continue;
      (links[i].channel ? with_channel : without_channel).push_back(i);
    }

    std::vector<CharSpan> phrases;
    std::vector<ChannelName> channels;
    for (size_t i : with_channel) {
      phrases.push_back(links[i].phrase.span);
      channels.push_back(*links[i].channel);
    }
    size_t first = drafts.size();
    for (NodeSelection &selection : SelectGroupNodes(sentence.root, phrases, channels)) {
      Draft draft{selection.node->span, {}};
      for (size_t m : selection.members) {
        draft.members.push_back(with_channel[m]);
        placed[with_channel[m]] = true;
      }
      drafts.push_back(std::move(draft));
    }

    for (size_t i : without_channel) {
      const CharSpan &span = links[i].phrase.span;
      Draft *host = nullptr;
      for (size_t d = first; d < drafts.size(); ++d) {
        if (drafts[d].span.contains(span) &&
            (!host || drafts[d].span.length() < host->span.length())) {
          host = &drafts[d];
        }
      }
      if (host) {
        host->members.push_back(i);
      } else {
        const ConstituencyNode *node = SmallestContaining(sentence.root, span);
        drafts.push_back({node ? node->span : span, {i}});
      }
      placed[i] = true;
    }
  }
  // Links outside every sentence stay on their own.
  for (size_t i : live) {
    if (!placed[i]) drafts.push_back({links[i].phrase.span, {i}});
  }

  std::stable_sort(drafts.begin(), drafts.end(), [&](const Draft &a, const Draft &b) {
    if (a.span != b.span) return a.span < b.span;
    return links[a.members.front()].phrase.span < links[b.members.front()].phrase.span;
  });

  std::vector<GroupedLink> groups;
  std::map<std::string, int> id_uses;
  for (Draft &draft : drafts) {
    std::sort(draft.members.begin(), draft.members.end(), [&](size_t a, size_t b) {
      if (links[a].phrase.span != links[b].phrase.span) {
        return links[a].phrase.span < links[b].phrase.span;
      }
      return links[a].element_id < links[b].element_id;
    });
    GroupedLink group;
    group.id = "g-" + std::to_string(draft.span.start) + "-" + std::to_string(draft.span.end);
    if (int uses = ++id_uses[group.id]; uses > 1) group.id += "-" + std::to_string(uses);
    group.span = draft.span;
    for (size_t m : draft.members) {
      group.member_link_ids.push_back(links[m].id);
      if (links[m].channel) group.channels.insert(*links[m].channel);
    }
    groups.push_back(std::move(group));
  }
  return groups;
}

}  // namespace chartlink
