#ifndef CHARTLINK_TESTS_ORACLES_GROUPING_ORACLE_H_
#define CHARTLINK_TESTS_ORACLES_GROUPING_ORACLE_H_

#include <algorithm>
#include <functional>
#include <random>
#include <set>
#include <tuple>
#include <vector>

#include "chartlink/grouping.h"

namespace chartlink::testing {

// Random tree over `leaves` one-character tokens at offsets 0, 2, 4, ...
inline ConstituencyNode RandomTree(std::mt19937 &rng, int first, int count, int depth) {
  ConstituencyNode node;
  node.label = "X";
  node.level = depth;
  if (count == 1 && (depth > 0 && std::uniform_int_distribution<int>(0, 3)(rng) > 0)) {
    node.span = {2 * first, 2 * first + 1};
    return node;
  }
  int parts = count == 1 ? 1 : std::uniform_int_distribution<int>(1, std::min(count, 4))(rng);
  std::vector<int> cuts;
  for (int i = 1; i < count; ++i) cuts.push_back(i);
  std::shuffle(cuts.begin(), cuts.end(), rng);
  cuts.resize(parts - 1);
  cuts.push_back(0);
  cuts.push_back(count);
  std::sort(cuts.begin(), cuts.end());
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    node.children.push_back(
        RandomTree(rng, first + cuts[i], cuts[i + 1] - cuts[i], depth + 1));
  }
  node.span = {node.children.front().span.start, node.children.back().span.end};
  return node;
}

// Exhaustive selection: repeatedly take the node with the most distinct
// channels among unclaimed links, then the deepest, then the fewest children,
// then the leftmost, skipping ancestors and descendants of earlier picks.
inline std::vector<std::pair<const ConstituencyNode *, std::vector<size_t>>> OracleSelect(
    const ConstituencyNode &root, const std::vector<CharSpan> &phrases,
    const std::vector<ChannelName> &channels) {
  struct Entry {
    const ConstituencyNode *node;
    int depth;
    std::vector<const ConstituencyNode *> ancestors;
  };
  std::vector<Entry> all;
  std::function<void(const ConstituencyNode &, int, std::vector<const ConstituencyNode *>)> walk =
      [&](const ConstituencyNode &n, int d, std::vector<const ConstituencyNode *> up) {
        all.push_back({&n, d, up});
        up.push_back(&n);
        for (const auto &c : n.children) walk(c, d + 1, up);
      };
  walk(root, 0, {});

  std::vector<bool> claimed(phrases.size(), false);
  std::vector<const Entry *> picked;
  std::vector<std::pair<const ConstituencyNode *, std::vector<size_t>>> out;
  auto related = [&](const Entry &a, const Entry &b) {
    if (a.node == b.node) return true;
    auto has = [](const Entry &e, const ConstituencyNode *n) {
      return std::find(e.ancestors.begin(), e.ancestors.end(), n) != e.ancestors.end();
    };
    return has(a, b.node) || has(b, a.node);
  };
  while (true) {
    const Entry *best = nullptr;
    std::tuple<int, int, int, int> best_key;
    std::vector<size_t> best_members;
    for (const Entry &e : all) {
      if (std::any_of(picked.begin(), picked.end(), [&](const Entry *p) { return related(*p, e); }))
        continue;
      std::vector<size_t> members;
      std::set<ChannelName> distinct;
      for (size_t i = 0; i < phrases.size(); ++i) {
        if (!claimed[i] && e.node->span.contains(phrases[i])) {
          members.push_back(i);
          distinct.insert(channels[i]);
        }
      }
      if (members.empty()) continue;
      std::tuple<int, int, int, int> key{static_cast<int>(distinct.size()), e.depth,
                                         -static_cast<int>(e.node->children.size()),
                                         -e.node->span.start};
      if (!best || key > best_key) {
        best = &e;
        best_key = key;
        best_members = members;
      }
    }
    if (!best) break;
    for (size_t i : best_members) claimed[i] = true;
    picked.push_back(best);
    out.push_back({best->node, best_members});
  }
  std::sort(out.begin(), out.end(), [](const auto &a, const auto &b) {
    return a.first->span < b.first->span;
  });
  return out;
}

// Random trees with random channel annotations; counts trials where
// SelectGroupNodes disagrees with OracleSelect.
inline int CountOracleMismatches(unsigned seed, int trials) {
  std::mt19937 rng(seed);
  const ChannelName kChannels[] = {ChannelName::kX, ChannelName::kY, ChannelName::kColor};
  int mismatches = 0;
  for (int trial = 0; trial < trials; ++trial) {
    int leaves = std::uniform_int_distribution<int>(1, 12)(rng);
    ConstituencyNode root = RandomTree(rng, 0, leaves, 0);
    std::vector<CharSpan> phrases;
    std::vector<ChannelName> channels;
    for (int i = 0; i < leaves; ++i) {
      if (std::uniform_int_distribution<int>(0, 2)(rng) == 0) continue;
      phrases.push_back({2 * i, 2 * i + 1});
      channels.push_back(kChannels[std::uniform_int_distribution<int>(0, 2)(rng)]);
    }
    auto expected = OracleSelect(root, phrases, channels);
    auto got = SelectGroupNodes(root, phrases, channels);
    std::sort(got.begin(), got.end(), [](const NodeSelection &a, const NodeSelection &b) {
      return a.node->span < b.node->span;
    });
    bool same = got.size() == expected.size();
    for (size_t g = 0; same && g < got.size(); ++g) {
      std::vector<size_t> members = got[g].members;
      std::sort(members.begin(), members.end());
      same = got[g].node == expected[g].first && members == expected[g].second;
    }
    if (!same) ++mismatches;
  }
  return mismatches;
}

}  // namespace chartlink::testing

#endif  // CHARTLINK_TESTS_ORACLES_GROUPING_ORACLE_H_
