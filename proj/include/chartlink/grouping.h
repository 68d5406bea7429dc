#ifndef CHARTLINK_GROUPING_H_
#define CHARTLINK_GROUPING_H_

#include <set>
#include <string>
#include <vector>

#include "chartlink/encoding.h"
#include "chartlink/matching.h"
#include "chartlink/nlp.h"

namespace chartlink {

struct GroupedLink {
  std::string id;
  std::vector<std::string> member_link_ids;  // in phrase order
  CharSpan span;                             // span of the selected node
  std::set<ChannelName> channels;

  bool operator==(const GroupedLink &) const = default;
};

struct TransferResult {
  std::vector<IndividualLink> links;
  std::vector<std::string> warnings;
};

// Sets every link's channel from the channel owning its element; elements
// owned by no channel (chart titles) yield no channel.
TransferResult TransferChannels(std::vector<IndividualLink> links,
                                const VisualEncoding &encoding);

// A node chosen to form a group, with the links whose phrases it covers.
struct NodeSelection {
  const ConstituencyNode *node = nullptr;
  std::vector<size_t> members;  // indices into the link list
};

// Top-down node selection over one constituency tree. `phrases` are the
// spans of channel-carrying links and `channels` their channels. A node is
// selected when it covers an unclaimed link and none of its descendants
// covers as many distinct channels of unclaimed links; its links are then
// claimed. Nodes directly holding links that straddle child boundaries are
// selected as soon as they are reached.
std::vector<NodeSelection> SelectGroupNodes(const ConstituencyNode &root,
                                            const std::vector<CharSpan> &phrases,
                                            const std::vector<ChannelName> &channels);

// Groups the non-removed links of every sentence. Links without a channel
// join the group whose node contains them (the smallest such node), else
// form singleton groups. Output is ordered by span; ids are "g-<start>-<end>".
std::vector<GroupedLink> FindGroups(const SyntaxAnnotation &annotation,
                                    const std::vector<IndividualLink> &links);

}  // namespace chartlink

#endif  // CHARTLINK_GROUPING_H_
