#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ownet/graph.hpp"

namespace ownet {

// The corporate group whose entities control the largest number of the
// target's direct shareholders. `leader` is empty when the target has no
// in-degree-zero ancestor (it sits inside a source-less cycle); that outcome
// is reported explicitly instead of raising.
struct GroupReport {
    NodeId target;
    std::optional<NodeId> leader;
    std::vector<NodeId> members; // direct shareholders in the leader's chain
    std::size_t count = 0;       // |members|
    double aggregated_share = 0.0; // sum of members' fractions in the target
};

// Candidate leaders are in-degree-zero ancestors of the target; each leader's
// group is itself plus all of its descendants; members are the group's
// intersection with the target's direct shareholders. Winner: largest count,
// then largest aggregated share, then lexicographically smallest leader id.
// Raises InputError if the target is missing or has no shareholders.
GroupReport dominant_group(const OwnershipGraph& graph, const NodeId& target);

// One entry per requested target; failures are collected, not propagated.
struct GroupScanEntry {
    NodeId target;
    std::optional<GroupReport> report;
    std::string error; // empty on success
};

std::vector<GroupScanEntry> group_scan(const OwnershipGraph& graph,
                                       const std::vector<NodeId>& targets);

} // namespace ownet
