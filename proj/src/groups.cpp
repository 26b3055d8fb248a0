#include "ownet/groups.hpp"

#include <algorithm>

namespace ownet {

namespace {

// BFS over either holders (ancestors) or holdings (descendants) of `start`,
// excluding `start` itself from the result mask.
std::vector<char> reach(const OwnershipGraph& graph, std::uint32_t start,
                        bool upstream) {
    std::vector<char> seen(graph.node_count(), 0);
    std::vector<std::uint32_t> queue{start};
    std::vector<char> out(graph.node_count(), 0);
    seen[start] = 1;
    while (!queue.empty()) {
        std::uint32_t v = queue.back();
        queue.pop_back();
        auto span = upstream ? graph.holders_of(v) : graph.holdings_of(v);
        for (const auto& h : span) {
            if (!seen[h.node]) {
                seen[h.node] = 1;
                out[h.node] = 1;
                queue.push_back(h.node);
            }
        }
    }
    return out;
}

} // namespace

GroupReport dominant_group(const OwnershipGraph& graph, const NodeId& target) {
    auto target_idx = graph.find(target);
    if (!target_idx) {
        throw InputError("unknown target: " + target);
    }
    auto shareholders = graph.holders_of(*target_idx);
    if (shareholders.empty()) {
        throw InputError("target " + target + " has no direct shareholders");
    }

    GroupReport report;
    report.target = target;

    // Candidate leaders: in-degree-zero ancestors of the target.
    auto ancestor = reach(graph, *target_idx, /*upstream=*/true);
    std::vector<std::uint32_t> leaders;
    for (std::uint32_t v = 0; v < graph.node_count(); ++v) {
        if (ancestor[v] && graph.holders_of(v).empty()) leaders.push_back(v);
    }
    if (leaders.empty()) {
        return report; // no-leader result: target sits inside a source-less cycle
    }

    bool have_best = false;
    std::uint32_t best_leader = 0;
    std::vector<std::uint32_t> best_members;
    double best_share = 0.0;

    for (std::uint32_t leader : leaders) { // ascending index = ascending id
        auto group = reach(graph, leader, /*upstream=*/false);
        group[leader] = 1; // the leader belongs to its own chain

        std::vector<std::uint32_t> members;
        double share = 0.0;
        for (const auto& h : shareholders) { // sorted by holder index
            if (group[h.node]) {
                members.push_back(h.node);
                share += h.fraction;
            }
        }
        bool better =
            !have_best || members.size() > best_members.size() ||
            (members.size() == best_members.size() && share > best_share);
        if (better) {
            have_best = true;
            best_leader = leader;
            best_members = std::move(members);
            best_share = share;
        }
    }

    report.leader = graph.node(best_leader).id;
    for (std::uint32_t m : best_members) report.members.push_back(graph.node(m).id);
    report.count = report.members.size();
    report.aggregated_share = best_share;
    return report;
}

std::vector<GroupScanEntry> group_scan(const OwnershipGraph& graph,
                                       const std::vector<NodeId>& targets) {
    std::vector<GroupScanEntry> entries;
    entries.reserve(targets.size());
    for (const auto& target : targets) {
        GroupScanEntry entry;
        entry.target = target;
        try {
            entry.report = dominant_group(graph, target);
        } catch (const Error& e) {
            entry.error = e.what();
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

} // namespace ownet
