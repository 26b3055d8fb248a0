#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ownet/errors.hpp"

namespace ownet {

// Node identifiers are opaque strings; all deterministic tie-breaking in the
// toolkit is case-sensitive lexicographic comparison on them.
using NodeId = std::string;

enum class NodeKind {
    Firm,
    InvestorPrivate,
    InvestorState,
    InvestorMunicipal,
    FloatSynthetic, // created by imputation only, never read from registry files
};

const char* to_string(NodeKind kind);

// Parses the five canonical labels. Returns nullopt for anything else.
std::optional<NodeKind> parse_node_kind(std::string_view text);

struct NodeRecord {
    NodeId id;
    std::string name;
    NodeKind kind = NodeKind::Firm;
    std::string country = "unknown"; // ISO-3166 alpha-2 or "unknown"
};

struct OwnershipEdge {
    NodeId holder;
    NodeId held;
    double fraction = 0.0; // equity share in (0, 1], 1.0 = 100%
};

// One (counterpart, fraction) entry of a node's adjacency. Node indices are
// the lexicographic rank of the id, so index order equals id order.
struct Holding {
    std::uint32_t node = 0;
    double fraction = 0.0;
};

// Immutable directed ownership snapshot. Edge holder->held carries the equity
// fraction the holder owns in the held entity. Safe to share across threads
// after construction.
class OwnershipGraph {
public:
    // Validates and normalizes raw records:
    //   - node ids must be non-empty and unique, kinds canonical
    //   - self-loop edges are dropped (warning appended if `warnings` given)
    //   - duplicate (holder, held) rows are summed into one edge
    //   - edge endpoints must exist (referential-integrity error otherwise)
    //   - any node whose incoming fractions sum above 1 + 1e-6 is rejected
    static OwnershipGraph build(int year,
                                std::vector<NodeRecord> nodes,
                                std::vector<OwnershipEdge> edges,
                                std::vector<std::string>* warnings = nullptr);

    int year() const { return year_; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edge_count_; }

    // Nodes in lexicographic id order; the position of a record is its index.
    const std::vector<NodeRecord>& nodes() const { return nodes_; }
    const NodeRecord& node(std::uint32_t index) const { return nodes_[index]; }

    std::optional<std::uint32_t> find(const NodeId& id) const;
    bool contains(const NodeId& id) const { return find(id).has_value(); }

    // Index of `id`, or InputError naming it.
    std::uint32_t require(const NodeId& id) const;

    // Holders of node `index` (incoming edges), sorted by holder index.
    std::span<const Holding> holders_of(std::uint32_t index) const {
        return in_[index];
    }
    // Holdings of node `index` (outgoing edges), sorted by held index.
    std::span<const Holding> holdings_of(std::uint32_t index) const {
        return out_[index];
    }

    double incoming_sum(std::uint32_t index) const;

    // Edges sorted by (holder id, held id); rebuilt from the adjacency.
    std::vector<OwnershipEdge> edges() const;

private:
    OwnershipGraph() = default;

    int year_ = 0;
    std::size_t edge_count_ = 0;
    std::vector<NodeRecord> nodes_;
    std::vector<std::vector<Holding>> in_;
    std::vector<std::vector<Holding>> out_;
};

// The set V of sector firms plus the size variable used for weighting.
struct SectorSpec {
    std::vector<NodeId> firms;               // ordered; defines summation order
    std::map<NodeId, double> size_values;    // firm -> v_j >= 0
    std::string size_variable_name;
};

// Checks that every sector firm exists in the graph with kind Firm.
void validate_sector(const OwnershipGraph& graph, const SectorSpec& spec);

struct GraphStats {
    std::size_t nodes = 0;
    std::size_t edges = 0;
    double density = 0.0;       // E / (N * (N - 1)) for N >= 2, else 0
    std::size_t components = 0; // weakly connected
    std::size_t min_degree = 0; // total degree = in + out
    std::size_t max_degree = 0;
    double avg_degree = 0.0;    // 2E / N
};

GraphStats graph_stats(const OwnershipGraph& graph);

} // namespace ownet
