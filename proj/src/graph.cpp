#include "ownet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace ownet {

const char* to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::Firm: return "firm";
        case NodeKind::InvestorPrivate: return "investor-private";
        case NodeKind::InvestorState: return "investor-state";
        case NodeKind::InvestorMunicipal: return "investor-municipal";
        case NodeKind::FloatSynthetic: return "float-synthetic";
    }
    return "firm";
}

std::optional<NodeKind> parse_node_kind(std::string_view text) {
    if (text == "firm") return NodeKind::Firm;
    if (text == "investor-private") return NodeKind::InvestorPrivate;
    if (text == "investor-state") return NodeKind::InvestorState;
    if (text == "investor-municipal") return NodeKind::InvestorMunicipal;
    if (text == "float-synthetic") return NodeKind::FloatSynthetic;
    return std::nullopt;
}

OwnershipGraph OwnershipGraph::build(int year,
                                     std::vector<NodeRecord> nodes,
                                     std::vector<OwnershipEdge> edges,
                                     std::vector<std::string>* warnings) {
    OwnershipGraph g;
    g.year_ = year;

    for (const auto& n : nodes) {
        if (n.id.empty()) {
            throw InputError("node with empty id");
        }
    }
    std::sort(nodes.begin(), nodes.end(),
              [](const NodeRecord& a, const NodeRecord& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        if (nodes[i].id == nodes[i - 1].id) {
            throw InputError("duplicate node id: " + nodes[i].id);
        }
    }
    g.nodes_ = std::move(nodes);

    std::unordered_map<std::string_view, std::uint32_t> index;
    index.reserve(g.nodes_.size());
    for (std::uint32_t i = 0; i < g.nodes_.size(); ++i) {
        index.emplace(g.nodes_[i].id, i);
    }

    // Merge duplicate (holder, held) rows; drop self-holdings.
    std::unordered_map<std::uint64_t, double> merged;
    merged.reserve(edges.size());
    for (const auto& e : edges) {
        if (e.holder == e.held) {
            if (warnings) {
                warnings->push_back("self-holding dropped: " + e.holder + " -> " +
                                    e.held);
            }
            continue;
        }
        auto hit = index.find(e.holder);
        if (hit == index.end()) {
            throw InputError("edge references unknown node: " + e.holder);
        }
        auto tit = index.find(e.held);
        if (tit == index.end()) {
            throw InputError("edge references unknown node: " + e.held);
        }
        if (!(e.fraction > 0.0) || !std::isfinite(e.fraction)) {
            throw InputError("edge " + e.holder + " -> " + e.held +
                             " has non-positive fraction");
        }
        std::uint64_t key =
            (static_cast<std::uint64_t>(hit->second) << 32) | tit->second;
        merged[key] += e.fraction;
    }

    g.in_.assign(g.nodes_.size(), {});
    g.out_.assign(g.nodes_.size(), {});
    for (const auto& [key, fraction] : merged) {
        auto holder = static_cast<std::uint32_t>(key >> 32);
        auto held = static_cast<std::uint32_t>(key & 0xFFFFFFFFu);
        g.out_[holder].push_back({held, fraction});
        g.in_[held].push_back({holder, fraction});
    }
    g.edge_count_ = merged.size();

    auto by_node = [](const Holding& a, const Holding& b) { return a.node < b.node; };
    for (auto& v : g.in_) std::sort(v.begin(), v.end(), by_node);
    for (auto& v : g.out_) std::sort(v.begin(), v.end(), by_node);

    for (std::uint32_t j = 0; j < g.nodes_.size(); ++j) {
        double sum = g.incoming_sum(j);
        if (sum > 1.0 + 1e-6) {
            throw InputError("over-subscribed node " + g.nodes_[j].id +
                             ": incoming fractions sum to " + std::to_string(sum));
        }
    }
    return g;
}

std::optional<std::uint32_t> OwnershipGraph::find(const NodeId& id) const {
    auto it = std::lower_bound(
        nodes_.begin(), nodes_.end(), id,
        [](const NodeRecord& n, const NodeId& target) { return n.id < target; });
    if (it == nodes_.end() || it->id != id) return std::nullopt;
    return static_cast<std::uint32_t>(it - nodes_.begin());
}

std::uint32_t OwnershipGraph::require(const NodeId& id) const {
    auto idx = find(id);
    if (!idx) throw InputError("unknown node: " + id);
    return *idx;
}

double OwnershipGraph::incoming_sum(std::uint32_t index) const {
    double sum = 0.0;
    for (const auto& h : in_[index]) sum += h.fraction;
    return sum;
}

std::vector<OwnershipEdge> OwnershipGraph::edges() const {
    std::vector<OwnershipEdge> result;
    result.reserve(edge_count_);
    for (std::uint32_t holder = 0; holder < nodes_.size(); ++holder) {
        for (const auto& h : out_[holder]) {
            result.push_back({nodes_[holder].id, nodes_[h.node].id, h.fraction});
        }
    }
    return result;
}

void validate_sector(const OwnershipGraph& graph, const SectorSpec& spec) {
    if (spec.firms.empty()) {
        throw InputError("sector specification lists no firms");
    }
    for (const auto& id : spec.firms) {
        auto idx = graph.find(id);
        if (!idx) {
            throw InputError("sector firm not present in graph: " + id);
        }
        if (graph.node(*idx).kind != NodeKind::Firm) {
            throw InputError("sector firm " + id + " has kind " +
                             to_string(graph.node(*idx).kind) + ", expected firm");
        }
    }
}

namespace {

// Union-find over node indices, for weak components.
class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }
    std::uint32_t root(std::uint32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::uint32_t a, std::uint32_t b) { parent_[root(a)] = root(b); }

private:
    std::vector<std::uint32_t> parent_;
};

} // namespace

GraphStats graph_stats(const OwnershipGraph& graph) {
    GraphStats s;
    s.nodes = graph.node_count();
    s.edges = graph.edge_count();
    if (s.nodes == 0) return s;

    auto n = static_cast<double>(s.nodes);
    if (s.nodes >= 2) {
        s.density = static_cast<double>(s.edges) / (n * (n - 1.0));
    }
    s.avg_degree = 2.0 * static_cast<double>(s.edges) / n;

    UnionFind uf(s.nodes);
    std::size_t min_deg = std::numeric_limits<std::size_t>::max();
    std::size_t max_deg = 0;
    for (std::uint32_t i = 0; i < s.nodes; ++i) {
        std::size_t deg = graph.holders_of(i).size() + graph.holdings_of(i).size();
        min_deg = std::min(min_deg, deg);
        max_deg = std::max(max_deg, deg);
        for (const auto& h : graph.holdings_of(i)) uf.unite(i, h.node);
    }
    s.min_degree = min_deg;
    s.max_degree = max_deg;

    for (std::uint32_t i = 0; i < s.nodes; ++i) {
        if (uf.root(i) == i) ++s.components;
    }
    return s;
}

} // namespace ownet
