#include "ownet/imputation.hpp"

#include <algorithm>
#include <cmath>

namespace ownet {

namespace {

constexpr double kMassTolerance = 1e-9;

NodeId float_node_id(const NodeId& firm, unsigned k) {
    return firm + "#float" + std::to_string(k);
}

bool is_private(NodeKind kind) { return kind == NodeKind::InvestorPrivate; }

bool is_investor(NodeKind kind) {
    return kind == NodeKind::InvestorPrivate || kind == NodeKind::InvestorState ||
           kind == NodeKind::InvestorMunicipal;
}

} // namespace

const char* to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::S1Renormalize: return "s1";
        case ScenarioKind::S2Ocean: return "s2";
        case ScenarioKind::S4PrivateProportional: return "s4";
    }
    return "s4";
}

std::optional<ScenarioKind> parse_scenario(std::string_view label) {
    if (label == "s1") return ScenarioKind::S1Renormalize;
    if (label == "s2") return ScenarioKind::S2Ocean;
    if (label == "s4") return ScenarioKind::S4PrivateProportional;
    return std::nullopt;
}

OwnershipGraph impute(const OwnershipGraph& graph,
                      const ImputationScenario& scenario,
                      std::vector<std::string>* warnings) {
    if (scenario.ocean_slices < 1) {
        throw InputError("ocean_slices must be >= 1");
    }
    if (scenario.variant == ScenarioKind::S4PrivateProportional) {
        bool any_investor = std::any_of(
            graph.nodes().begin(), graph.nodes().end(),
            [](const NodeRecord& n) { return is_investor(n.kind); });
        if (!any_investor) {
            throw ContractError(
                "scenario s4 requires shareholder classification, but the graph "
                "contains no investor-kind nodes");
        }
    }

    std::vector<NodeRecord> nodes(graph.nodes().begin(), graph.nodes().end());
    std::vector<OwnershipEdge> edges;
    edges.reserve(graph.edge_count());

    for (std::uint32_t j = 0; j < graph.node_count(); ++j) {
        auto holders = graph.holders_of(j);
        if (holders.empty()) continue; // root investor, untouched

        const NodeId& firm = graph.node(j).id;
        double known = graph.incoming_sum(j);
        if (known > 1.0 + 1e-6) {
            throw InputError("over-subscribed node " + firm +
                             ": incoming fractions sum to " + std::to_string(known));
        }
        double missing = 1.0 - known;

        auto keep_all = [&] {
            for (const auto& h : holders) {
                edges.push_back({graph.node(h.node).id, firm, h.fraction});
            }
        };
        auto renormalize = [&] {
            for (const auto& h : holders) {
                edges.push_back({graph.node(h.node).id, firm, h.fraction / known});
            }
        };
        auto add_ocean = [&] {
            keep_all();
            double slice = missing / scenario.ocean_slices;
            for (unsigned k = 1; k <= scenario.ocean_slices; ++k) {
                NodeId fid = float_node_id(firm, k);
                nodes.push_back({fid, fid, NodeKind::FloatSynthetic, "unknown"});
                edges.push_back({fid, firm, slice});
            }
        };

        if (std::abs(missing) <= kMassTolerance) {
            keep_all(); // already complete
            continue;
        }
        if (missing < 0.0) {
            // Within the load gate but above 1: scale the register back to 1.
            if (warnings) {
                warnings->push_back("register of " + firm +
                                    " sums slightly above 1, renormalized");
            }
            renormalize();
            continue;
        }

        switch (scenario.variant) {
            case ScenarioKind::S1Renormalize:
                renormalize();
                break;
            case ScenarioKind::S2Ocean:
                add_ocean();
                break;
            case ScenarioKind::S4PrivateProportional: {
                double private_mass = 0.0;
                for (const auto& h : holders) {
                    if (is_private(graph.node(h.node).kind)) {
                        private_mass += h.fraction;
                    }
                }
                if (private_mass <= 0.0) {
                    if (warnings) {
                        warnings->push_back(
                            "s4: no private holders for " + firm +
                            ", falling back to ocean of " +
                            std::to_string(scenario.ocean_slices) + " slices");
                    }
                    add_ocean();
                    break;
                }
                for (const auto& h : holders) {
                    double f = h.fraction;
                    if (is_private(graph.node(h.node).kind)) {
                        f += missing * (h.fraction / private_mass);
                    }
                    edges.push_back({graph.node(h.node).id, firm, f});
                }
                break;
            }
        }
    }

    // Every original edge points at some held node, so the per-register loop
    // above re-emits all of them exactly once.
    return OwnershipGraph::build(graph.year(), std::move(nodes), std::move(edges),
                                 warnings);
}

ImputationReport imputation_report(const OwnershipGraph& before,
                                   const OwnershipGraph& after,
                                   const ImputationScenario& scenario) {
    ImputationReport report;
    report.scenario = scenario.variant;
    report.ocean_slices = scenario.ocean_slices;

    for (std::uint32_t j = 0; j < before.node_count(); ++j) {
        if (before.holders_of(j).empty()) continue;
        const NodeId& firm = before.node(j).id;
        double missing = 1.0 - before.incoming_sum(j);
        if (missing <= kMassTolerance) continue;

        ImputationRecord rec;
        rec.firm = firm;
        rec.missing_mass = missing;
        auto after_idx = after.find(firm);
        if (after_idx) {
            for (const auto& h : after.holders_of(*after_idx)) {
                if (after.node(h.node).kind == NodeKind::FloatSynthetic) {
                    ++rec.synthetic_added;
                }
            }
        }
        rec.ocean_fallback =
            scenario.variant == ScenarioKind::S4PrivateProportional &&
            rec.synthetic_added > 0;
        report.records.push_back(std::move(rec));
    }
    return report;
}

} // namespace ownet
