#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ownet/graph.hpp"

namespace ownet {

// Policies completing under-specified shareholder registers to 100%:
//   s1: renormalize the known stakes.
//   s2: assign the missing mass to a finite ocean of equal synthetic holders.
//   s4: redistribute the missing mass proportionally among private holders;
//       state and municipal stakes stay at their recorded values.
enum class ScenarioKind { S1Renormalize, S2Ocean, S4PrivateProportional };

const char* to_string(ScenarioKind kind);
std::optional<ScenarioKind> parse_scenario(std::string_view label); // s1/s2/s4

struct ImputationScenario {
    ScenarioKind variant = ScenarioKind::S4PrivateProportional;
    unsigned ocean_slices = 100; // S2 (and S4 fallback) granularity
};

// Completes every register so that each node with at least one incoming edge
// has holder fractions summing to 1 +- 1e-9. Nodes with no incoming edges are
// untouched. Synthetic ocean holders are named `<firm_id>#float<k>`, k >= 1,
// so the output is a pure function of (graph, scenario).
//
// S4 falls back to the ocean for nodes that have no private holders (a
// warning is appended). Requesting S4 on a graph with no investor-kind nodes
// at all raises ContractError: the scenario is meaningless without
// shareholder classification.
OwnershipGraph impute(const OwnershipGraph& graph,
                      const ImputationScenario& scenario,
                      std::vector<std::string>* warnings = nullptr);

struct ImputationRecord {
    NodeId firm;
    double missing_mass = 0.0;
    unsigned synthetic_added = 0;
    bool ocean_fallback = false; // S4 register with no private holders
};

// One record per firm whose register was deficient (missing mass > 1e-9).
struct ImputationReport {
    ScenarioKind scenario;
    unsigned ocean_slices = 0;
    std::vector<ImputationRecord> records;
};

ImputationReport imputation_report(const OwnershipGraph& before,
                                   const OwnershipGraph& after,
                                   const ImputationScenario& scenario);

} // namespace ownet
