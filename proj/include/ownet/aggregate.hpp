#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ownet/graph.hpp"
#include "ownet/power.hpp"

namespace ownet {

// Sector-normalized weights w_j = v_j / sum_k v_k, summing to 1.
struct SectorWeights {
    std::map<NodeId, double> w;
};

// Weights from the sector size variable. The denominator is accumulated in
// lexicographic firm order, so the result does not depend on file order.
SectorWeights sector_weights(const SectorSpec& spec);

// Per-investor sector aggregates. a_npi is the expected number of sector
// firms under the investor's ultimate control; the weighted variants replace
// the count with the share of sectoral economic mass. Probabilities are
// multiples of 1/runs; the integer run totals are kept alongside so exact
// partition identities can be checked without floating-point drift.
struct AggregateRow {
    NodeId investor;
    double a_npi = 0.0;
    double a_npi_weighted = 0.0;
    double a_npf_unweighted = 0.0;
    double a_npf_weighted = 0.0;
    std::uint64_t npi_run_total = 0; // sum over sector firms of npi counts
    std::uint64_t npf_run_total = 0;
};

struct AggregateIndices {
    std::uint64_t runs = 0;
    // Sorted descending by a_npi_weighted, ties by investor id.
    std::vector<AggregateRow> rows;
};

// Sums estimates over the sector firms, unweighted and weighted. Weighted
// sums accumulate in the firm order of `spec`. Investors with no nonzero
// cell over the sector are omitted. Raises a coverage error naming any
// sector firm the estimates do not cover.
AggregateIndices aggregate_indices(const PowerEstimates& estimates,
                                   const SectorSpec& spec,
                                   const SectorWeights& weights);

// Deterministic cash-flow reading of influence: for every sector firm j,
// the sum over all directed holder walks i -> ... -> j of the product of
// edge fractions, obtained by iterating flow propagation to tolerance 1e-12.
// A closed 100% ownership cycle makes the series diverge; that raises
// NumericError naming the cycle.
std::map<std::pair<NodeId, NodeId>, double> integrated_ownership(
    const OwnershipGraph& graph, const SectorSpec& spec);

// Classical concentration baselines over market shares.
struct ConcentrationReport {
    double hhi = 0.0; // points, 0-10000 scale
    double cr3 = 0.0; // combined share of the three largest operators
    std::vector<std::pair<NodeId, double>> shares; // sorted descending
};

ConcentrationReport baseline_concentration(
    std::vector<std::pair<NodeId, double>> shares);

} // namespace ownet
