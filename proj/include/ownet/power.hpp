#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ownet/graph.hpp"
#include "ownet/rng.hpp"

namespace ownet {

// Monte Carlo settings. The pivot rule is: in a random ordering of a firm's
// holders, the first holder whose cumulative share STRICTLY exceeds
// `threshold` is the direct controller (a holder at exactly 50% does not
// control alone).
struct McConfig {
    std::uint64_t runs = 100000;
    double threshold = 0.5;    // in (0, 1)
    std::uint64_t master_seed = 0;
    unsigned workers = 1;      // parallelism hint; never affects results
};

struct HolderShare {
    NodeId id;
    double fraction = 0.0;
};

// One uniformly random permutation of `holders`; returns the first holder at
// which the cumulative fraction strictly exceeds `threshold`.
NodeId pivot_draw(std::span<const HolderShare> holders, double threshold,
                  SplitMix64& rng);

// Exact pivotality frequencies by full enumeration of all n! orderings.
// Capped at 10 holders. Used as the oracle for the Monte Carlo estimator.
std::map<NodeId, double> exact_power(std::span<const HolderShare> holders,
                                     double threshold);

// Monte Carlo pivotality frequencies for a single register, with the same
// counter-based stream derivation as the full simulation.
std::map<NodeId, double> mc_pivot_frequencies(std::span<const HolderShare> holders,
                                              double threshold,
                                              std::uint64_t runs,
                                              std::uint64_t master_seed);

// Direct controller per node for one simulation run. kNone marks nodes with
// no holders (root investors).
struct ControlAssignment {
    static constexpr std::uint32_t kNone = 0xFFFFFFFFu;
    std::vector<std::uint32_t> controller;
};

ControlAssignment draw_assignment(const OwnershipGraph& graph, double threshold,
                                  std::uint64_t master_seed,
                                  std::uint64_t run_index);

// Ultimate controllers and control chains for one run.
//
// Following controller pointers from node j either reaches a node with no
// holders (the ultimate controller) or revisits a node, closing a control
// cycle; then the lexicographically smallest cycle member is the canonical
// ultimate controller. chain[j] runs from the direct controller to the
// ultimate controller inclusive; once a cycle is entered the chain is cut at
// the entry node, with the canonical representative appended.
struct ChainResolution {
    std::vector<std::uint32_t> ultimate;
    std::vector<std::vector<std::uint32_t>> chain;
};

ChainResolution resolve_chains(const ControlAssignment& assignment,
                               const OwnershipGraph& graph);

// Sparse T-NPI / T-NPF estimates as integer run counts over T runs:
//   npi_count(i, j): runs in which i was the ultimate controller of j
//   npf_count(i, j): runs in which i was on j's control chain
// Every value reported as a probability is a multiple of 1/T, and for each
// firm the npi counts partition the T runs exactly. Firms with no recorded
// holders are self-controlled: a (j, j) cell with both counts equal to T.
struct PowerEstimates {
    struct Cell {
        std::uint32_t investor = 0;
        std::uint32_t firm = 0;
        std::uint64_t npi_count = 0;
        std::uint64_t npf_count = 0;
    };

    std::uint64_t runs = 0;
    double threshold = 0.5;
    std::uint64_t master_seed = 0;
    std::vector<NodeId> ids;               // node index -> id (lexicographic)
    std::vector<Cell> cells;               // sorted by (investor, firm)
    std::vector<std::uint32_t> firm_axis;  // covered firm indices, sorted

    // Populated when run_simulation tracked a sector: per investor, the sum
    // over runs of the number of sector firms it ultimately controlled.
    bool sector_tracked = false;
    std::map<NodeId, std::uint64_t> sector_run_totals;

    std::optional<std::uint32_t> index_of(const NodeId& id) const;
    const Cell* find_cell(std::uint32_t investor, std::uint32_t firm) const;

    double tnpi(const NodeId& investor, const NodeId& firm) const;
    double tnpf(const NodeId& investor, const NodeId& firm) const;
    double se_tnpi(const NodeId& investor, const NodeId& firm) const;

    bool covers_firm(const NodeId& firm) const;

    // Integer partition check input: total npi count of one firm column.
    std::uint64_t column_npi_total(std::uint32_t firm_index) const;
};

// Executes `config.runs` independent runs. In run t every node with holders
// draws its pivotal controller from a random stream derived from
// (master_seed, t, node id), chains are resolved, and counts accumulated.
// Results are bit-identical for a given master seed regardless of worker
// count. Requires an imputed graph (every register sums to 1); pass
// `track_sector` to also accumulate the per-run controlled-firm counts used
// by the aggregation identity check.
PowerEstimates run_simulation(const OwnershipGraph& graph, const McConfig& config,
                              const SectorSpec* track_sector = nullptr);

// Binomial standard error sqrt(p (1 - p) / runs) of a Monte Carlo proportion.
double standard_error(double p, std::uint64_t runs);

} // namespace ownet
