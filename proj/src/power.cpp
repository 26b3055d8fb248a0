#include "ownet/power.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>
#include <unordered_map>

namespace ownet {

namespace {

constexpr double kImputedTolerance = 1e-6;

void validate_threshold(double threshold) {
    if (!(threshold > 0.0) || !(threshold < 1.0)) {
        throw InputError("threshold must lie in (0,1), got " +
                         std::to_string(threshold));
    }
}

// Fisher-Yates permutation of [0, n) into `perm`.
void random_permutation(std::vector<std::uint32_t>& perm, std::size_t n,
                        SplitMix64& rng) {
    perm.resize(n);
    std::iota(perm.begin(), perm.end(), 0u);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        std::size_t j = i + rng.bounded(n - i);
        std::swap(perm[i], perm[j]);
    }
}

// Index of the pivot in a permuted fraction walk; falls back to the last
// element if rounding keeps the cumulative sum at or below the threshold.
template <typename FracAt>
std::size_t pivot_position(const std::vector<std::uint32_t>& perm, FracAt frac_at,
                           double threshold) {
    double cumulative = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) {
        cumulative += frac_at(perm[i]);
        if (cumulative > threshold) return i;
    }
    return perm.size() - 1;
}

std::uint64_t factorial(std::size_t n) {
    std::uint64_t f = 1;
    for (std::size_t i = 2; i <= n; ++i) f *= i;
    return f;
}

} // namespace

NodeId pivot_draw(std::span<const HolderShare> holders, double threshold,
                  SplitMix64& rng) {
    if (holders.empty()) {
        throw ContractError("pivot_draw: empty holder list");
    }
    validate_threshold(threshold);
    std::vector<std::uint32_t> perm;
    random_permutation(perm, holders.size(), rng);
    std::size_t at = pivot_position(
        perm, [&](std::uint32_t k) { return holders[k].fraction; }, threshold);
    return holders[perm[at]].id;
}

std::map<NodeId, double> exact_power(std::span<const HolderShare> holders,
                                     double threshold) {
    if (holders.empty()) {
        throw ContractError("exact_power: empty holder list");
    }
    if (holders.size() > 10) {
        throw ContractError("exact_power: register of " +
                            std::to_string(holders.size()) +
                            " holders exceeds the 10-holder factorial guard");
    }
    validate_threshold(threshold);

    double total = 0.0;
    for (const auto& h : holders) {
        if (h.fraction < 0.0) {
            throw InputError("negative fraction for holder " + h.id);
        }
        total += h.fraction;
    }
    if (!(total > threshold)) {
        throw ContractError("register total " + std::to_string(total) +
                            " does not exceed the threshold, no pivot exists");
    }

    const std::size_t n = holders.size();
    std::vector<std::uint64_t> counts(n, 0);
    std::vector<std::uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0u);
    do {
        double cumulative = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cumulative += holders[perm[i]].fraction;
            if (cumulative > threshold) {
                ++counts[perm[i]];
                break;
            }
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    const auto permutations = static_cast<double>(factorial(n));
    std::map<NodeId, double> result;
    for (std::size_t i = 0; i < n; ++i) {
        auto [it, inserted] = result.emplace(
            holders[i].id, static_cast<double>(counts[i]) / permutations);
        if (!inserted) {
            throw InputError("duplicate holder id in register: " + holders[i].id);
        }
    }
    return result;
}

std::map<NodeId, double> mc_pivot_frequencies(std::span<const HolderShare> holders,
                                              double threshold,
                                              std::uint64_t runs,
                                              std::uint64_t master_seed) {
    if (holders.empty()) {
        throw ContractError("mc_pivot_frequencies: empty holder list");
    }
    if (runs < 1) throw InputError("runs must be >= 1");
    validate_threshold(threshold);

    // Stream identity for a bare register: hash of the joined holder ids.
    std::string joined;
    for (const auto& h : holders) {
        joined += h.id;
        joined.push_back('\0');
    }
    const std::uint64_t register_hash = fnv1a64(joined);

    std::map<NodeId, std::uint64_t> counts;
    std::vector<std::uint32_t> perm;
    for (std::uint64_t t = 0; t < runs; ++t) {
        SplitMix64 rng(derive_stream_seed(master_seed, t, register_hash));
        random_permutation(perm, holders.size(), rng);
        std::size_t at = pivot_position(
            perm, [&](std::uint32_t k) { return holders[k].fraction; }, threshold);
        ++counts[holders[perm[at]].id];
    }

    std::map<NodeId, double> result;
    for (const auto& h : holders) {
        result[h.id] =
            static_cast<double>(counts[h.id]) / static_cast<double>(runs);
    }
    return result;
}

ControlAssignment draw_assignment(const OwnershipGraph& graph, double threshold,
                                  std::uint64_t master_seed,
                                  std::uint64_t run_index) {
    validate_threshold(threshold);
    ControlAssignment assignment;
    assignment.controller.assign(graph.node_count(), ControlAssignment::kNone);
    std::vector<std::uint32_t> perm;
    for (std::uint32_t j = 0; j < graph.node_count(); ++j) {
        auto holders = graph.holders_of(j);
        if (holders.empty()) continue;
        SplitMix64 rng(derive_stream_seed(master_seed, run_index,
                                          fnv1a64(graph.node(j).id)));
        random_permutation(perm, holders.size(), rng);
        std::size_t at = pivot_position(
            perm, [&](std::uint32_t k) { return holders[k].fraction; }, threshold);
        assignment.controller[j] = holders[perm[at]].node;
    }
    return assignment;
}

namespace {

// Scratch buffers for the chain walk, reused across nodes and runs.
struct ChainScratch {
    std::vector<std::int32_t> pos;       // node -> position in seq, -1 if unseen
    std::vector<std::uint32_t> seq;      // visited pointer sequence, seq[0] = j

    explicit ChainScratch(std::size_t n) : pos(n, -1) {}
};

// Walks controller pointers from j. On return `chain` holds the control
// chain (direct controller .. ultimate controller) and the ultimate
// controller index is returned.
std::uint32_t walk_chain(std::uint32_t j,
                         const std::vector<std::uint32_t>& controller,
                         ChainScratch& scratch,
                         std::vector<std::uint32_t>& chain) {
    auto& pos = scratch.pos;
    auto& seq = scratch.seq;
    seq.clear();
    seq.push_back(j);
    pos[j] = 0;

    std::uint32_t ultimate = j;
    std::uint32_t cur = j;
    while (true) {
        std::uint32_t nxt = controller[cur];
        if (nxt == ControlAssignment::kNone) {
            // cur has no holders: it is the ultimate controller.
            ultimate = cur;
            chain.assign(seq.begin() + 1, seq.end());
            break;
        }
        if (pos[nxt] >= 0) {
            // Revisit: the nodes from nxt's first occurrence onward form a
            // control cycle; canonicalize to its smallest member (node index
            // order equals lexicographic id order).
            std::size_t cycle_start = static_cast<std::size_t>(pos[nxt]);
            std::uint32_t smallest = seq[cycle_start];
            for (std::size_t k = cycle_start + 1; k < seq.size(); ++k) {
                smallest = std::min(smallest, seq[k]);
            }
            ultimate = smallest;
            std::size_t cut = std::max<std::size_t>(cycle_start, 1);
            chain.assign(seq.begin() + 1, seq.begin() + cut + 1);
            if (chain.empty() || chain.back() != ultimate) {
                chain.push_back(ultimate);
            }
            break;
        }
        seq.push_back(nxt);
        pos[nxt] = static_cast<std::int32_t>(seq.size() - 1);
        cur = nxt;
    }

    for (std::uint32_t v : seq) pos[v] = -1;
    return ultimate;
}

} // namespace

ChainResolution resolve_chains(const ControlAssignment& assignment,
                               const OwnershipGraph& graph) {
    const std::size_t n = graph.node_count();
    if (assignment.controller.size() != n) {
        throw ContractError("assignment does not cover the graph");
    }
    ChainResolution resolution;
    resolution.ultimate.resize(n);
    resolution.chain.resize(n);
    ChainScratch scratch(n);
    for (std::uint32_t j = 0; j < n; ++j) {
        if (assignment.controller[j] == ControlAssignment::kNone) {
            resolution.ultimate[j] = j; // root: self-controlled, empty chain
            continue;
        }
        resolution.ultimate[j] =
            walk_chain(j, assignment.controller, scratch, resolution.chain[j]);
    }
    return resolution;
}

std::optional<std::uint32_t> PowerEstimates::index_of(const NodeId& id) const {
    auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it == ids.end() || *it != id) return std::nullopt;
    return static_cast<std::uint32_t>(it - ids.begin());
}

const PowerEstimates::Cell* PowerEstimates::find_cell(std::uint32_t investor,
                                                      std::uint32_t firm) const {
    auto it = std::lower_bound(
        cells.begin(), cells.end(), std::make_pair(investor, firm),
        [](const Cell& c, const std::pair<std::uint32_t, std::uint32_t>& key) {
            return std::make_pair(c.investor, c.firm) < key;
        });
    if (it == cells.end() || it->investor != investor || it->firm != firm) {
        return nullptr;
    }
    return &*it;
}

double PowerEstimates::tnpi(const NodeId& investor, const NodeId& firm) const {
    auto i = index_of(investor);
    auto j = index_of(firm);
    if (!i || !j) return 0.0;
    const Cell* cell = find_cell(*i, *j);
    if (!cell) return 0.0;
    return static_cast<double>(cell->npi_count) / static_cast<double>(runs);
}

double PowerEstimates::tnpf(const NodeId& investor, const NodeId& firm) const {
    auto i = index_of(investor);
    auto j = index_of(firm);
    if (!i || !j) return 0.0;
    const Cell* cell = find_cell(*i, *j);
    if (!cell) return 0.0;
    return static_cast<double>(cell->npf_count) / static_cast<double>(runs);
}

double PowerEstimates::se_tnpi(const NodeId& investor, const NodeId& firm) const {
    return standard_error(tnpi(investor, firm), runs);
}

bool PowerEstimates::covers_firm(const NodeId& firm) const {
    auto j = index_of(firm);
    if (!j) return false;
    return std::binary_search(firm_axis.begin(), firm_axis.end(), *j);
}

std::uint64_t PowerEstimates::column_npi_total(std::uint32_t firm_index) const {
    std::uint64_t total = 0;
    for (const auto& cell : cells) {
        if (cell.firm == firm_index) total += cell.npi_count;
    }
    return total;
}

namespace {

struct WorkerAccumulator {
    // (investor << 32 | firm) -> (npi runs, npf runs)
    std::unordered_map<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>> cells;
    std::vector<std::uint64_t> sector_totals; // per investor index
};

} // namespace

PowerEstimates run_simulation(const OwnershipGraph& graph, const McConfig& config,
                              const SectorSpec* track_sector) {
    if (config.runs < 1) throw InputError("runs must be >= 1");
    validate_threshold(config.threshold);

    const std::size_t n = graph.node_count();

    std::vector<std::uint32_t> held;
    held.reserve(n);
    for (std::uint32_t j = 0; j < n; ++j) {
        if (graph.holders_of(j).empty()) continue;
        double sum = graph.incoming_sum(j);
        if (sum < 1.0 - kImputedTolerance) {
            throw ContractError("node " + graph.node(j).id +
                                " has incoming sum " + std::to_string(sum) +
                                " < 1; impute the graph before simulating");
        }
        held.push_back(j);
    }

    std::vector<std::uint64_t> node_hash(n);
    for (std::uint32_t j = 0; j < n; ++j) {
        node_hash[j] = fnv1a64(graph.node(j).id);
    }

    // Sector tracking: whether node j is a tracked sector firm.
    std::vector<char> in_sector(n, 0);
    std::vector<std::uint32_t> holderless_sector;
    if (track_sector) {
        validate_sector(graph, *track_sector);
        for (const auto& id : track_sector->firms) {
            std::uint32_t j = graph.require(id);
            in_sector[j] = 1;
            if (graph.holders_of(j).empty()) holderless_sector.push_back(j);
        }
    }

    unsigned workers = std::max(1u, config.workers);
    workers = static_cast<unsigned>(
        std::min<std::uint64_t>(workers, config.runs));

    std::vector<WorkerAccumulator> acc(workers);
    auto simulate_range = [&](unsigned w, std::uint64_t begin, std::uint64_t end) {
        auto& out = acc[w];
        out.cells.reserve(1024);
        if (track_sector) out.sector_totals.assign(n, 0);

        std::vector<std::uint32_t> controller(n, ControlAssignment::kNone);
        std::vector<std::uint32_t> perm;
        std::vector<std::uint32_t> chain;
        ChainScratch scratch(n);

        for (std::uint64_t t = begin; t < end; ++t) {
            for (std::uint32_t j : held) {
                auto holders = graph.holders_of(j);
                SplitMix64 rng(
                    derive_stream_seed(config.master_seed, t, node_hash[j]));
                random_permutation(perm, holders.size(), rng);
                std::size_t at = pivot_position(
                    perm, [&](std::uint32_t k) { return holders[k].fraction; },
                    config.threshold);
                controller[j] = holders[perm[at]].node;
            }
            for (std::uint32_t j : held) {
                chain.clear();
                std::uint32_t ultimate =
                    walk_chain(j, controller, scratch, chain);
                std::uint64_t firm_key = j;
                auto& npi_cell =
                    out.cells[(static_cast<std::uint64_t>(ultimate) << 32) |
                              firm_key];
                ++npi_cell.first;
                for (std::uint32_t member : chain) {
                    auto& cell =
                        out.cells[(static_cast<std::uint64_t>(member) << 32) |
                                  firm_key];
                    ++cell.second;
                }
                if (track_sector && in_sector[j]) {
                    ++out.sector_totals[ultimate];
                }
            }
        }
    };

    if (workers == 1) {
        simulate_range(0, 0, config.runs);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            std::uint64_t begin = config.runs * w / workers;
            std::uint64_t end = config.runs * (w + 1) / workers;
            pool.emplace_back(simulate_range, w, begin, end);
        }
        for (auto& th : pool) th.join();
    }

    // Merge worker counts; integer addition is order-independent.
    std::unordered_map<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>>
        merged;
    std::vector<std::uint64_t> sector_totals(track_sector ? n : 0, 0);
    for (const auto& worker : acc) {
        for (const auto& [key, counts] : worker.cells) {
            auto& cell = merged[key];
            cell.first += counts.first;
            cell.second += counts.second;
        }
        if (track_sector) {
            for (std::size_t i = 0; i < worker.sector_totals.size(); ++i) {
                sector_totals[i] += worker.sector_totals[i];
            }
        }
    }

    PowerEstimates estimates;
    estimates.runs = config.runs;
    estimates.threshold = config.threshold;
    estimates.master_seed = config.master_seed;
    estimates.ids.reserve(n);
    for (const auto& rec : graph.nodes()) estimates.ids.push_back(rec.id);

    estimates.cells.reserve(merged.size());
    for (const auto& [key, counts] : merged) {
        PowerEstimates::Cell cell;
        cell.investor = static_cast<std::uint32_t>(key >> 32);
        cell.firm = static_cast<std::uint32_t>(key & 0xFFFFFFFFu);
        cell.npi_count = counts.first;
        cell.npf_count = counts.second;
        estimates.cells.push_back(cell);
    }

    // Firms with no recorded holders are self-controlled root firms.
    estimates.firm_axis = held;
    for (std::uint32_t j = 0; j < n; ++j) {
        if (graph.node(j).kind == NodeKind::Firm && graph.holders_of(j).empty()) {
            estimates.firm_axis.push_back(j);
            estimates.cells.push_back({j, j, config.runs, config.runs});
        }
    }
    std::sort(estimates.firm_axis.begin(), estimates.firm_axis.end());
    std::sort(estimates.cells.begin(), estimates.cells.end(),
              [](const PowerEstimates::Cell& a, const PowerEstimates::Cell& b) {
                  return std::make_pair(a.investor, a.firm) <
                         std::make_pair(b.investor, b.firm);
              });

    if (track_sector) {
        estimates.sector_tracked = true;
        for (std::uint32_t j : holderless_sector) {
            sector_totals[j] += config.runs;
        }
        for (std::uint32_t i = 0; i < n; ++i) {
            if (sector_totals[i] > 0) {
                estimates.sector_run_totals[graph.node(i).id] = sector_totals[i];
            }
        }
    }
    return estimates;
}

double standard_error(double p, std::uint64_t runs) {
    if (runs < 1) throw InputError("runs must be >= 1");
    return std::sqrt(p * (1.0 - p) / static_cast<double>(runs));
}

} // namespace ownet
