#include "ownet/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace ownet {

SectorWeights sector_weights(const SectorSpec& spec) {
    if (spec.firms.empty()) {
        throw InputError("sector specification lists no firms");
    }
    std::vector<NodeId> sorted = spec.firms;
    std::sort(sorted.begin(), sorted.end());

    double total = 0.0;
    for (const auto& firm : sorted) {
        auto it = spec.size_values.find(firm);
        if (it == spec.size_values.end()) {
            throw InputError("no size value for sector firm " + firm);
        }
        if (it->second < 0.0 || !std::isfinite(it->second)) {
            throw InputError("invalid size value for sector firm " + firm);
        }
        total += it->second;
    }
    if (!(total > 0.0)) {
        throw InputError("degenerate sector weights: all size values are zero");
    }

    SectorWeights weights;
    for (const auto& firm : sorted) {
        weights.w[firm] = spec.size_values.at(firm) / total;
    }
    return weights;
}

AggregateIndices aggregate_indices(const PowerEstimates& estimates,
                                   const SectorSpec& spec,
                                   const SectorWeights& weights) {
    // Coverage and weight lookup, in sector firm order.
    std::vector<std::uint32_t> firm_index(spec.firms.size());
    std::vector<double> firm_weight(spec.firms.size());
    std::unordered_map<std::uint32_t, std::size_t> position;
    for (std::size_t p = 0; p < spec.firms.size(); ++p) {
        const NodeId& firm = spec.firms[p];
        auto idx = estimates.index_of(firm);
        if (!idx || !estimates.covers_firm(firm)) {
            throw InputError("estimates do not cover sector firm " + firm);
        }
        auto wit = weights.w.find(firm);
        if (wit == weights.w.end()) {
            throw InputError("no weight for sector firm " + firm);
        }
        firm_index[p] = *idx;
        firm_weight[p] = wit->second;
        position.emplace(*idx, p);
    }

    // Group the sector cells per investor, keyed by firm position so the
    // weighted sums follow the sector's firm order.
    struct Entry {
        std::size_t pos;
        std::uint64_t npi;
        std::uint64_t npf;
    };
    std::map<std::uint32_t, std::vector<Entry>> per_investor;
    for (const auto& cell : estimates.cells) {
        auto hit = position.find(cell.firm);
        if (hit == position.end()) continue;
        per_investor[cell.investor].push_back(
            {hit->second, cell.npi_count, cell.npf_count});
    }

    const auto runs = static_cast<double>(estimates.runs);
    AggregateIndices result;
    result.runs = estimates.runs;
    result.rows.reserve(per_investor.size());
    for (auto& [investor, entries] : per_investor) {
        std::sort(entries.begin(), entries.end(),
                  [](const Entry& a, const Entry& b) { return a.pos < b.pos; });
        AggregateRow row;
        row.investor = estimates.ids[investor];
        for (const auto& e : entries) {
            row.npi_run_total += e.npi;
            row.npf_run_total += e.npf;
            row.a_npi_weighted +=
                firm_weight[e.pos] * (static_cast<double>(e.npi) / runs);
            row.a_npf_weighted +=
                firm_weight[e.pos] * (static_cast<double>(e.npf) / runs);
        }
        row.a_npi = static_cast<double>(row.npi_run_total) / runs;
        row.a_npf_unweighted = static_cast<double>(row.npf_run_total) / runs;
        result.rows.push_back(std::move(row));
    }

    std::sort(result.rows.begin(), result.rows.end(),
              [](const AggregateRow& a, const AggregateRow& b) {
                  if (a.a_npi_weighted != b.a_npi_weighted) {
                      return a.a_npi_weighted > b.a_npi_weighted;
                  }
                  return a.investor < b.investor;
              });
    return result;
}

namespace {

// Tarjan strongly connected components; used only to name the offending
// cycle when the flow iteration cannot converge.
class SccFinder {
public:
    explicit SccFinder(const OwnershipGraph& graph) : graph_(graph) {
        n_ = graph.node_count();
        index_.assign(n_, -1);
        low_.assign(n_, 0);
        on_stack_.assign(n_, 0);
    }

    std::vector<std::vector<std::uint32_t>> components() {
        for (std::uint32_t v = 0; v < n_; ++v) {
            if (index_[v] < 0) strong_connect(v);
        }
        return components_;
    }

private:
    void strong_connect(std::uint32_t v) {
        index_[v] = low_[v] = counter_++;
        stack_.push_back(v);
        on_stack_[v] = 1;
        for (const auto& h : graph_.holdings_of(v)) {
            std::uint32_t w = h.node;
            if (index_[w] < 0) {
                strong_connect(w);
                low_[v] = std::min(low_[v], low_[w]);
            } else if (on_stack_[w]) {
                low_[v] = std::min(low_[v], index_[w]);
            }
        }
        if (low_[v] == index_[v]) {
            std::vector<std::uint32_t> comp;
            std::uint32_t w;
            do {
                w = stack_.back();
                stack_.pop_back();
                on_stack_[w] = 0;
                comp.push_back(w);
            } while (w != v);
            components_.push_back(std::move(comp));
        }
    }

    const OwnershipGraph& graph_;
    std::size_t n_ = 0;
    int counter_ = 0;
    std::vector<int> index_;
    std::vector<int> low_;
    std::vector<char> on_stack_;
    std::vector<std::uint32_t> stack_;
    std::vector<std::vector<std::uint32_t>> components_;
};

std::string describe_closed_cycle(const OwnershipGraph& graph) {
    for (auto& comp : SccFinder(graph).components()) {
        if (comp.size() < 2) continue;
        std::vector<char> member(graph.node_count(), 0);
        for (auto v : comp) member[v] = 1;
        bool closed = true;
        for (auto v : comp) {
            double inside = 0.0;
            for (const auto& h : graph.holders_of(v)) {
                if (member[h.node]) inside += h.fraction;
            }
            if (inside < 1.0 - 1e-9) {
                closed = false;
                break;
            }
        }
        if (closed) {
            std::sort(comp.begin(), comp.end());
            std::string names;
            for (auto v : comp) {
                if (!names.empty()) names += ", ";
                names += graph.node(v).id;
            }
            return "closed 100% ownership cycle: " + names;
        }
    }
    return "no closed cycle identified";
}

} // namespace

std::map<std::pair<NodeId, NodeId>, double> integrated_ownership(
    const OwnershipGraph& graph, const SectorSpec& spec) {
    constexpr double kTolerance = 1e-12;
    constexpr std::size_t kMaxSweeps = 1000000;

    const std::size_t n = graph.node_count();
    std::map<std::pair<NodeId, NodeId>, double> result;

    for (const auto& firm : spec.firms) {
        std::uint32_t j = graph.require(firm);

        // x[i] = sum over walks i -> ... -> j of edge-fraction products,
        // the fixed point of x = W (e_j + x).
        std::vector<double> x(n, 0.0);
        std::vector<double> next(n, 0.0);
        bool converged = false;
        for (std::size_t sweep = 0; sweep < kMaxSweeps; ++sweep) {
            double max_delta = 0.0;
            for (std::uint32_t i = 0; i < n; ++i) {
                double value = 0.0;
                for (const auto& h : graph.holdings_of(i)) {
                    value += h.fraction * ((h.node == j ? 1.0 : 0.0) + x[h.node]);
                }
                next[i] = value;
                max_delta = std::max(max_delta, std::abs(value - x[i]));
            }
            x.swap(next);
            if (max_delta < kTolerance) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            throw NumericError("integrated ownership toward " + firm +
                               " did not converge; " +
                               describe_closed_cycle(graph));
        }
        for (std::uint32_t i = 0; i < n; ++i) {
            if (x[i] > 0.0) {
                result[{graph.node(i).id, firm}] = x[i];
            }
        }
    }
    return result;
}

ConcentrationReport baseline_concentration(
    std::vector<std::pair<NodeId, double>> shares) {
    if (shares.empty()) {
        throw InputError("no market shares given");
    }
    double total = 0.0;
    for (const auto& [id, share] : shares) {
        if (!(share > 0.0) || share > 1.0) {
            throw InputError("market share for " + id + " outside (0,1]");
        }
        total += share;
    }
    if (total > 1.0 + 1e-9) {
        throw InputError("market shares sum to " + std::to_string(total) +
                         " > 1");
    }

    std::sort(shares.begin(), shares.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    ConcentrationReport report;
    for (const auto& [id, share] : shares) {
        double points = share * 100.0;
        report.hhi += points * points;
    }
    for (std::size_t i = 0; i < shares.size() && i < 3; ++i) {
        report.cr3 += shares[i].second;
    }
    report.shares = std::move(shares);
    return report;
}

} // namespace ownet
