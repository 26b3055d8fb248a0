#include <doctest.h>

#include <cmath>

#include "ownet/aggregate.hpp"
#include "ownet/imputation.hpp"

#include "../common/synthetic.hpp"

using namespace ownet;

namespace {

SectorSpec two_firm_spec(double v1, double v2) {
    SectorSpec spec;
    spec.firms = {"F1", "F2"};
    spec.size_values = {{"F1", v1}, {"F2", v2}};
    spec.size_variable_name = "total_assets";
    return spec;
}

// Hand-built estimates over firms F1, F2 and investor I with tnpi rows
// (0.6, 0.4) at T = 10.
PowerEstimates handmade_estimates() {
    PowerEstimates est;
    est.runs = 10;
    est.ids = {"F1", "F2", "I"};
    est.firm_axis = {0, 1};
    est.cells = {{2, 0, 6, 6}, {2, 1, 4, 4}};
    return est;
}

// All walks start -> ... -> firm of length <= depth, summed by brute force.
double enumerate_walks(const OwnershipGraph& g, std::uint32_t start,
                       std::uint32_t firm, int depth) {
    if (depth == 0) return 0.0;
    double total = 0.0;
    for (const auto& h : g.holdings_of(start)) {
        if (h.node == firm) total += h.fraction;
        total += h.fraction * enumerate_walks(g, h.node, firm, depth - 1);
    }
    return total;
}

} // namespace

TEST_CASE("sector_weights normalizes the size variable") {
    SUBCASE("300 / 100") {
        auto w = sector_weights(two_firm_spec(300, 100));
        CHECK(w.w.at("F1") == 0.75);
        CHECK(w.w.at("F2") == 0.25);
    }
    SUBCASE("equal sizes over four firms") {
        SectorSpec spec;
        spec.firms = {"A", "B", "C", "D"};
        for (const auto& f : spec.firms) spec.size_values[f] = 5.0;
        auto w = sector_weights(spec);
        for (const auto& f : spec.firms) CHECK(w.w.at(f) == 0.25);
    }
    SUBCASE("single nonzero size takes the whole weight") {
        auto w = sector_weights(two_firm_spec(7.0, 0.0));
        CHECK(w.w.at("F1") == 1.0);
        CHECK(w.w.at("F2") == 0.0);
    }
    SUBCASE("degenerate and invalid inputs") {
        CHECK_THROWS_AS(sector_weights(two_firm_spec(0, 0)), InputError);
        CHECK_THROWS_AS(sector_weights(two_firm_spec(-1, 2)), InputError);
        CHECK_THROWS_AS(sector_weights(SectorSpec{}), InputError);
    }
    SUBCASE("weights sum to one and ignore firm order") {
        auto spec = two_firm_spec(311.7, 95.3);
        auto w1 = sector_weights(spec);
        std::swap(spec.firms[0], spec.firms[1]);
        auto w2 = sector_weights(spec);
        CHECK(w1.w.at("F1") == w2.w.at("F1"));
        CHECK(std::abs(w1.w.at("F1") + w1.w.at("F2") - 1.0) <= 1e-12);
    }
    SUBCASE("scaling all sizes leaves weights unchanged") {
        auto w1 = sector_weights(two_firm_spec(300, 100));
        auto w2 = sector_weights(two_firm_spec(300e6, 100e6));
        CHECK(std::abs(w1.w.at("F1") - w2.w.at("F1")) <= 1e-12);
        CHECK(std::abs(w1.w.at("F2") - w2.w.at("F2")) <= 1e-12);
    }
}

TEST_CASE("aggregate_indices implements the sector sums") {
    auto est = handmade_estimates();
    auto spec = two_firm_spec(300, 100);
    auto weights = sector_weights(spec);
    auto agg = aggregate_indices(est, spec, weights);

    REQUIRE(agg.rows.size() == 1);
    const auto& row = agg.rows[0];
    CHECK(row.investor == "I");
    CHECK(row.a_npi == 1.0);
    CHECK(std::abs(row.a_npi_weighted - 0.55) <= 1e-12);
    CHECK(row.a_npf_unweighted == 1.0);
    CHECK(row.npi_run_total == 10);
}

TEST_CASE("aggregate_indices raises a coverage error for missing firms") {
    auto est = handmade_estimates();
    SectorSpec spec = two_firm_spec(300, 100);
    spec.firms.push_back("Ghost");
    spec.size_values["Ghost"] = 50;
    CHECK_THROWS_WITH_AS(aggregate_indices(est, spec, sector_weights(spec)),
                         doctest::Contains("Ghost"), InputError);
}

TEST_CASE("deterministic chain: npf credits intermediaries, npi does not") {
    auto g = OwnershipGraph::build(
        2024,
        {{"A", "", NodeKind::InvestorPrivate, "US"},
         {"B", "", NodeKind::Firm, "IT"},
         {"C", "", NodeKind::Firm, "IT"}},
        {{"A", "B", 1.0}, {"B", "C", 1.0}});
    auto est = run_simulation(g, {100, 0.5, 3, 1});

    SectorSpec spec;
    spec.firms = {"C"};
    spec.size_values["C"] = 1.0;
    auto agg = aggregate_indices(est, spec, sector_weights(spec));

    REQUIRE(agg.rows.size() == 2);
    double a_npi_B = 0, a_npf_A = 0, a_npf_B = 0;
    for (const auto& row : agg.rows) {
        if (row.investor == "A") a_npf_A = row.a_npf_unweighted;
        if (row.investor == "B") {
            a_npi_B = row.a_npi;
            a_npf_B = row.a_npf_unweighted;
        }
    }
    CHECK(a_npf_A == 1.0);
    CHECK(a_npf_B == 1.0);
    CHECK(a_npi_B == 0.0);
}

TEST_CASE("partition identity and eq-1 cross-check on a simulated sector") {
    auto net = ownet::testing::make_network(21);
    auto g = impute(net.build(), {ScenarioKind::S4PrivateProportional, 20});
    auto est = run_simulation(g, {500, 0.5, 11, 2}, &net.sector);
    auto weights = sector_weights(net.sector);
    auto agg = aggregate_indices(est, net.sector, weights);

    // Unweighted a_npi adds up to |V| exactly, in integer run counts.
    std::uint64_t npi_total = 0;
    double a_npi_sum = 0.0;
    double weighted_sum = 0.0;
    for (const auto& row : agg.rows) {
        npi_total += row.npi_run_total;
        a_npi_sum += row.a_npi;
        weighted_sum += row.a_npi_weighted;
        CHECK(row.a_npf_unweighted >= row.a_npi);
        CHECK(row.a_npf_weighted >= row.a_npi_weighted - 1e-15);
    }
    CHECK(npi_total == est.runs * net.sector.firms.size());
    CHECK(std::abs(a_npi_sum - static_cast<double>(net.sector.firms.size())) <=
          1e-9);
    CHECK(std::abs(weighted_sum - 1.0) <= 1e-9);

    // The run-average of per-run controlled-firm counts equals a_npi.
    REQUIRE(est.sector_tracked);
    for (const auto& row : agg.rows) {
        auto it = est.sector_run_totals.find(row.investor);
        std::uint64_t tally = it == est.sector_run_totals.end() ? 0 : it->second;
        CHECK(tally == row.npi_run_total);
        if (tally > 0) {
            CHECK(std::abs(row.a_npi - static_cast<double>(tally) /
                                           static_cast<double>(est.runs)) <=
                  1e-12);
        }
    }
    for (const auto& [investor, tally] : est.sector_run_totals) {
        bool found = false;
        for (const auto& row : agg.rows) {
            if (row.investor == investor) {
                found = row.npi_run_total == tally;
                break;
            }
        }
        CHECK(found);
    }
}

TEST_CASE("adding a firm to the sector never decreases unweighted indices") {
    auto net = ownet::testing::make_network(23);
    auto g = impute(net.build(), {ScenarioKind::S4PrivateProportional, 20});

    SectorSpec small = net.sector;
    small.firms.pop_back();
    auto est = run_simulation(g, {300, 0.5, 5, 1});

    auto agg_small = aggregate_indices(est, small, sector_weights(small));
    auto agg_full =
        aggregate_indices(est, net.sector, sector_weights(net.sector));

    for (const auto& before : agg_small.rows) {
        for (const auto& after : agg_full.rows) {
            if (after.investor != before.investor) continue;
            CHECK(after.npi_run_total >= before.npi_run_total);
            CHECK(after.npf_run_total >= before.npf_run_total);
        }
    }
}

TEST_CASE("integrated ownership sums walk products") {
    SUBCASE("single path") {
        auto g = OwnershipGraph::build(
            2024,
            {{"A", "", NodeKind::InvestorPrivate, "US"},
             {"B", "", NodeKind::Firm, "IT"},
             {"C", "", NodeKind::Firm, "IT"}},
            {{"A", "B", 0.5}, {"B", "C", 0.4}});
        SectorSpec spec;
        spec.firms = {"C"};
        spec.size_values["C"] = 1.0;
        auto flow = integrated_ownership(g, spec);
        CHECK(flow.at({"A", "C"}) == doctest::Approx(0.20).epsilon(1e-12));
        CHECK(flow.at({"B", "C"}) == doctest::Approx(0.40).epsilon(1e-12));
    }
    SUBCASE("direct plus indirect path") {
        auto g = OwnershipGraph::build(
            2024,
            {{"A", "", NodeKind::InvestorPrivate, "US"},
             {"B", "", NodeKind::Firm, "IT"},
             {"C", "", NodeKind::Firm, "IT"}},
            {{"A", "C", 0.5}, {"A", "B", 0.5}, {"B", "C", 0.4}});
        SectorSpec spec;
        spec.firms = {"C"};
        spec.size_values["C"] = 1.0;
        auto flow = integrated_ownership(g, spec);
        CHECK(flow.at({"A", "C"}) == doctest::Approx(0.70).epsilon(1e-12));
    }
    SUBCASE("cross-holding resolves the geometric series") {
        auto g = OwnershipGraph::build(
            2024,
            {{"E", "", NodeKind::InvestorPrivate, "US"},
             {"X", "", NodeKind::Firm, "IT"},
             {"Y", "", NodeKind::Firm, "IT"}},
            {{"E", "X", 0.5}, {"X", "Y", 0.5}, {"Y", "X", 0.5}});
        SectorSpec spec;
        spec.firms = {"X", "Y"};
        spec.size_values = {{"X", 1.0}, {"Y", 1.0}};
        auto flow = integrated_ownership(g, spec);
        CHECK(flow.at({"E", "X"}) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
        CHECK(flow.at({"E", "Y"}) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));

        // Depth-20 truncated walk enumeration agrees to the geometric tail.
        auto e = g.require("E");
        CHECK(std::abs(flow.at({"E", "X"}) -
                       enumerate_walks(g, e, g.require("X"), 20)) <= 1e-5);
        CHECK(std::abs(flow.at({"E", "Y"}) -
                       enumerate_walks(g, e, g.require("Y"), 20)) <= 1e-5);
    }
    SUBCASE("acyclic graphs match exhaustive path enumeration") {
        auto net = ownet::testing::make_network(31);
        auto g = net.build();
        auto flow = integrated_ownership(g, net.sector);
        for (const auto& firm : net.sector.firms) {
            auto j = g.require(firm);
            for (std::uint32_t i = 0; i < g.node_count(); ++i) {
                double brute =
                    enumerate_walks(g, i, j, static_cast<int>(g.node_count()));
                auto it = flow.find({g.node(i).id, firm});
                double fast = it == flow.end() ? 0.0 : it->second;
                CHECK(std::abs(fast - brute) <= 1e-12);
            }
        }
    }
    SUBCASE("a closed 100% cycle is a numeric error naming the cycle") {
        auto g = OwnershipGraph::build(2024,
                                       {{"X", "", NodeKind::Firm, "IT"},
                                        {"Y", "", NodeKind::Firm, "IT"}},
                                       {{"X", "Y", 1.0}, {"Y", "X", 1.0}});
        SectorSpec spec;
        spec.firms = {"X"};
        spec.size_values["X"] = 1.0;
        CHECK_THROWS_WITH_AS(integrated_ownership(g, spec),
                             doctest::Contains("X, Y"), NumericError);
    }
}

TEST_CASE("baseline concentration") {
    SUBCASE("0.5 / 0.3 / 0.2") {
        auto r = baseline_concentration({{"A", 0.5}, {"B", 0.3}, {"C", 0.2}});
        CHECK(r.hhi == doctest::Approx(3800.0).epsilon(1e-12));
        CHECK(r.cr3 == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("monopoly") {
        auto r = baseline_concentration({{"A", 1.0}});
        CHECK(r.hhi == 10000.0);
        CHECK(r.cr3 == 1.0);
    }
    SUBCASE("ten equal shares") {
        std::vector<std::pair<NodeId, double>> shares;
        for (int k = 0; k < 10; ++k) {
            shares.emplace_back("S" + std::to_string(k), 0.1);
        }
        auto r = baseline_concentration(shares);
        CHECK(r.hhi == doctest::Approx(1000.0).epsilon(1e-12));
        CHECK(r.cr3 == doctest::Approx(0.3).epsilon(1e-12));
    }
    SUBCASE("invalid inputs") {
        CHECK_THROWS_AS(baseline_concentration({}), InputError);
        CHECK_THROWS_AS(baseline_concentration({{"A", 0.0}}), InputError);
        CHECK_THROWS_AS(baseline_concentration({{"A", 0.7}, {"B", 0.5}}),
                        InputError);
    }
}
