#include <doctest.h>

#include <cmath>

#include "ownet/export.hpp"
#include "ownet/imputation.hpp"

#include "../common/synthetic.hpp"

using namespace ownet;

namespace {

// One firm with a 60%-known register: State 0.30, PrivA 0.20, PrivB 0.10.
OwnershipGraph worked_example() {
    return OwnershipGraph::build(
        2024,
        {{"State", "Ministry", NodeKind::InvestorState, "IT"},
         {"PrivA", "Fund A", NodeKind::InvestorPrivate, "US"},
         {"PrivB", "Fund B", NodeKind::InvestorPrivate, "US"},
         {"T", "Target", NodeKind::Firm, "IT"}},
        {{"State", "T", 0.30}, {"PrivA", "T", 0.20}, {"PrivB", "T", 0.10}});
}

double holder_fraction(const OwnershipGraph& g, const NodeId& holder,
                       const NodeId& held) {
    auto j = g.require(held);
    for (const auto& h : g.holders_of(j)) {
        if (g.node(h.node).id == holder) return h.fraction;
    }
    return 0.0;
}

} // namespace

TEST_CASE("s4 redistributes missing mass among private holders") {
    auto g = worked_example();
    auto out = impute(g, {ScenarioKind::S4PrivateProportional, 100});

    CHECK(holder_fraction(out, "State", "T") == 0.30); // exactly preserved
    CHECK(holder_fraction(out, "PrivA", "T") == doctest::Approx(0.4667).epsilon(1e-3));
    CHECK(holder_fraction(out, "PrivB", "T") == doctest::Approx(0.2333).epsilon(1e-3));
    CHECK(std::abs(out.incoming_sum(out.require("T")) - 1.0) <= 1e-9);
    CHECK(out.node_count() == g.node_count()); // no synthetic holders
}

TEST_CASE("s1 renormalizes the known register") {
    auto g = worked_example();
    auto out = impute(g, {ScenarioKind::S1Renormalize, 100});

    CHECK(holder_fraction(out, "State", "T") == doctest::Approx(0.50));
    CHECK(holder_fraction(out, "PrivA", "T") == doctest::Approx(1.0 / 3.0));
    CHECK(holder_fraction(out, "PrivB", "T") == doctest::Approx(1.0 / 6.0));
    CHECK(std::abs(out.incoming_sum(out.require("T")) - 1.0) <= 1e-9);
}

TEST_CASE("s2 creates an ocean of equal synthetic holders") {
    auto g = worked_example();
    auto out = impute(g, {ScenarioKind::S2Ocean, 100});

    auto t = out.require("T");
    CHECK(out.holders_of(t).size() == 3 + 100);
    std::size_t synthetic = 0;
    for (const auto& h : out.holders_of(t)) {
        if (out.node(h.node).kind == NodeKind::FloatSynthetic) {
            ++synthetic;
            CHECK(h.fraction == doctest::Approx(0.4 / 100).epsilon(1e-12));
        }
    }
    CHECK(synthetic == 100);
    CHECK(out.contains("T#float1"));
    CHECK(out.contains("T#float100"));
    CHECK(std::abs(out.incoming_sum(t) - 1.0) <= 1e-9);
}

TEST_CASE("complete registers pass through unchanged") {
    auto g = OwnershipGraph::build(
        2024,
        {{"A", "", NodeKind::InvestorPrivate, "US"},
         {"B", "", NodeKind::InvestorPrivate, "US"},
         {"T", "", NodeKind::Firm, "IT"}},
        {{"A", "T", 0.6}, {"B", "T", 0.4}});
    for (auto kind : {ScenarioKind::S1Renormalize, ScenarioKind::S2Ocean,
                      ScenarioKind::S4PrivateProportional}) {
        auto out = impute(g, {kind, 100});
        CHECK(out.node_count() == 3);
        CHECK(holder_fraction(out, "A", "T") == 0.6);
        CHECK(holder_fraction(out, "B", "T") == 0.4);
    }
}

TEST_CASE("s4 falls back to the ocean when no private holders exist") {
    auto g = OwnershipGraph::build(
        2024,
        {{"State", "", NodeKind::InvestorState, "IT"},
         {"T", "", NodeKind::Firm, "IT"}},
        {{"State", "T", 0.7}});
    std::vector<std::string> warnings;
    auto out = impute(g, {ScenarioKind::S4PrivateProportional, 10}, &warnings);

    CHECK(holder_fraction(out, "State", "T") == 0.7);
    CHECK(out.holders_of(out.require("T")).size() == 11);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("no private holders") != std::string::npos);

    auto report = imputation_report(g, out, {ScenarioKind::S4PrivateProportional, 10});
    REQUIRE(report.records.size() == 1);
    CHECK(report.records[0].firm == "T");
    CHECK(report.records[0].ocean_fallback);
    CHECK(report.records[0].synthetic_added == 10);
}

TEST_CASE("s4 without any investor classification is a contract error") {
    auto g = OwnershipGraph::build(2024,
                                   {{"M", "", NodeKind::Firm, "IT"},
                                    {"T", "", NodeKind::Firm, "IT"}},
                                   {{"M", "T", 0.5}});
    CHECK_THROWS_AS(impute(g, {ScenarioKind::S4PrivateProportional, 100}),
                    ContractError);
    CHECK_NOTHROW(impute(g, {ScenarioKind::S2Ocean, 100}));
}

TEST_CASE("imputation report on a complete graph is empty") {
    auto g = OwnershipGraph::build(
        2024,
        {{"A", "", NodeKind::InvestorPrivate, "US"},
         {"T", "", NodeKind::Firm, "IT"}},
        {{"A", "T", 1.0}});
    ImputationScenario scenario{ScenarioKind::S2Ocean, 100};
    auto out = impute(g, scenario);
    CHECK(imputation_report(g, out, scenario).records.empty());
}

TEST_CASE("imputation is deterministic and closes every register") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        auto net = ownet::testing::make_network(seed);
        auto g = net.build();
        for (auto kind : {ScenarioKind::S1Renormalize, ScenarioKind::S2Ocean,
                          ScenarioKind::S4PrivateProportional}) {
            ImputationScenario scenario{kind, 25};
            auto a = impute(g, scenario);
            auto b = impute(g, scenario);
            CHECK(export_graph(a, {}, ExportFormat::Json) ==
                  export_graph(b, {}, ExportFormat::Json));
            for (std::uint32_t j = 0; j < a.node_count(); ++j) {
                if (a.holders_of(j).empty()) continue;
                CHECK(std::abs(a.incoming_sum(j) - 1.0) <= 1e-9);
            }
        }
    }
}

TEST_CASE("s4 preserves non-private stakes exactly, s1 preserves ratios") {
    auto net = ownet::testing::make_network(17);
    auto g = net.build();

    auto s4 = impute(g, {ScenarioKind::S4PrivateProportional, 50});
    for (std::uint32_t j = 0; j < g.node_count(); ++j) {
        const auto& id = g.node(j).id;
        for (const auto& h : g.holders_of(j)) {
            if (g.node(h.node).kind != NodeKind::InvestorPrivate) {
                CHECK(holder_fraction(s4, g.node(h.node).id, id) == h.fraction);
            }
        }
    }

    auto s1 = impute(g, {ScenarioKind::S1Renormalize, 50});
    for (std::uint32_t j = 0; j < g.node_count(); ++j) {
        auto holders = g.holders_of(j);
        if (holders.size() < 2) continue;
        const auto& id = g.node(j).id;
        double before = holders[0].fraction / holders[1].fraction;
        double after = holder_fraction(s1, g.node(holders[0].node).id, id) /
                       holder_fraction(s1, g.node(holders[1].node).id, id);
        CHECK(after == doctest::Approx(before).epsilon(1e-12));
    }
}
