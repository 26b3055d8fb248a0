#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <random>

#include "ownet/export.hpp"
#include "ownet/graph.hpp"
#include "ownet/io.hpp"

#include "../common/synthetic.hpp"
#include "../common/temp.hpp"

using namespace ownet;
using ownet::testing::TempDir;

namespace {

const char* kNodesCsv =
    "id,name,kind,country\n"
    "A,Alpha Fund,investor-private,US\n"
    "B,Beta Fund,investor-private,GB\n"
    "T,Target SpA,firm,IT\n";

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

// Ring of n nodes plus chords until `edges` edges in total; connected, with
// every incoming sum far below 1.
OwnershipGraph ring_graph(std::size_t n, std::size_t edges) {
    std::vector<NodeRecord> nodes;
    for (std::size_t i = 0; i < n; ++i) {
        nodes.push_back({ownet::testing::padded_id("N", i), "", NodeKind::Firm, "IT"});
    }
    std::vector<OwnershipEdge> out;
    for (std::size_t i = 0; i < n && out.size() < edges; ++i) {
        out.push_back({nodes[i].id, nodes[(i + 1) % n].id, 0.001});
    }
    std::size_t step = 2;
    std::size_t i = 0;
    while (out.size() < edges) {
        out.push_back({nodes[i].id, nodes[(i + step) % n].id, 0.001});
        i += 3;
        if (i >= n) {
            i = i % n + 1;
            ++step;
        }
    }
    return OwnershipGraph::build(2024, std::move(nodes), std::move(out));
}

} // namespace

TEST_CASE("load_graph constructs a validated snapshot") {
    TempDir dir;
    auto nodes = dir.file("nodes.csv", kNodesCsv);
    auto edges = dir.file("edges.csv",
                          "holder_id,held_id,fraction\n"
                          "A,T,0.30\n"
                          "B,T,0.25\n");
    auto graph = load_graph(nodes, edges, 2024);
    CHECK(graph.node_count() == 3);
    CHECK(graph.edge_count() == 2);
    CHECK(graph.year() == 2024);
    CHECK(graph.incoming_sum(graph.require("T")) == doctest::Approx(0.55));
}

TEST_CASE("load_graph drops self-holdings with a warning") {
    TempDir dir;
    auto nodes = dir.file("nodes.csv", kNodesCsv);
    auto edges = dir.file("edges.csv",
                          "holder_id,held_id,fraction\n"
                          "A,T,0.30\n"
                          "T,T,0.05\n");
    std::vector<std::string> warnings;
    auto graph = load_graph(nodes, edges, 2024, &warnings);
    CHECK(graph.edge_count() == 1);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("self-holding") != std::string::npos);
}

TEST_CASE("load_graph merges duplicate holder rows") {
    TempDir dir;
    auto nodes = dir.file("nodes.csv", kNodesCsv);
    auto edges = dir.file("edges.csv",
                          "holder_id,held_id,fraction\n"
                          "A,T,0.10\n"
                          "A,T,0.05\n");
    auto graph = load_graph(nodes, edges, 2024);
    CHECK(graph.edge_count() == 1);
    auto holders = graph.holders_of(graph.require("T"));
    REQUIRE(holders.size() == 1);
    CHECK(holders[0].fraction == doctest::Approx(0.15));
}

TEST_CASE("load_graph rejects malformed input with line numbers") {
    TempDir dir;
    auto nodes = dir.file("nodes.csv", kNodesCsv);

    SUBCASE("wrong column count") {
        auto edges = dir.file("edges.csv",
                              "holder_id,held_id,fraction\nA,T\n");
        CHECK_THROWS_WITH_AS(load_graph(nodes, edges, 2024),
                             doctest::Contains("edges.csv:2"), InputError);
    }
    SUBCASE("non-numeric fraction") {
        auto edges = dir.file("edges.csv",
                              "holder_id,held_id,fraction\nA,T,lots\n");
        CHECK_THROWS_WITH_AS(load_graph(nodes, edges, 2024),
                             doctest::Contains("non-numeric fraction"),
                             InputError);
    }
    SUBCASE("fraction outside (0,1]") {
        auto zero = dir.file("e0.csv", "holder_id,held_id,fraction\nA,T,0\n");
        CHECK_THROWS_AS(load_graph(nodes, zero, 2024), InputError);
        auto big = dir.file("e1.csv", "holder_id,held_id,fraction\nA,T,1.5\n");
        CHECK_THROWS_AS(load_graph(nodes, big, 2024), InputError);
    }
    SUBCASE("unknown node in an edge") {
        auto edges = dir.file("edges.csv",
                              "holder_id,held_id,fraction\nA,Ghost,0.2\n");
        CHECK_THROWS_WITH_AS(load_graph(nodes, edges, 2024),
                             doctest::Contains("Ghost"), InputError);
    }
    SUBCASE("over-subscribed register") {
        auto edges = dir.file("edges.csv",
                              "holder_id,held_id,fraction\n"
                              "A,T,0.80\nB,T,0.30\n");
        CHECK_THROWS_WITH_AS(load_graph(nodes, edges, 2024),
                             doctest::Contains("T"), InputError);
    }
    SUBCASE("unknown node kind") {
        auto bad = dir.file("n.csv", "id,name,kind,country\nA,Alpha,bank,US\n");
        auto edges = dir.file("edges.csv", "holder_id,held_id,fraction\n");
        CHECK_THROWS_WITH_AS(load_graph(bad, edges, 2024),
                             doctest::Contains("bank"), InputError);
    }
    SUBCASE("float-synthetic rejected in registry input") {
        auto bad = dir.file(
            "n.csv", "id,name,kind,country\nA,Alpha,float-synthetic,US\n");
        auto edges = dir.file("edges.csv", "holder_id,held_id,fraction\n");
        CHECK_THROWS_AS(load_graph(bad, edges, 2024), InputError);
    }
    SUBCASE("missing edges file") {
        CHECK_THROWS_AS(load_graph(nodes, dir.path() / "nope.csv", 2024),
                        InputError);
    }
}

TEST_CASE("graph_stats matches the fixture rows at displayed precision") {
    SUBCASE("86 nodes, 98 edges") {
        auto g = ring_graph(86, 98);
        auto s = graph_stats(g);
        CHECK(s.nodes == 86);
        CHECK(s.edges == 98);
        CHECK(fmt("%.4f", s.density) == "0.0134");
        CHECK(fmt("%.2f", s.avg_degree) == "2.28");
        CHECK(s.components == 1);
    }
    SUBCASE("281 nodes, 309 edges") {
        auto g = ring_graph(281, 309);
        auto s = graph_stats(g);
        CHECK(fmt("%.4f", s.density) == "0.0039");
        CHECK(fmt("%.2f", s.avg_degree) == "2.20");
    }
}

TEST_CASE("graph_stats invariants") {
    auto net = ownet::testing::make_network(7);
    auto g = net.build();
    auto s = graph_stats(g);

    double n = static_cast<double>(s.nodes);
    CHECK(std::abs(s.density - static_cast<double>(s.edges) / (n * (n - 1.0))) <=
          1e-12);
    CHECK(s.min_degree <= s.avg_degree);
    CHECK(s.avg_degree <= static_cast<double>(s.max_degree));

    std::size_t degree_sum = 0;
    for (std::uint32_t i = 0; i < g.node_count(); ++i) {
        degree_sum += g.holders_of(i).size() + g.holdings_of(i).size();
    }
    CHECK(degree_sum == 2 * s.edges);
}

TEST_CASE("graph_stats degenerate graphs") {
    SUBCASE("empty graph yields zeros") {
        auto g = OwnershipGraph::build(2024, {}, {});
        auto s = graph_stats(g);
        CHECK(s.nodes == 0);
        CHECK(s.edges == 0);
        CHECK(s.density == 0.0);
        CHECK(s.components == 0);
    }
    SUBCASE("single isolated node") {
        auto g = OwnershipGraph::build(
            2024, {{"A", "Alpha", NodeKind::Firm, "IT"}}, {});
        auto s = graph_stats(g);
        CHECK(s.density == 0.0);
        CHECK(s.components == 1);
        CHECK(s.min_degree == 0);
        CHECK(s.max_degree == 0);
        CHECK(s.avg_degree == 0.0);
    }
}

TEST_CASE("export formats") {
    auto g = OwnershipGraph::build(
        2024,
        {{"A", "Alpha", NodeKind::InvestorPrivate, "US"},
         {"T", "Target", NodeKind::Firm, "IT"}},
        {{"A", "T", 0.4}});

    SUBCASE("dot contains both ids and one directed edge") {
        auto text = export_graph(g, {}, ExportFormat::Dot);
        CHECK(text.find("\"A\"") != std::string::npos);
        CHECK(text.find("\"T\"") != std::string::npos);
        CHECK(text.find("\"A\" -> \"T\"") != std::string::npos);
    }
    SUBCASE("same graph exports identical bytes") {
        for (auto format :
             {ExportFormat::Dot, ExportFormat::GraphML, ExportFormat::Json}) {
            CHECK(export_graph(g, {}, format) == export_graph(g, {}, format));
        }
    }
    SUBCASE("annotations are carried, absent nodes get zeros") {
        auto text = export_graph(g, {{"A", {0.5, 0.75}}}, ExportFormat::Json);
        CHECK(text.find("0.75") != std::string::npos);
    }
    SUBCASE("annotation for unknown node is rejected") {
        CHECK_THROWS_WITH_AS(
            export_graph(g, {{"Ghost", {1.0, 1.0}}}, ExportFormat::Dot),
            doctest::Contains("Ghost"), InputError);
    }
    SUBCASE("unknown format label is a usage error") {
        CHECK_THROWS_AS(parse_export_format("yaml"), InputError);
    }
}

TEST_CASE("json export round-trips losslessly") {
    auto net = ownet::testing::make_network(11);
    auto g = net.build();

    TempDir dir;
    auto first = export_graph(g, {}, ExportFormat::Json);
    auto path = dir.file("graph.json", first);
    auto reloaded = load_graph_json(path);
    auto second = export_graph(reloaded, {}, ExportFormat::Json);
    CHECK(first == second);
    CHECK(reloaded.node_count() == g.node_count());
    CHECK(reloaded.edge_count() == g.edge_count());
}

TEST_CASE("graph construction is input-order invariant") {
    auto net = ownet::testing::make_network(13);
    auto baseline =
        export_graph(net.build(), {}, ExportFormat::Json);

    std::mt19937 shuffler(99);
    for (int round = 0; round < 5; ++round) {
        auto nodes = net.nodes;
        auto edges = net.edges;
        std::shuffle(nodes.begin(), nodes.end(), shuffler);
        std::shuffle(edges.begin(), edges.end(), shuffler);
        auto g = OwnershipGraph::build(2024, std::move(nodes), std::move(edges));
        CHECK(export_graph(g, {}, ExportFormat::Json) == baseline);
    }
}

TEST_CASE("duplicate node ids are rejected") {
    CHECK_THROWS_AS(
        OwnershipGraph::build(2024,
                              {{"A", "", NodeKind::Firm, "IT"},
                               {"A", "", NodeKind::Firm, "IT"}},
                              {}),
        InputError);
}
