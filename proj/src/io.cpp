#include "ownet/io.hpp"

#include <charconv>
#include <fstream>

#include <json.hpp>

#include "ownet/csv.hpp"
#include "ownet/errors.hpp"

namespace ownet {

namespace {

std::vector<std::string> read_lines(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw InputError("cannot open file: " + file.string());
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

[[noreturn]] void row_error(const std::filesystem::path& file, std::size_t lineno,
                            const std::string& what) {
    throw InputError(file.filename().string() + ":" + std::to_string(lineno) +
                     ": " + what);
}

double parse_fraction(const std::string& text, const std::filesystem::path& file,
                      std::size_t lineno) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        row_error(file, lineno, "non-numeric fraction '" + text + "'");
    }
    if (!(value > 0.0) || value > 1.0) {
        row_error(file, lineno,
                  "fraction " + text + " outside (0,1]");
    }
    return value;
}

void expect_header(const std::vector<std::string>& lines,
                   const std::filesystem::path& file, const char* expected) {
    if (lines.empty()) {
        throw InputError(file.filename().string() + ": empty file, expected header `" +
                         std::string(expected) + "`");
    }
    auto fields = split_csv_line(lines[0]);
    auto want = split_csv_line(expected);
    if (fields != want) {
        row_error(file, 1, "expected header `" + std::string(expected) + "`");
    }
}

} // namespace

OwnershipGraph load_graph(const std::filesystem::path& nodes_file,
                          const std::filesystem::path& edges_file,
                          int year,
                          std::vector<std::string>* warnings) {
    auto node_lines = read_lines(nodes_file);
    expect_header(node_lines, nodes_file, "id,name,kind,country");

    std::vector<NodeRecord> nodes;
    nodes.reserve(node_lines.size());
    for (std::size_t i = 1; i < node_lines.size(); ++i) {
        if (node_lines[i].empty()) continue;
        auto f = split_csv_line(node_lines[i]);
        if (f.size() != 4) {
            row_error(nodes_file, i + 1,
                      "expected 4 columns, got " + std::to_string(f.size()));
        }
        if (f[0].empty()) row_error(nodes_file, i + 1, "empty node id");
        auto kind = parse_node_kind(f[2]);
        if (!kind) {
            row_error(nodes_file, i + 1, "unknown node kind '" + f[2] + "'");
        }
        if (*kind == NodeKind::FloatSynthetic) {
            row_error(nodes_file, i + 1,
                      "float-synthetic nodes cannot appear in registry input");
        }
        nodes.push_back({f[0], f[1], *kind, f[3].empty() ? "unknown" : f[3]});
    }

    auto edge_lines = read_lines(edges_file);
    expect_header(edge_lines, edges_file, "holder_id,held_id,fraction");

    std::vector<OwnershipEdge> edges;
    edges.reserve(edge_lines.size());
    for (std::size_t i = 1; i < edge_lines.size(); ++i) {
        if (edge_lines[i].empty()) continue;
        auto f = split_csv_line(edge_lines[i]);
        if (f.size() != 3) {
            row_error(edges_file, i + 1,
                      "expected 3 columns, got " + std::to_string(f.size()));
        }
        edges.push_back({f[0], f[1], parse_fraction(f[2], edges_file, i + 1)});
    }

    return OwnershipGraph::build(year, std::move(nodes), std::move(edges), warnings);
}

OwnershipGraph load_graph_json(const std::filesystem::path& file,
                               std::vector<std::string>* warnings) {
    std::ifstream in(file);
    if (!in) {
        throw InputError("cannot open file: " + file.string());
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(file.filename().string() + ": " + e.what());
    }
    try {
        int year = doc.at("year").get<int>();
        std::vector<NodeRecord> nodes;
        for (const auto& n : doc.at("nodes")) {
            auto kind = parse_node_kind(n.at("kind").get<std::string>());
            if (!kind) {
                throw InputError(file.filename().string() + ": unknown node kind '" +
                                 n.at("kind").get<std::string>() + "'");
            }
            nodes.push_back({n.at("id").get<std::string>(),
                             n.at("name").get<std::string>(), *kind,
                             n.at("country").get<std::string>()});
        }
        std::vector<OwnershipEdge> edges;
        for (const auto& e : doc.at("edges")) {
            edges.push_back({e.at("holder").get<std::string>(),
                             e.at("held").get<std::string>(),
                             e.at("fraction").get<double>()});
        }
        return OwnershipGraph::build(year, std::move(nodes), std::move(edges),
                                     warnings);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(file.filename().string() + ": " + e.what());
    }
}

SectorSpec load_sector(const std::filesystem::path& file,
                       const std::string& size_variable_name) {
    auto lines = read_lines(file);
    expect_header(lines, file, "firm_id,size_value");

    SectorSpec spec;
    spec.size_variable_name = size_variable_name;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto f = split_csv_line(lines[i]);
        if (f.size() != 2) {
            row_error(file, i + 1,
                      "expected 2 columns, got " + std::to_string(f.size()));
        }
        if (f[0].empty()) row_error(file, i + 1, "empty firm id");
        double value = 0.0;
        auto [ptr, ec] =
            std::from_chars(f[1].data(), f[1].data() + f[1].size(), value);
        if (ec != std::errc{} || ptr != f[1].data() + f[1].size()) {
            row_error(file, i + 1, "non-numeric size value '" + f[1] + "'");
        }
        if (value < 0.0) {
            row_error(file, i + 1, "negative size value");
        }
        if (spec.size_values.count(f[0])) {
            row_error(file, i + 1, "duplicate firm " + f[0]);
        }
        spec.firms.push_back(f[0]);
        spec.size_values[f[0]] = value;
    }
    if (spec.firms.empty()) {
        throw InputError(file.filename().string() + ": no firms listed");
    }
    return spec;
}

std::vector<std::pair<NodeId, double>> load_register(
    const std::filesystem::path& file) {
    auto lines = read_lines(file);
    expect_header(lines, file, "holder_id,fraction");

    std::vector<std::pair<NodeId, double>> holders;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto f = split_csv_line(lines[i]);
        if (f.size() != 2) {
            row_error(file, i + 1,
                      "expected 2 columns, got " + std::to_string(f.size()));
        }
        holders.emplace_back(f[0], parse_fraction(f[1], file, i + 1));
    }
    return holders;
}

} // namespace ownet
