// ownet: ownership-network power toolkit.
//
// One binary, many subcommands: ingest, stats, impute, power, aggregate,
// groups, export, pipeline, oracle-check. Every analytics output lands in
// --out-dir together with a manifest recording inputs, parameters, and
// fingerprints, so results can be reproduced bit-for-bit from the manifest.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ownet/aggregate.hpp"
#include "ownet/csv.hpp"
#include "ownet/errors.hpp"
#include "ownet/export.hpp"
#include "ownet/graph.hpp"
#include "ownet/groups.hpp"
#include "ownet/imputation.hpp"
#include "ownet/io.hpp"
#include "ownet/manifest.hpp"
#include "ownet/power.hpp"
#include "ownet/version.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string g_stage = "cli";

void set_stage(const char* stage) { g_stage = stage; }

int exit_code_for(const char* status) {
    if (std::strcmp(status, "input error") == 0) return 2;
    if (std::strcmp(status, "contract error") == 0) return 3;
    if (std::strcmp(status, "numeric error") == 0) return 4;
    return 1;
}

void emit_error(const char* status, const std::string& message) {
    ordered_json err = {
        {"status", status}, {"stage", g_stage}, {"message", message}};
    std::cerr << err.dump() << "\n";
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

// Artifacts are accumulated in memory and written only once every stage has
// succeeded, so a failing stage leaves no partial unmanifested outputs.
struct OutputSet {
    fs::path dir;
    std::vector<std::pair<std::string, std::string>> files;

    void add(std::string name, std::string content) {
        files.emplace_back(std::move(name), std::move(content));
    }

    std::vector<std::string> write() const {
        fs::create_directories(dir);
        std::vector<std::string> names;
        for (const auto& [name, content] : files) {
            std::ofstream out(dir / name, std::ios::binary);
            if (!out) {
                throw ownet::InputError("cannot write " + (dir / name).string());
            }
            out << content;
            names.push_back(name);
        }
        return names;
    }
};

void finish(const OutputSet& outputs, ownet::RunManifest manifest) {
    set_stage("write");
    manifest.tool_version = ownet::kVersion;
    manifest.timestamp = ownet::timestamp_utc();
    manifest.outputs = outputs.write();
    std::ofstream out(outputs.dir / "manifest.json", std::ios::binary);
    if (!out) {
        throw ownet::InputError("cannot write " +
                                (outputs.dir / "manifest.json").string());
    }
    out << to_json(manifest).dump(2) << "\n";
    for (const auto& name : manifest.outputs) {
        std::cerr << "wrote " << (outputs.dir / name).string() << "\n";
    }
    std::cerr << "wrote " << (outputs.dir / "manifest.json").string() << "\n";
}

ordered_json stats_json(const ownet::GraphStats& s) {
    return {{"nodes", s.nodes},
            {"edges", s.edges},
            {"density", s.density},
            {"components", s.components},
            {"min_degree", s.min_degree},
            {"max_degree", s.max_degree},
            {"avg_degree", s.avg_degree}};
}

ordered_json imputation_report_json(const ownet::ImputationReport& report) {
    ordered_json firms = ordered_json::array();
    for (const auto& rec : report.records) {
        firms.push_back({{"firm", rec.firm},
                         {"missing_mass", rec.missing_mass},
                         {"synthetic_added", rec.synthetic_added},
                         {"ocean_fallback", rec.ocean_fallback}});
    }
    return {{"scenario", to_string(report.scenario)},
            {"ocean_slices", report.ocean_slices},
            {"firms", firms}};
}

std::string power_csv(const ownet::PowerEstimates& estimates) {
    std::string out = "investor_id,firm_id,tnpi,tnpf,se_tnpi\n";
    const auto runs = static_cast<double>(estimates.runs);
    for (const auto& cell : estimates.cells) {
        double tnpi = static_cast<double>(cell.npi_count) / runs;
        double tnpf = static_cast<double>(cell.npf_count) / runs;
        out += ownet::csv_escape(estimates.ids[cell.investor]) + ",";
        out += ownet::csv_escape(estimates.ids[cell.firm]) + ",";
        out += ownet::format_double(tnpi) + ",";
        out += ownet::format_double(tnpf) + ",";
        out += ownet::format_double(ownet::standard_error(tnpi, estimates.runs));
        out += "\n";
    }
    return out;
}

std::string aggregate_csv(const ownet::AggregateIndices& indices) {
    std::string out =
        "investor_id,a_npi,a_npi_weighted,a_npf_unweighted,a_npf_weighted\n";
    for (const auto& row : indices.rows) {
        out += ownet::csv_escape(row.investor) + ",";
        out += ownet::format_double(row.a_npi) + ",";
        out += ownet::format_double(row.a_npi_weighted) + ",";
        out += ownet::format_double(row.a_npf_unweighted) + ",";
        out += ownet::format_double(row.a_npf_weighted) + "\n";
    }
    return out;
}

ordered_json weights_json(const ownet::SectorWeights& weights) {
    ordered_json obj = ordered_json::object();
    for (const auto& [firm, w] : weights.w) obj[firm] = w;
    return obj;
}

std::string export_extension(ownet::ExportFormat format) {
    switch (format) {
        case ownet::ExportFormat::Dot: return "dot";
        case ownet::ExportFormat::GraphML: return "graphml";
        case ownet::ExportFormat::Json: return "json";
    }
    return "json";
}

ownet::ImputationScenario make_scenario(const std::string& label,
                                        unsigned ocean_slices) {
    auto kind = ownet::parse_scenario(label);
    if (!kind) {
        throw ownet::InputError("unknown scenario '" + label +
                                "' (expected s1, s2, or s4)");
    }
    return {*kind, ocean_slices};
}

// Everything the pipeline needs; parsed from the JSON config file, then
// overridden by whichever flags were passed on the command line.
struct PipelineSettings {
    std::string nodes;
    std::string edges;
    std::string sector;
    int year = 0;
    std::string scenario = "s4";
    unsigned ocean_slices = 100;
    std::uint64_t runs = 100000;
    std::uint64_t seed = 0;
    double threshold = 0.5;
    std::string size_variable = "total_assets";
    std::optional<double> ebit_floor;
    unsigned workers = 1;
    std::string out_dir = "out";
    std::string format = "json";
};

PipelineSettings load_pipeline_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ownet::InputError("cannot open config file: " + path);
    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ownet::InputError(std::string("config: ") + e.what());
    }
    PipelineSettings s;
    for (const auto& [key, value] : doc.items()) {
        try {
            if (key == "nodes") s.nodes = value.get<std::string>();
            else if (key == "edges") s.edges = value.get<std::string>();
            else if (key == "sector") s.sector = value.get<std::string>();
            else if (key == "year") s.year = value.get<int>();
            else if (key == "scenario") s.scenario = value.get<std::string>();
            else if (key == "ocean_slices") s.ocean_slices = value.get<unsigned>();
            else if (key == "runs") s.runs = value.get<std::uint64_t>();
            else if (key == "seed") s.seed = value.get<std::uint64_t>();
            else if (key == "threshold") s.threshold = value.get<double>();
            else if (key == "size_variable")
                s.size_variable = value.get<std::string>();
            else if (key == "ebit_floor") s.ebit_floor = value.get<double>();
            else if (key == "workers") s.workers = value.get<unsigned>();
            else if (key == "out_dir") s.out_dir = value.get<std::string>();
            else if (key == "format") s.format = value.get<std::string>();
            else throw ownet::InputError("config: unknown key '" + key + "'");
        } catch (const nlohmann::json::exception& e) {
            throw ownet::InputError("config key '" + key + "': " + e.what());
        }
    }
    return s;
}

int run_pipeline(const PipelineSettings& s) {
    if (s.nodes.empty() || s.edges.empty() || s.sector.empty()) {
        throw ownet::InputError(
            "pipeline requires --nodes, --edges, and --sector (or a config "
            "file providing them)");
    }
    std::vector<std::string> warnings;

    set_stage("load");
    auto graph = ownet::load_graph(s.nodes, s.edges, s.year, &warnings);
    auto raw_stats = ownet::graph_stats(graph);

    set_stage("sector");
    auto spec = ownet::load_sector(s.sector, s.size_variable);
    ownet::validate_sector(graph, spec);

    std::vector<std::string> excluded;
    if (s.ebit_floor) {
        ownet::SectorSpec kept;
        kept.size_variable_name = spec.size_variable_name;
        for (const auto& firm : spec.firms) {
            if (spec.size_values.at(firm) > *s.ebit_floor) {
                kept.firms.push_back(firm);
                kept.size_values[firm] = spec.size_values.at(firm);
            } else {
                excluded.push_back(firm);
                warnings.push_back("firm " + firm + " excluded: " +
                                   s.size_variable + " below floor");
            }
        }
        if (kept.firms.empty()) {
            throw ownet::InputError("every sector firm falls below the floor");
        }
        spec = std::move(kept);
    }

    set_stage("impute");
    auto scenario = make_scenario(s.scenario, s.ocean_slices);
    auto imputed = ownet::impute(graph, scenario, &warnings);
    auto report = ownet::imputation_report(graph, imputed, scenario);
    auto imputed_stats = ownet::graph_stats(imputed);

    set_stage("simulate");
    ownet::McConfig mc{s.runs, s.threshold, s.seed, s.workers};
    auto estimates = ownet::run_simulation(imputed, mc, &spec);

    set_stage("aggregate");
    auto weights = ownet::sector_weights(spec);
    auto indices = ownet::aggregate_indices(estimates, spec, weights);

    set_stage("export");
    std::map<ownet::NodeId, ownet::NodeAnnotation> annotations;
    for (const auto& row : indices.rows) {
        annotations[row.investor] = {row.a_npi_weighted, row.a_npf_weighted};
    }
    auto format = ownet::parse_export_format(s.format);
    auto annotated = ownet::export_graph(imputed, annotations, format);

    OutputSet outputs;
    outputs.dir = s.out_dir;
    ordered_json stats_doc = {{"year", s.year},
                              {"raw", stats_json(raw_stats)},
                              {"imputed", stats_json(imputed_stats)}};
    outputs.add("stats.json", stats_doc.dump(2) + "\n");
    outputs.add("imputation_report.json",
                imputation_report_json(report).dump(2) + "\n");
    outputs.add("power.csv", power_csv(estimates));
    outputs.add("aggregate.csv", aggregate_csv(indices));
    outputs.add("graph_annotated." + export_extension(format), annotated);

    ownet::RunManifest manifest;
    manifest.command = "pipeline";
    manifest.inputs = {{s.nodes, ownet::file_fingerprint(s.nodes)},
                       {s.edges, ownet::file_fingerprint(s.edges)},
                       {s.sector, ownet::file_fingerprint(s.sector)}};
    manifest.scenario = s.scenario;
    manifest.ocean_slices = s.ocean_slices;
    manifest.runs = s.runs;
    manifest.threshold = s.threshold;
    manifest.master_seed = s.seed;
    manifest.size_variable = s.size_variable;
    manifest.workers = s.workers;
    // Explicit null when the filter is off: nothing affecting results may be
    // a silent default.
    manifest.extra["ebit_floor"] =
        s.ebit_floor ? ordered_json(*s.ebit_floor) : ordered_json(nullptr);
    manifest.extra["year"] = s.year;
    manifest.extra["graph_fingerprint"] = ownet::fnv1a_hex(
        ownet::export_graph(imputed, {}, ownet::ExportFormat::Json));
    manifest.extra["weights"] = weights_json(weights);
    manifest.extra["excluded_firms"] = excluded;

    print_warnings(warnings);
    finish(outputs, std::move(manifest));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ownership-network power toolkit"};
    app.set_version_flag("--version", ownet::kVersion);
    app.require_subcommand(1);

    // Shared option storage; each subcommand registers the flags it uses.
    std::string nodes_file, edges_file, sector_file, register_file;
    std::string annotations_file, config_file, target_id;
    int year = 0;
    std::string scenario = "s4";
    unsigned ocean_slices = 100;
    std::uint64_t runs = 100000;
    std::uint64_t seed = 0;
    double threshold = 0.5;
    std::string size_variable = "total_assets";
    double ebit_floor = 0.0;
    unsigned workers = 1;
    std::string out_dir = "out";
    std::string format = "json";
    bool all_firms = false;
    bool post_impute = false;

    auto add_graph_inputs = [&](CLI::App* cmd) {
        cmd->add_option("--nodes", nodes_file, "nodes CSV (id,name,kind,country)")
            ->required();
        cmd->add_option("--edges", edges_file,
                        "edges CSV (holder_id,held_id,fraction)")
            ->required();
        cmd->add_option("--year", year, "snapshot year label");
    };
    auto add_scenario_flags = [&](CLI::App* cmd) {
        cmd->add_option("--scenario", scenario, "imputation scenario: s1|s2|s4")
            ->capture_default_str();
        cmd->add_option("--ocean-slices", ocean_slices,
                        "synthetic holders per deficient firm (s2)")
            ->capture_default_str();
    };
    auto add_mc_flags = [&](CLI::App* cmd) {
        cmd->add_option("--runs", runs, "Monte Carlo runs")->capture_default_str();
        cmd->add_option("--seed", seed, "master seed")->capture_default_str();
        cmd->add_option("--threshold", threshold, "control threshold in (0,1)")
            ->capture_default_str();
        cmd->add_option("--workers", workers,
                        "worker threads (never affects results)")
            ->capture_default_str();
    };
    auto add_out_dir = [&](CLI::App* cmd) {
        cmd->add_option("--out-dir", out_dir, "output directory")
            ->capture_default_str();
    };

    auto* ingest = app.add_subcommand(
        "ingest", "validate registry files and emit the JSON graph");
    add_graph_inputs(ingest);
    add_out_dir(ingest);

    auto* stats =
        app.add_subcommand("stats", "descriptive statistics of the graph");
    add_graph_inputs(stats);
    add_out_dir(stats);

    auto* impute_cmd = app.add_subcommand(
        "impute", "complete shareholder registers to 100%");
    add_graph_inputs(impute_cmd);
    add_scenario_flags(impute_cmd);
    add_out_dir(impute_cmd);

    auto* power = app.add_subcommand(
        "power", "Monte Carlo T-NPI / T-NPF estimation");
    add_graph_inputs(power);
    add_scenario_flags(power);
    add_mc_flags(power);
    add_out_dir(power);

    auto* aggregate = app.add_subcommand(
        "aggregate", "sector-level A-NPI / A-NPF indices");
    add_graph_inputs(aggregate);
    aggregate->add_option("--sector", sector_file,
                          "sector CSV (firm_id,size_value)")
        ->required();
    aggregate->add_option("--size-variable", size_variable,
                          "name of the size variable")
        ->capture_default_str();
    add_scenario_flags(aggregate);
    add_mc_flags(aggregate);
    add_out_dir(aggregate);

    auto* groups = app.add_subcommand(
        "groups", "dominant corporate group per target firm");
    add_graph_inputs(groups);
    groups->add_option("--target", target_id, "target firm id");
    groups->add_flag("--all-firms", all_firms, "scan every firm-kind node");
    groups->add_flag("--post-impute", post_impute,
                     "run on the imputed graph instead of the raw registry");
    add_scenario_flags(groups);
    add_out_dir(groups);

    auto* export_cmd =
        app.add_subcommand("export", "serialize the graph with annotations");
    add_graph_inputs(export_cmd);
    export_cmd->add_option("--format", format, "dot|graphml|json")
        ->capture_default_str();
    export_cmd->add_option("--annotations", annotations_file,
                           "CSV id,npi,npf of node annotations");
    add_out_dir(export_cmd);

    auto* pipeline = app.add_subcommand(
        "pipeline", "load -> impute -> simulate -> aggregate -> export");
    pipeline->add_option("--config", config_file, "JSON config file");
    pipeline->add_option("--nodes", nodes_file, "nodes CSV");
    pipeline->add_option("--edges", edges_file, "edges CSV");
    pipeline->add_option("--sector", sector_file, "sector CSV");
    pipeline->add_option("--year", year, "snapshot year label");
    pipeline->add_option("--scenario", scenario, "imputation scenario: s1|s2|s4");
    pipeline->add_option("--ocean-slices", ocean_slices, "s2 granularity");
    pipeline->add_option("--runs", runs, "Monte Carlo runs");
    pipeline->add_option("--seed", seed, "master seed");
    pipeline->add_option("--threshold", threshold, "control threshold");
    pipeline->add_option("--size-variable", size_variable, "size variable name");
    pipeline->add_option("--ebit-floor", ebit_floor,
                         "exclude sector firms at or below this size value");
    pipeline->add_option("--workers", workers, "worker threads");
    pipeline->add_option("--out-dir", out_dir, "output directory");
    pipeline->add_option("--format", format, "annotated export format");

    auto* oracle = app.add_subcommand(
        "oracle-check", "exact vs Monte Carlo pivotality for one register");
    oracle->add_option("--register", register_file,
                       "holders CSV (holder_id,fraction)")
        ->required();
    oracle->add_option("--runs", runs, "Monte Carlo runs")->capture_default_str();
    oracle->add_option("--seed", seed, "master seed")->capture_default_str();
    oracle->add_option("--threshold", threshold, "control threshold in (0,1)")
        ->capture_default_str();

    try {
        app.parse(argc, argv);

        if (ingest->parsed()) {
            std::vector<std::string> warnings;
            set_stage("load");
            auto graph = ownet::load_graph(nodes_file, edges_file, year, &warnings);
            OutputSet outputs;
            outputs.dir = out_dir;
            outputs.add("graph.json",
                        ownet::export_graph(graph, {}, ownet::ExportFormat::Json));
            ownet::RunManifest manifest;
            manifest.command = "ingest";
            manifest.inputs = {
                {nodes_file, ownet::file_fingerprint(nodes_file)},
                {edges_file, ownet::file_fingerprint(edges_file)}};
            manifest.extra["year"] = year;
            print_warnings(warnings);
            std::cout << "nodes " << graph.node_count() << ", edges "
                      << graph.edge_count() << "\n";
            finish(outputs, std::move(manifest));
        } else if (stats->parsed()) {
            std::vector<std::string> warnings;
            set_stage("load");
            auto graph = ownet::load_graph(nodes_file, edges_file, year, &warnings);
            set_stage("stats");
            auto s = ownet::graph_stats(graph);
            ordered_json doc = {{"year", year}};
            doc.update(stats_json(s));
            OutputSet outputs;
            outputs.dir = out_dir;
            outputs.add("stats.json", doc.dump(2) + "\n");
            ownet::RunManifest manifest;
            manifest.command = "stats";
            manifest.inputs = {
                {nodes_file, ownet::file_fingerprint(nodes_file)},
                {edges_file, ownet::file_fingerprint(edges_file)}};
            print_warnings(warnings);
            std::cout << doc.dump(2) << "\n";
            finish(outputs, std::move(manifest));
        } else if (impute_cmd->parsed()) {
            std::vector<std::string> warnings;
            set_stage("load");
            auto graph = ownet::load_graph(nodes_file, edges_file, year, &warnings);
            set_stage("impute");
            auto sc = make_scenario(scenario, ocean_slices);
            auto imputed = ownet::impute(graph, sc, &warnings);
            auto report = ownet::imputation_report(graph, imputed, sc);
            OutputSet outputs;
            outputs.dir = out_dir;
            outputs.add("imputed.json", ownet::export_graph(
                                            imputed, {}, ownet::ExportFormat::Json));
            outputs.add("imputation_report.json",
                        imputation_report_json(report).dump(2) + "\n");
            ownet::RunManifest manifest;
            manifest.command = "impute";
            manifest.inputs = {
                {nodes_file, ownet::file_fingerprint(nodes_file)},
                {edges_file, ownet::file_fingerprint(edges_file)}};
            manifest.scenario = scenario;
            manifest.ocean_slices = ocean_slices;
            print_warnings(warnings);
            finish(outputs, std::move(manifest));
        } else if (power->parsed()) {
            std::vector<std::string> warnings;
            set_stage("load");
            auto graph = ownet::load_graph(nodes_file, edges_file, year, &warnings);
            set_stage("impute");
            auto sc = make_scenario(scenario, ocean_slices);
            auto imputed = ownet::impute(graph, sc, &warnings);
            set_stage("simulate");
            ownet::McConfig mc{runs, threshold, seed, workers};
            auto estimates = ownet::run_simulation(imputed, mc);
            OutputSet outputs;
            outputs.dir = out_dir;
            outputs.add("power.csv", power_csv(estimates));
            ownet::RunManifest manifest;
            manifest.command = "power";
            manifest.inputs = {
                {nodes_file, ownet::file_fingerprint(nodes_file)},
                {edges_file, ownet::file_fingerprint(edges_file)}};
            manifest.scenario = scenario;
            manifest.ocean_slices = ocean_slices;
            manifest.runs = runs;
            manifest.threshold = threshold;
            manifest.master_seed = seed;
            manifest.workers = workers;
            manifest.extra["graph_fingerprint"] = ownet::fnv1a_hex(
                ownet::export_graph(imputed, {}, ownet::ExportFormat::Json));
            print_warnings(warnings);
            finish(outputs, std::move(manifest));
        } else if (aggregate->parsed()) {
            PipelineSettings s;
            s.nodes = nodes_file;
            s.edges = edges_file;
            s.sector = sector_file;
            s.year = year;
            s.scenario = scenario;
            s.ocean_slices = ocean_slices;
            s.runs = runs;
            s.seed = seed;
            s.threshold = threshold;
            s.size_variable = size_variable;
            s.workers = workers;
            std::vector<std::string> warnings;
            set_stage("load");
            auto graph = ownet::load_graph(s.nodes, s.edges, s.year, &warnings);
            set_stage("sector");
            auto spec = ownet::load_sector(s.sector, s.size_variable);
            ownet::validate_sector(graph, spec);
            set_stage("impute");
            auto sc = make_scenario(s.scenario, s.ocean_slices);
            auto imputed = ownet::impute(graph, sc, &warnings);
            set_stage("simulate");
            ownet::McConfig mc{s.runs, s.threshold, s.seed, s.workers};
            auto estimates = ownet::run_simulation(imputed, mc, &spec);
            set_stage("aggregate");
            auto weights = ownet::sector_weights(spec);
            auto indices = ownet::aggregate_indices(estimates, spec, weights);
            OutputSet outputs;
            outputs.dir = out_dir;
            outputs.add("aggregate.csv", aggregate_csv(indices));
            ownet::RunManifest manifest;
            manifest.command = "aggregate";
            manifest.inputs = {
                {s.nodes, ownet::file_fingerprint(s.nodes)},
                {s.edges, ownet::file_fingerprint(s.edges)},
                {s.sector, ownet::file_fingerprint(s.sector)}};
            manifest.scenario = s.scenario;
            manifest.ocean_slices = s.ocean_slices;
            manifest.runs = s.runs;
            manifest.threshold = s.threshold;
            manifest.master_seed = s.seed;
            manifest.size_variable = s.size_variable;
            manifest.workers = s.workers;
            manifest.extra["weights"] = weights_json(weights);
            print_warnings(warnings);
            finish(outputs, std::move(manifest));
        } else if (groups->parsed()) {
            if (target_id.empty() == !all_firms) {
                throw ownet::InputError(
                    "groups requires exactly one of --target or --all-firms");
            }
            std::vector<std::string> warnings;
            set_stage("load");
            auto graph = ownet::load_graph(nodes_file, edges_file, year, &warnings);
            if (post_impute) {
                set_stage("impute");
                graph = ownet::impute(graph, make_scenario(scenario, ocean_slices),
                                      &warnings);
            }
            set_stage("groups");
            std::vector<ownet::NodeId> targets;
            if (all_firms) {
                for (const auto& n : graph.nodes()) {
                    if (n.kind == ownet::NodeKind::Firm) targets.push_back(n.id);
                }
            } else {
                targets.push_back(target_id);
            }
            auto entries = ownet::group_scan(graph, targets);

            ordered_json docs = ordered_json::array();
            std::string csv = "target,leader,count,aggregated_share,error\n";
            for (const auto& entry : entries) {
                if (!entry.error.empty()) {
                    docs.push_back(
                        {{"target", entry.target}, {"error", entry.error}});
                    csv += ownet::csv_escape(entry.target) + ",,," + "," +
                           ownet::csv_escape(entry.error) + "\n";
                    continue;
                }
                const auto& r = *entry.report;
                ordered_json doc = {{"target", r.target}};
                if (r.leader) {
                    doc["leader"] = *r.leader;
                } else {
                    doc["leader"] = nullptr;
                    doc["note"] = "no in-degree-0 ancestor";
                }
                doc["members"] = r.members;
                doc["count"] = r.count;
                doc["aggregated_share"] = r.aggregated_share;
                docs.push_back(doc);
                csv += ownet::csv_escape(r.target) + "," +
                       ownet::csv_escape(r.leader.value_or("")) + "," +
                       std::to_string(r.count) + "," +
                       ownet::format_double(r.aggregated_share) + ",\n";
            }
            OutputSet outputs;
            outputs.dir = out_dir;
            outputs.add("groups.json", docs.dump(2) + "\n");
            outputs.add("groups.csv", csv);
            ownet::RunManifest manifest;
            manifest.command = "groups";
            manifest.inputs = {
                {nodes_file, ownet::file_fingerprint(nodes_file)},
                {edges_file, ownet::file_fingerprint(edges_file)}};
            if (post_impute) {
                manifest.scenario = scenario;
                manifest.ocean_slices = ocean_slices;
            }
            print_warnings(warnings);
            finish(outputs, std::move(manifest));
        } else if (export_cmd->parsed()) {
            std::vector<std::string> warnings;
            set_stage("load");
            auto graph = ownet::load_graph(nodes_file, edges_file, year, &warnings);
            set_stage("export");
            auto fmt = ownet::parse_export_format(format);
            std::map<ownet::NodeId, ownet::NodeAnnotation> annotations;
            if (!annotations_file.empty()) {
                std::ifstream in(annotations_file);
                if (!in) {
                    throw ownet::InputError("cannot open file: " +
                                            annotations_file);
                }
                std::string line;
                std::size_t lineno = 0;
                while (std::getline(in, line)) {
                    ++lineno;
                    if (lineno == 1 || line.empty()) continue; // header id,npi,npf
                    auto f = ownet::split_csv_line(line);
                    if (f.size() != 3) {
                        throw ownet::InputError(annotations_file + ":" +
                                                std::to_string(lineno) +
                                                ": expected 3 columns");
                    }
                    annotations[f[0]] = {std::stod(f[1]), std::stod(f[2])};
                }
            }
            auto text = ownet::export_graph(graph, annotations, fmt);
            OutputSet outputs;
            outputs.dir = out_dir;
            outputs.add("graph." + export_extension(fmt), text);
            ownet::RunManifest manifest;
            manifest.command = "export";
            manifest.inputs = {
                {nodes_file, ownet::file_fingerprint(nodes_file)},
                {edges_file, ownet::file_fingerprint(edges_file)}};
            print_warnings(warnings);
            finish(outputs, std::move(manifest));
        } else if (pipeline->parsed()) {
            PipelineSettings s;
            if (!config_file.empty()) s = load_pipeline_config(config_file);
            if (pipeline->count("--nodes")) s.nodes = nodes_file;
            if (pipeline->count("--edges")) s.edges = edges_file;
            if (pipeline->count("--sector")) s.sector = sector_file;
            if (pipeline->count("--year")) s.year = year;
            if (pipeline->count("--scenario")) s.scenario = scenario;
            if (pipeline->count("--ocean-slices")) s.ocean_slices = ocean_slices;
            if (pipeline->count("--runs")) s.runs = runs;
            if (pipeline->count("--seed")) s.seed = seed;
            if (pipeline->count("--threshold")) s.threshold = threshold;
            if (pipeline->count("--size-variable")) s.size_variable = size_variable;
            if (pipeline->count("--ebit-floor")) s.ebit_floor = ebit_floor;
            if (pipeline->count("--workers")) s.workers = workers;
            if (pipeline->count("--out-dir")) s.out_dir = out_dir;
            if (pipeline->count("--format")) s.format = format;
            return run_pipeline(s);
        } else if (oracle->parsed()) {
            set_stage("oracle");
            auto rows = ownet::load_register(register_file);
            std::vector<ownet::HolderShare> holders;
            for (const auto& [id, fraction] : rows) {
                holders.push_back({id, fraction});
            }
            auto exact = ownet::exact_power(holders, threshold);
            auto mc =
                ownet::mc_pivot_frequencies(holders, threshold, runs, seed);

            std::printf("%-24s %12s %12s %12s %12s  %s\n", "holder", "exact",
                        "mc", "se", "|diff|", "pass");
            bool all_pass = true;
            for (const auto& [id, p_exact] : exact) {
                double p_mc = mc.at(id);
                double se = ownet::standard_error(p_exact, runs);
                double diff = std::abs(p_mc - p_exact);
                bool pass = diff <= 3.0 * se;
                all_pass = all_pass && pass;
                std::printf("%-24s %12.6f %12.6f %12.6f %12.6f  %s\n",
                            id.c_str(), p_exact, p_mc, se, diff,
                            pass ? "yes" : "NO");
            }
            std::printf("oracle-check: %s (runs=%llu, threshold=%s)\n",
                        all_pass ? "PASS" : "FAIL",
                        static_cast<unsigned long long>(runs),
                        ownet::format_double(threshold).c_str());
        }
        return 0;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        set_stage("cli");
        emit_error("input error", e.what());
        return 2;
    } catch (const ownet::Error& e) {
        emit_error(e.status(), e.what());
        return exit_code_for(e.status());
    } catch (const std::exception& e) {
        emit_error("contract error", e.what());
        return 3;
    }
}
