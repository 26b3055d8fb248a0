#include "ownet/export.hpp"

#include <json.hpp>

#include "ownet/csv.hpp"
#include "ownet/errors.hpp"

namespace ownet {

ExportFormat parse_export_format(std::string_view label) {
    if (label == "dot") return ExportFormat::Dot;
    if (label == "graphml") return ExportFormat::GraphML;
    if (label == "json") return ExportFormat::Json;
    throw InputError("unknown export format '" + std::string(label) +
                     "' (expected dot, graphml, or json)");
}

namespace {

std::string dot_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

std::string xml_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

NodeAnnotation annotation_for(const std::map<NodeId, NodeAnnotation>& annotations,
                              const NodeId& id) {
    auto it = annotations.find(id);
    return it == annotations.end() ? NodeAnnotation{} : it->second;
}

std::string to_dot(const OwnershipGraph& graph,
                   const std::map<NodeId, NodeAnnotation>& annotations) {
    std::string out = "digraph ownership {\n";
    for (const auto& n : graph.nodes()) {
        auto a = annotation_for(annotations, n.id);
        out += "  \"" + dot_escape(n.id) + "\" [label=\"" + dot_escape(n.name) +
               "\", kind=\"" + to_string(n.kind) + "\", country=\"" +
               dot_escape(n.country) + "\", npi=" + format_double(a.npi) +
               ", npf=" + format_double(a.npf) + "];\n";
    }
    for (const auto& e : graph.edges()) {
        out += "  \"" + dot_escape(e.holder) + "\" -> \"" + dot_escape(e.held) +
               "\" [fraction=" + format_double(e.fraction) + "];\n";
    }
    out += "}\n";
    return out;
}

std::string to_graphml(const OwnershipGraph& graph,
                       const std::map<NodeId, NodeAnnotation>& annotations) {
    std::string out =
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
        "  <key id=\"name\" for=\"node\" attr.name=\"name\" attr.type=\"string\"/>\n"
        "  <key id=\"kind\" for=\"node\" attr.name=\"kind\" attr.type=\"string\"/>\n"
        "  <key id=\"country\" for=\"node\" attr.name=\"country\" attr.type=\"string\"/>\n"
        "  <key id=\"npi\" for=\"node\" attr.name=\"npi\" attr.type=\"double\"/>\n"
        "  <key id=\"npf\" for=\"node\" attr.name=\"npf\" attr.type=\"double\"/>\n"
        "  <key id=\"fraction\" for=\"edge\" attr.name=\"fraction\" attr.type=\"double\"/>\n"
        "  <graph id=\"ownership\" edgedefault=\"directed\">\n";
    for (const auto& n : graph.nodes()) {
        auto a = annotation_for(annotations, n.id);
        out += "    <node id=\"" + xml_escape(n.id) + "\">\n";
        out += "      <data key=\"name\">" + xml_escape(n.name) + "</data>\n";
        out += "      <data key=\"kind\">" + std::string(to_string(n.kind)) +
               "</data>\n";
        out += "      <data key=\"country\">" + xml_escape(n.country) + "</data>\n";
        out += "      <data key=\"npi\">" + format_double(a.npi) + "</data>\n";
        out += "      <data key=\"npf\">" + format_double(a.npf) + "</data>\n";
        out += "    </node>\n";
    }
    for (const auto& e : graph.edges()) {
        out += "    <edge source=\"" + xml_escape(e.holder) + "\" target=\"" +
               xml_escape(e.held) + "\">\n";
        out += "      <data key=\"fraction\">" + format_double(e.fraction) +
               "</data>\n";
        out += "    </edge>\n";
    }
    out += "  </graph>\n</graphml>\n";
    return out;
}

std::string to_json_text(const OwnershipGraph& graph,
                         const std::map<NodeId, NodeAnnotation>& annotations) {
    nlohmann::ordered_json doc;
    doc["year"] = graph.year();
    auto& nodes = doc["nodes"] = nlohmann::ordered_json::array();
    for (const auto& n : graph.nodes()) {
        auto a = annotation_for(annotations, n.id);
        nodes.push_back({{"id", n.id},
                         {"name", n.name},
                         {"kind", to_string(n.kind)},
                         {"country", n.country},
                         {"npi", a.npi},
                         {"npf", a.npf}});
    }
    auto& edges = doc["edges"] = nlohmann::ordered_json::array();
    for (const auto& e : graph.edges()) {
        edges.push_back(
            {{"holder", e.holder}, {"held", e.held}, {"fraction", e.fraction}});
    }
    return doc.dump(2) + "\n";
}

} // namespace

std::string export_graph(const OwnershipGraph& graph,
                         const std::map<NodeId, NodeAnnotation>& annotations,
                         ExportFormat format) {
    for (const auto& [id, a] : annotations) {
        if (!graph.contains(id)) {
            throw InputError("annotation for node absent from graph: " + id);
        }
    }
    switch (format) {
        case ExportFormat::Dot: return to_dot(graph, annotations);
        case ExportFormat::GraphML: return to_graphml(graph, annotations);
        case ExportFormat::Json: return to_json_text(graph, annotations);
    }
    throw InputError("unknown export format");
}

} // namespace ownet
