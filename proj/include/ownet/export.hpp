#pragma once

#include <map>
#include <string>
#include <string_view>

#include "ownet/graph.hpp"

namespace ownet {

enum class ExportFormat { Dot, GraphML, Json };

// Accepts "dot", "graphml", "json"; anything else is a usage error.
ExportFormat parse_export_format(std::string_view label);

// Per-node index annotations carried into the export so external tools can
// render size-by-npi / color-by-npf figures.
struct NodeAnnotation {
    double npi = 0.0;
    double npf = 0.0;
};

// Serializes the graph with node attributes kind, npi, npf. Nodes without an
// annotation get npi = npf = 0. Annotation keys must name graph nodes.
// Output is byte-identical across runs: nodes and edges are emitted in
// lexicographic id order.
std::string export_graph(const OwnershipGraph& graph,
                         const std::map<NodeId, NodeAnnotation>& annotations,
                         ExportFormat format);

} // namespace ownet
