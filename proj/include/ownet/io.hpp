#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ownet/graph.hpp"

namespace ownet {

// Loads an ownership snapshot from the two delimited registry files:
//   nodes: header `id,name,kind,country`
//   edges: header `holder_id,held_id,fraction` with fraction in (0, 1]
// Malformed rows raise InputError with the offending line number. Registry
// files may not declare float-synthetic nodes.
OwnershipGraph load_graph(const std::filesystem::path& nodes_file,
                          const std::filesystem::path& edges_file,
                          int year,
                          std::vector<std::string>* warnings = nullptr);

// Reads back the JSON export schema
//   {year, nodes:[{id,name,kind,country,npi,npf}], edges:[{holder,held,fraction}]}
// Float-synthetic nodes are accepted here (the file is our own artifact).
OwnershipGraph load_graph_json(const std::filesystem::path& file,
                               std::vector<std::string>* warnings = nullptr);

// Sector file: header `firm_id,size_value`. The size variable is named on the
// command line, not in the file.
SectorSpec load_sector(const std::filesystem::path& file,
                       const std::string& size_variable_name);

// Single-register holders file for oracle checks: header `holder_id,fraction`.
std::vector<std::pair<NodeId, double>> load_register(
    const std::filesystem::path& file);

} // namespace ownet
