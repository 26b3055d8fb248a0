#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace ownet {

// Provenance record written next to every analytics output. Two runs with
// the same configuration differ only in the timestamp field.
struct RunManifest {
    std::string tool_version;
    std::string command;
    std::vector<std::pair<std::string, std::string>> inputs; // path, fingerprint
    std::optional<std::string> scenario;
    std::optional<unsigned> ocean_slices;
    std::optional<std::uint64_t> runs;
    std::optional<double> threshold;
    std::optional<std::uint64_t> master_seed;
    std::optional<std::string> size_variable;
    std::optional<unsigned> workers;
    std::string timestamp;
    nlohmann::ordered_json extra = nlohmann::ordered_json::object();
    std::vector<std::string> outputs;
};

nlohmann::ordered_json to_json(const RunManifest& manifest);

// FNV-1a 64 content hash, as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);
std::string file_fingerprint(const std::filesystem::path& path);

// Current UTC time, ISO-8601 with seconds.
std::string timestamp_utc();

} // namespace ownet
