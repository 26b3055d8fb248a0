#include "ownet/manifest.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <string_view>

#include "ownet/errors.hpp"
#include "ownet/rng.hpp"

namespace ownet {

nlohmann::ordered_json to_json(const RunManifest& manifest) {
    nlohmann::ordered_json doc;
    doc["tool_version"] = manifest.tool_version;
    doc["command"] = manifest.command;
    auto& inputs = doc["inputs"] = nlohmann::ordered_json::array();
    for (const auto& [path, digest] : manifest.inputs) {
        inputs.push_back({{"path", path}, {"fnv1a64", digest}});
    }
    if (manifest.scenario) doc["scenario"] = *manifest.scenario;
    if (manifest.ocean_slices) doc["ocean_slices"] = *manifest.ocean_slices;
    if (manifest.runs) doc["runs"] = *manifest.runs;
    if (manifest.threshold) doc["threshold"] = *manifest.threshold;
    if (manifest.master_seed) doc["master_seed"] = *manifest.master_seed;
    if (manifest.size_variable) doc["size_variable"] = *manifest.size_variable;
    if (manifest.workers) doc["workers"] = *manifest.workers;
    for (auto& [key, value] : manifest.extra.items()) doc[key] = value;
    doc["timestamp"] = manifest.timestamp;
    doc["outputs"] = manifest.outputs;
    return doc;
}

std::string fnv1a_hex(std::string_view bytes) {
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return hex;
}

std::string file_fingerprint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open file: " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return fnv1a_hex(buffer.str());
}

std::string timestamp_utc() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace ownet
