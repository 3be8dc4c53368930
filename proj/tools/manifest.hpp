#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace densekit::cli {

/// SHA-256 of a file's bytes, lowercase hex.
std::string sha256_file(const std::filesystem::path& path);

/// Provenance record written next to every output set.
struct RunManifest {
    std::string subcommand;
    std::map<std::string, std::string> flags;
    std::uint64_t seed{0};
    std::vector<std::filesystem::path> inputs;
    std::vector<std::string> outputs;
    std::string tool_version;
    double wall_clock_seconds{0.0};

    [[nodiscard]] std::string to_json() const;
};

}  // namespace densekit::cli
