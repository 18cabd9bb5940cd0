#pragma once

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>

namespace dcurv {

inline constexpr const char* kToolVersion = "0.1.0";

/// Record of one CLI invocation. Carries no timestamps, so identical runs
/// produce identical manifests.
struct RunManifest {
    std::string command;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    std::map<std::string, std::string> input_hashes;  ///< path -> fnv1a-64 hex
    std::string tool_version = kToolVersion;

    void add_input(const std::filesystem::path& path);
    nlohmann::ordered_json to_json() const;
    static RunManifest from_json(const nlohmann::ordered_json& j);
    void write(const std::filesystem::path& path) const;
    static RunManifest read(const std::filesystem::path& path);
};

/// 64-bit FNV-1a of the file contents, as 16 lowercase hex digits.
std::string hash_file(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace dcurv
