#include "dcurv/manifest.hpp"

#include "dcurv/error.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace dcurv {

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorKind::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorKind::Io, "cannot open " + path.string() + " for writing");
    out << text;
    require(static_cast<bool>(out), ErrorKind::Io, "failed writing " + path.string());
}

std::string hash_file(const std::filesystem::path& path) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : read_text(path)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void RunManifest::add_input(const std::filesystem::path& path) { input_hashes[path.string()] = hash_file(path); }

nlohmann::ordered_json RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["config"] = config;
    j["input_hashes"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : input_hashes) j["input_hashes"][k] = v;
    j["tool_version"] = tool_version;
    return j;
}

RunManifest RunManifest::from_json(const nlohmann::ordered_json& j) {
    RunManifest m;
    try {
        m.command = j.at("command").get<std::string>();
        m.config = j.at("config");
        if (j.contains("input_hashes"))
            for (const auto& [k, v] : j.at("input_hashes").items()) m.input_hashes[k] = v.get<std::string>();
        if (j.contains("tool_version")) m.tool_version = j.at("tool_version").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::InvalidInput, std::string("malformed manifest: ") + e.what());
    }
    return m;
}

void RunManifest::write(const std::filesystem::path& path) const { write_text(path, to_json().dump(2) + "\n"); }

RunManifest RunManifest::read(const std::filesystem::path& path) {
    try {
        return from_json(nlohmann::ordered_json::parse(read_text(path)));
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::InvalidInput, path.string() + ": " + e.what());
    }
}

}  // namespace dcurv
