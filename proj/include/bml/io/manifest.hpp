#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bml/core/errors.hpp"

namespace bml::io {

inline constexpr const char* kCodeVersion = "bml 1.0.0";

struct OutputDigest {
    std::string path;
    std::string sha256;
    friend bool operator==(const OutputDigest&, const OutputDigest&) = default;
};

/// Record of one CLI run. Parameters are kept as strings exactly as
/// resolved from config file and flags.
struct RunManifest {
    std::string command;
    std::map<std::string, std::string> parameters;
    std::uint64_t seed = 0;
    std::string code_version = kCodeVersion;
    std::string started;
    std::string finished;
    std::vector<OutputDigest> outputs;
    /// Summary values reported by the command (for example the fitted kappa).
    std::map<std::string, std::string> results;
    friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

inline nlohmann::json to_json(const RunManifest& m) {
    nlohmann::json outs = nlohmann::json::array();
    for (const auto& o : m.outputs) outs.push_back({{"path", o.path}, {"sha256", o.sha256}});
    return {{"command", m.command}, {"parameters", m.parameters}, {"seed", m.seed},
            {"code_version", m.code_version}, {"started", m.started}, {"finished", m.finished},
            {"outputs", outs}, {"results", m.results}};
}

inline RunManifest manifest_from_json(const nlohmann::json& j) {
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.parameters = j.at("parameters").get<std::map<std::string, std::string>>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.code_version = j.at("code_version").get<std::string>();
    m.started = j.at("started").get<std::string>();
    m.finished = j.at("finished").get<std::string>();
    if (j.contains("results")) m.results = j.at("results").get<std::map<std::string, std::string>>();
    for (const auto& o : j.at("outputs")) m.outputs.push_back({o.at("path").get<std::string>(), o.at("sha256").get<std::string>()});
    return m;
}

inline std::string serialize(const RunManifest& m) { return to_json(m).dump(2) + "\n"; }

inline RunManifest parse_manifest(const std::string& text) { return manifest_from_json(nlohmann::json::parse(text)); }

}  // namespace bml::io
