// Command-line driver: bml <command> --seed N [--threads T] [--out PATH]
//                          [--config FILE] [--format json|csv] [--<param> value ...]

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bml/bml.hpp"
#include "bml/io/config.hpp"
#include "bml/io/experiments.hpp"
#include "bml/io/manifest.hpp"
#include "bml/verify/acceptance.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 || EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
        throw std::runtime_error("sha256 failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return os.str();
}

std::string utc_now() {
    const auto t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

bml::io::Format parse_format(const std::string& s) {
    if (s == "json") return bml::io::Format::json;
    if (s == "csv") return bml::io::Format::csv;
    throw usage_error("--format must be json or csv");
}

std::string flag_name(const std::string& key) {
    std::string dashed = key;
    for (auto& ch : dashed)
        if (ch == '_') ch = '-';
    return dashed == key ? "--" + key : "--" + dashed + ",--" + key;
}

// Options shared by every command.
struct CommonFlags {
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    std::string out;
    std::string config;
    std::string format = "json";
    std::string replay;
};

void add_common(CLI::App* sub, CommonFlags& f) {
    sub->add_option("--seed", f.seed, "Master seed (required)");
    sub->add_option("--threads", f.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
    sub->add_option("--out", f.out, "Primary output file; companions and the manifest are written next to it");
    sub->add_option("--config", f.config, "Flat key = value parameter file; flags override it");
    sub->add_option("--format", f.format, "Record format")->check(CLI::IsMember({"json", "csv"}));
}

struct CommandFlags {
    const bml::io::CommandSpec* spec = nullptr;
    CLI::App* app = nullptr;
    CommonFlags common;
    std::map<std::string, std::string> values;
};

fs::path default_output(const bml::io::CommandSpec& spec, std::uint64_t seed, bml::io::Format f) {
    const char* root = std::getenv("BML_DATA_DIR");
    const fs::path dir = root && *root ? fs::path(root) : fs::path(".");
    return dir / (spec.name + "-seed" + std::to_string(seed) + spec.primary_extension(f));
}

std::map<std::string, std::string> resolve_parameters(CommandFlags& cf) {
    auto params = cf.spec->defaults;
    if (!cf.common.config.empty()) {
        std::ifstream in(cf.common.config);
        if (!in) throw usage_error("cannot open config file '" + cf.common.config + "'");
        for (auto& [k, v] : bml::io::parse_config(in, cf.spec->schema)) params[k] = v;
    }
    for (const auto& [key, type] : cf.spec->schema) {
        const auto* opt = cf.app->get_option(flag_name(key).substr(0, flag_name(key).find(',')));
        if (opt->count() == 0) continue;
        const auto& v = cf.values.at(key);
        try {
            bml::io::check_value(key, v, type);
        } catch (const bml::io::config_error& e) {
            throw usage_error(e.what());
        }
        params[key] = v;
    }
    for (const auto& [key, type] : cf.spec->schema)
        if (!params.count(key)) throw usage_error("missing required parameter --" + key);
    return params;
}

// Small record files are echoed to stdout; maps and other bulk outputs are not.
void print_records(const bml::io::CommandSpec& spec, bml::io::Format f, const bml::io::CommandOutput& out) {
    const auto& primary = out.files.front().bytes;
    if (spec.primary_extension(f) == bml::io::record_extension(f) && primary.size() <= 16384) std::cout << primary;
}

int run_command(CommandFlags& cf) {
    const auto& spec = *cf.spec;
    const auto specs_format = parse_format(cf.common.format);

    if (!cf.common.replay.empty()) {
        const auto m = bml::io::parse_manifest(read_file(cf.common.replay));
        if (m.command != spec.name)
            throw usage_error("manifest is for '" + m.command + "', not '" + spec.name + "'");
        auto params = m.parameters;
        const auto fmt = parse_format(params.count("format") ? params.at("format") : "json");
        params.erase("format");
        const auto out = spec.run(bml::io::ParamSet(params), m.seed, cf.common.threads, fmt);
        bool same = out.files.size() == m.outputs.size();
        for (std::size_t i = 0; same && i < out.files.size(); ++i) same = sha256_hex(out.files[i].bytes) == m.outputs[i].sha256;
        if (!cf.common.out.empty()) {
            for (const auto& f : out.files) write_file(cf.common.out + f.suffix, f.bytes);
        }
        std::cout << (same ? "replay: all output digests match\n" : "replay: output digests differ\n");
        return same ? kExitOk : kExitValidation;
    }

    if (!cf.common.seed) throw usage_error("--seed is required for '" + spec.name + "'");
    auto params = resolve_parameters(cf);

    bml::io::RunManifest m;
    m.command = spec.name;
    m.seed = *cf.common.seed;
    m.started = utc_now();
    const auto out = spec.run(bml::io::ParamSet(params), m.seed, cf.common.threads, specs_format);
    m.finished = utc_now();
    params["format"] = cf.common.format;
    m.parameters = params;
    m.results = out.results;

    const fs::path primary = cf.common.out.empty() ? default_output(spec, m.seed, specs_format) : fs::path(cf.common.out);
    for (const auto& f : out.files) {
        const fs::path p = primary.string() + f.suffix;
        write_file(p, f.bytes);
        m.outputs.push_back({p.string(), sha256_hex(f.bytes)});
    }
    const fs::path manifest = primary.string() + ".manifest.json";
    write_file(manifest, bml::io::serialize(m));
    print_records(spec, specs_format, out);
    for (const auto& o : m.outputs) std::cerr << "wrote " << o.path << "  sha256 " << o.sha256 << "\n";
    std::cerr << "wrote " << manifest.string() << "\n";
    return kExitOk;
}

struct AcceptanceFlags {
    std::string suite = "primary";
    std::vector<int> only;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    std::string out;
    std::string format = "json";
};

int run_acceptance(const AcceptanceFlags& af) {
    bml::verify::AcceptanceConfig cfg;
    cfg.seed = af.seed.value_or(bml::verify::kSuiteSeed);
    cfg.threads = af.threads;
    const auto started = utc_now();
    std::vector<bml::verify::CheckResult> results;
    std::cout << "acceptance suite '" << af.suite << "', seed " << cfg.seed << "\n";
    for (const auto& entry : bml::verify::primary_suite()) {
        if (!af.only.empty() && std::find(af.only.begin(), af.only.end(), entry.id) == af.only.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        bml::verify::CheckResult r;
        try {
            r = entry.run(cfg);
        } catch (const std::exception& e) {
            r = {entry.id, entry.name, false, {{"error", e.what()}}};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << std::setw(3) << r.id << "  " << std::left << std::setw(26) << r.name << std::right
                  << (r.passed ? "PASS" : "FAIL") << "  " << std::fixed << std::setprecision(1) << std::setw(7) << secs
                  << "s" << std::defaultfloat << std::endl;
        results.push_back(std::move(r));
    }
    const auto failed = std::count_if(results.begin(), results.end(), [](const auto& r) { return !r.passed; });
    std::cout << results.size() - static_cast<std::size_t>(failed) << "/" << results.size() << " passed\n";

    if (!af.out.empty()) {
        std::string bytes;
        if (af.format == "json") {
            nlohmann::json report = {{"suite", af.suite}, {"seed", cfg.seed}, {"checks", nlohmann::json::array()}};
            for (const auto& r : results) report["checks"].push_back(bml::verify::to_json(r));
            bytes = report.dump(2) + "\n";
        } else {
            bytes = "id,name,passed\n";
            for (const auto& r : results) bytes += std::to_string(r.id) + "," + r.name + "," + (r.passed ? "true" : "false") + "\n";
        }
        write_file(af.out, bytes);
        bml::io::RunManifest m;
        m.command = "acceptance";
        m.seed = cfg.seed;
        m.started = started;
        m.finished = utc_now();
        m.parameters = {{"suite", af.suite}, {"format", af.format}};
        if (!af.only.empty()) {
            std::string ids;
            for (int id : af.only) ids += (ids.empty() ? "" : ",") + std::to_string(id);
            m.parameters["only"] = ids;
        }
        m.outputs.push_back({af.out, sha256_hex(bytes)});
        m.results = {{"passed", std::to_string(results.size() - static_cast<std::size_t>(failed))},
                     {"failed", std::to_string(failed)}};
        write_file(af.out + ".manifest.json", bml::io::serialize(m));
    }
    return failed == 0 ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bml: Brownian map, CSBP and GFF metric experiments"};
    app.require_subcommand(1);

    const auto specs = bml::io::command_specs();
    std::vector<std::unique_ptr<CommandFlags>> commands;
    for (const auto& spec : specs) {
        auto cf = std::make_unique<CommandFlags>();
        cf->spec = &spec;
        cf->app = app.add_subcommand(spec.name, spec.description);
        add_common(cf->app, cf->common);
        cf->app->add_option("--replay", cf->common.replay, "Re-run from a manifest and verify the output digests");
        for (const auto& [key, type] : spec.schema) {
            const auto it = spec.defaults.find(key);
            auto* opt = cf->app->add_option(flag_name(key), cf->values[key], key);
            if (it != spec.defaults.end()) opt->description("default " + it->second);
        }
        commands.push_back(std::move(cf));
    }

    AcceptanceFlags af;
    auto* acc = app.add_subcommand("acceptance", "Run the acceptance checks and print a pass/fail table");
    acc->add_option("--suite", af.suite, "Suite name")->check(CLI::IsMember({"primary"}));
    acc->add_option("--only", af.only, "Run only these check ids")->delimiter(',');
    acc->add_option("--seed", af.seed, "Suite seed (default 1)");
    acc->add_option("--threads", af.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
    acc->add_option("--out", af.out, "Write the full report here");
    acc->add_option("--format", af.format, "Report format")->check(CLI::IsMember({"json", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (acc->parsed()) return run_acceptance(af);
        for (auto& cf : commands)
            if (cf->app->parsed()) return run_command(*cf);
    } catch (const usage_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitUsage;
}
