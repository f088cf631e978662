#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bml::io {

/// Malformed or schema-violating configuration.
class config_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class ValueType { integer, real, string, boolean };

using Schema = std::map<std::string, ValueType, std::less<>>;

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

/// Checks that `value` parses as the given type.
inline void check_value(std::string_view key, std::string_view value, ValueType type) {
    auto fail = [&](const char* what) {
        throw config_error("config key '" + std::string(key) + "': expected " + what + ", got '" + std::string(value) + "'");
    };
    switch (type) {
        case ValueType::integer: {
            long long v = 0;
            auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
            if (ec != std::errc{} || p != value.data() + value.size()) fail("an integer");
            break;
        }
        case ValueType::real: {
            double v = 0;
            auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
            if (ec != std::errc{} || p != value.data() + value.size()) fail("a real number");
            break;
        }
        case ValueType::boolean:
            if (value != "true" && value != "false") fail("true or false");
            break;
        case ValueType::string:
            break;
    }
}

/// Flat key = value file. Blank lines and lines starting with '#' are
/// ignored. Keys must appear in the schema, at most once.
inline std::map<std::string, std::string> parse_config(std::istream& in, const Schema& schema) {
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto text = trim(line);
        if (text.empty() || text.front() == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string_view::npos)
            throw config_error("config line " + std::to_string(lineno) + ": expected key = value");
        const auto key = trim(text.substr(0, eq));
        const auto value = trim(text.substr(eq + 1));
        if (key.empty()) throw config_error("config line " + std::to_string(lineno) + ": empty key");
        const auto it = schema.find(key);
        if (it == schema.end()) throw config_error("config line " + std::to_string(lineno) + ": unknown key '" + std::string(key) + "'");
        check_value(key, value, it->second);
        if (!out.emplace(std::string(key), std::string(value)).second)
            throw config_error("config line " + std::to_string(lineno) + ": duplicate key '" + std::string(key) + "'");
    }
    return out;
}

}  // namespace bml::io
