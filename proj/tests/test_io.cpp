#include <gtest/gtest.h>

#include <sstream>

#include "bml/io/config.hpp"
#include "bml/io/experiments.hpp"
#include "bml/io/manifest.hpp"

using namespace bml::io;

namespace {

const Schema schema{{"n", ValueType::integer}, {"alpha", ValueType::real}, {"name", ValueType::string}, {"flag", ValueType::boolean}};

}  // namespace

TEST(Config, ParsesFlatKeyValue) {
    std::istringstream in("# comment\n\n n = 12\nalpha=1.5\r\nname = two words \nflag = true\n");
    const auto m = parse_config(in, schema);
    EXPECT_EQ(m.at("n"), "12");
    EXPECT_EQ(m.at("alpha"), "1.5");
    EXPECT_EQ(m.at("name"), "two words");
    EXPECT_EQ(m.at("flag"), "true");
}

TEST(Config, RejectsUnknownDuplicateAndMistyped) {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return parse_config(in, schema);
    };
    EXPECT_THROW(parse("m = 1\n"), config_error);
    EXPECT_THROW(parse("n = 1\nn = 2\n"), config_error);
    EXPECT_THROW(parse("n = 1.5\n"), config_error);
    EXPECT_THROW(parse("alpha = x\n"), config_error);
    EXPECT_THROW(parse("flag = yes\n"), config_error);
    EXPECT_THROW(parse("just text\n"), config_error);
    EXPECT_THROW(parse(" = 3\n"), std::invalid_argument);
}

TEST(Manifest, RoundTripIsExact) {
    RunManifest m;
    m.command = "sample-snake";
    m.parameters = {{"n", "512"}, {"format", "json"}};
    m.seed = 18446744073709551615ull;
    m.started = "2026-01-01T00:00:00Z";
    m.finished = "2026-01-01T00:00:01Z";
    m.outputs = {{"map.bin", std::string(64, 'a')}, {"map.bin.points.csv", std::string(64, 'b')}};
    m.results = {{"diameter", "3.5"}};
    const auto text = serialize(m);
    const auto back = parse_manifest(text);
    EXPECT_EQ(back, m);
    EXPECT_EQ(serialize(back), text);
}

TEST(Manifest, MissingFieldsRejected) {
    EXPECT_ANY_THROW(parse_manifest(R"({"command": "csbp"})"));
}

TEST(Records, LongCsvAndJsonLines) {
    const std::vector<nlohmann::json> recs{{{"a", 1}, {"b", {{"c", 2.5}}}}, {{"a", 2}}};
    const auto jsonl = encode_records(recs, Format::json);
    EXPECT_EQ(std::count(jsonl.begin(), jsonl.end(), '\n'), 2);
    const auto csv = encode_records(recs, Format::csv);
    EXPECT_EQ(csv.rfind("record,field,value\n", 0), 0u);
    EXPECT_NE(csv.find("0,b.c,2.5"), std::string::npos);
    EXPECT_NE(csv.find("1,a,2"), std::string::npos);
    const auto quoted = encode_records(std::vector<nlohmann::json>{nlohmann::json{{"s", "x, \"y\""}}}, Format::csv);
    EXPECT_NE(quoted.find("0,s,\"x, \"\"y\"\"\""), std::string::npos);
}

TEST(Records, RealList) {
    EXPECT_EQ(parse_real_list("2, 4,8"), (std::vector<double>{2, 4, 8}));
    EXPECT_THROW(parse_real_list("2,x"), std::invalid_argument);
}

TEST(Commands, RegistryAndDeterminism) {
    const auto specs = command_specs();
    for (const char* name : {"sample-snake", "sample-quad", "csbp", "merge-ppp", "gff", "analyze"})
        EXPECT_NE(find_command(specs, name), nullptr) << name;
    EXPECT_EQ(find_command(specs, "nope"), nullptr);
    for (const auto& spec : specs)
        for (const auto& [k, v] : spec.defaults) EXPECT_NO_THROW(check_value(k, v, spec.schema.at(k)));
    const auto* merge = find_command(specs, "merge-ppp");
    auto params = merge->defaults;
    params["reps"] = "20";
    const auto a = merge->run(ParamSet(params), 3, 1, Format::json);
    const auto b = merge->run(ParamSet(params), 3, 2, Format::json);
    const auto c = merge->run(ParamSet(params), 4, 1, Format::json);
    EXPECT_EQ(a.files.front().bytes, b.files.front().bytes);
    EXPECT_NE(a.files.front().bytes, c.files.front().bytes);
}

TEST(Commands, MissingParameterIsReported) {
    const ParamSet p(std::map<std::string, std::string>{{"n", "3"}});
    EXPECT_THROW((void)p.str("m"), config_error);
    EXPECT_THROW((void)ParamSet(std::map<std::string, std::string>{{"n", "-3"}}).count("n"), std::invalid_argument);
}
