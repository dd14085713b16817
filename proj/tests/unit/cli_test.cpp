// Copyright 2026 The qswitch-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qswitch/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"

using namespace qswitch;
using namespace qswitch::cli;

namespace {

namespace fs = std::filesystem;

struct Invocation {
    int code = 0;
    std::string out;
    std::string err;
};

Invocation invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "qswitch");
    std::vector<const char *> argv;
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class cli_files : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("qswitch_cli_test_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string &name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

} // namespace

TEST(format, twelve_significant_digits) {
    EXPECT_EQ(format_number(1.0), "1");
    EXPECT_EQ(format_number(0.5), "0.5");
    EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
    EXPECT_EQ(format_number(0.9330127018922193), "0.933012701892");
    EXPECT_EQ(format_number(1e-20), "1e-20");
    EXPECT_EQ(format_number(0.0), "0");
}

TEST(format, shortest_round_trips) {
    for (double v : {0.1, 1.0 / 3.0, 1e-9, 123456.789, 2.0 / 3.0}) {
        const std::string s = format_shortest(v);
        EXPECT_EQ(std::stod(s), v) << s;
    }
    EXPECT_EQ(format_shortest(0.1), "0.1");
}

TEST(config, serialize_parse_round_trip) {
    RunConfig c;
    EXPECT_EQ(parse_config(serialize(c)), c);
    c.command = "sweep";
    c.protocol = "ghz";
    c.d = 3;
    c.receivers = 2;
    c.x = 1;
    c.resource = "schmidt:0.2,0.3,0.5";
    c.alpha = "0:0.6666666666666666:101";
    c.out = "table.csv";
    c.format = "csv";
    c.tol = 1.0 / 3.0 * 1e-9;
    c.max_dim = 512;
    c.choice_amplitudes = "random-seeded";
    c.seed = 18446744073709551615ull;
    c.encoding = "classical-flag";
    const RunConfig back = parse_config(serialize(c));
    EXPECT_EQ(back, c);
    EXPECT_EQ(serialize(back), serialize(c));
}

TEST(config, layering_and_comments) {
    RunConfig base;
    base.d = 5;
    const RunConfig c = parse_config("# comment\n\n  x = 2  \nformat=csv\n", base);
    EXPECT_EQ(c.d, 5u);
    EXPECT_EQ(c.x, 2u);
    EXPECT_EQ(c.format, "csv");
}

TEST(config, rejects_malformed_documents) {
    EXPECT_THROW((void)parse_config("d = 2\nd = 3\n"), ConfigError);
    EXPECT_THROW((void)parse_config("colour = red\n"), ConfigError);
    EXPECT_THROW((void)parse_config("just words\n"), ConfigError);
    EXPECT_THROW((void)parse_config("d = two\n"), ConfigError);
    EXPECT_THROW((void)parse_config("d = -1\n"), ConfigError);
    EXPECT_THROW((void)parse_config("tol = 1e-9x\n"), ConfigError);
    EXPECT_THROW((void)load_config_file("/nonexistent/qswitch.cfg"), ConfigError);
}

TEST(parsers, alpha_and_resource) {
    const auto a = parse_alpha("0.25:0.75:11");
    EXPECT_EQ(a.start, 0.25);
    EXPECT_EQ(a.end, 0.75);
    EXPECT_EQ(a.points, 11u);
    EXPECT_THROW((void)parse_alpha("0:1"), ConfigError);
    EXPECT_THROW((void)parse_alpha("0:1.5:3"), ConfigError);
    EXPECT_THROW((void)parse_alpha("0:1:0"), ConfigError);

    EXPECT_EQ(parse_resource("max", 3).description(), "max");
    EXPECT_EQ(parse_resource("schmidt:0.25, 0.75", 2).spectrum(), (std::vector<double>{0.25, 0.75}));
    EXPECT_THROW((void)parse_resource("schmidt:0.25,0.75", 3), ConfigError);
    EXPECT_THROW((void)parse_resource("werner", 2), ConfigError);
    EXPECT_THROW((void)parse_resource("file:/nonexistent.json", 2), ConfigError);
}

TEST(parsers, format_resolution) {
    RunConfig c;
    EXPECT_EQ(resolved_format(c), "json");
    c.command = "sweep";
    EXPECT_EQ(resolved_format(c), "csv");
    c.format = "json";
    EXPECT_EQ(resolved_format(c), "json");
    c.format = "xml";
    EXPECT_THROW((void)resolved_format(c), ConfigError);
}

TEST(verify, checks_pass_for_small_dimensions) {
    for (std::size_t d : {2u, 3u}) {
        RunConfig c;
        c.d = d;
        const auto checks = run_checks(c);
        EXPECT_FALSE(checks.empty());
        for (const auto &r : checks) {
            EXPECT_EQ(r.status, "pass") << r.name << " d=" << d;
        }
    }
}

TEST(verify, random_amplitudes_are_expected_unequal) {
    RunConfig c;
    c.choice_amplitudes = "random-seeded";
    bool seen = false;
    for (const auto &r : run_checks(c)) {
        if (r.status == "expected-unequal") {
            seen = true;
            EXPECT_GT(r.distance, 0.0);
        }
        EXPECT_NE(r.status, "fail") << r.name;
    }
    EXPECT_TRUE(seen);
}

TEST(main, exit_codes) {
    EXPECT_EQ(invoke({"verify"}).code, kExitOk);
    EXPECT_EQ(invoke({"run", "private-dit", "--d", "3", "--x", "2"}).code, kExitOk);
    EXPECT_EQ(invoke({"run", "private-dit", "--x", "5"}).code, kExitUsage);
    EXPECT_EQ(invoke({"run", "teleport"}).code, kExitUsage);
    EXPECT_EQ(invoke({}).code, kExitUsage);
    EXPECT_EQ(invoke({"sweep", "private-dit", "--alpha", "0:1"}).code, kExitUsage);
    EXPECT_EQ(invoke({"sweep", "private-dit", "--alpha", "0:1:11"}).code, kExitOk);
    EXPECT_EQ(invoke({"verify", "--d", "9", "--n", "3"}).code, kExitUsage);
    EXPECT_EQ(invoke({"run", "bipartite", "--resource", "schmidt:0.5,0.6"}).code, kExitUsage);
    // A loose tolerance breaks the perfect-iff-uniform classification.
    EXPECT_EQ(invoke({"sweep", "private-dit", "--alpha", "0.49:0.51:3", "--tol", "1e-3"}).code, kExitCheckFailed);
}

TEST(main, help_exits_cleanly) {
    const auto r = invoke({"--help"});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_NE(r.out.find("sweep"), std::string::npos);
}

TEST(main, summary_echoes_tolerance) {
    const auto r = invoke({"sweep", "bipartite", "--alpha", "0.5:0.5:1"});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_NE(r.out.find("perfect rows 1"), std::string::npos);
    EXPECT_NE(r.out.find("tol=1e-09"), std::string::npos);
}

TEST_F(cli_files, repeated_runs_are_byte_identical) {
    const std::vector<std::vector<std::string>> commands{
        {"run", "private-dit", "--d", "3", "--resource", "schmidt:0.2,0.3,0.5", "--x", "1"},
        {"run", "ghz", "--d", "2", "--receivers", "2"},
        {"run", "fixed-baseline", "--d", "3", "--encoding", "classical-flag"},
        {"sweep", "private-dit", "--alpha", "0:1:21"},
        {"sweep", "ghz", "--receivers", "2", "--alpha", "0:1:11", "--format", "json"},
        {"verify", "--d", "3"},
    };
    int k = 0;
    for (auto args : commands) {
        const std::string a = path("a" + std::to_string(k));
        const std::string b = path("b" + std::to_string(k));
        ++k;
        auto first = args;
        first.insert(first.end(), {"--out", a});
        auto second = args;
        second.insert(second.end(), {"--out", b});
        EXPECT_EQ(invoke(first).code, kExitOk);
        EXPECT_EQ(invoke(second).code, kExitOk);
        const std::string pa = slurp(a);
        EXPECT_FALSE(pa.empty());
        EXPECT_EQ(pa, slurp(b)) << args[0] << " " << args[1];
    }
}

TEST_F(cli_files, json_payload_layout) {
    const std::string p = path("run.json");
    ASSERT_EQ(invoke({"run", "bipartite", "--d", "2", "--out", p}).code, kExitOk);
    const auto j = nlohmann::json::parse(slurp(p));
    EXPECT_EQ(j.at("schema"), "qswitch-lab/1");
    EXPECT_FALSE(j.at("meta").at("config").contains("out"));
    EXPECT_EQ(j.at("meta").at("config").at("d"), "2");
    EXPECT_EQ(j.at("data").at("protocol_id"), "bipartite");
    // Complex entries are [re, im] pairs.
    const auto &entry = j.at("data").at("stages").at(0).at("state").at("matrix").at(0).at(0);
    EXPECT_EQ(entry.size(), 2u);
}

TEST_F(cli_files, csv_sweep_layout) {
    const std::string p = path("sweep.csv");
    ASSERT_EQ(invoke({"sweep", "private-dit", "--alpha", "0:1:3", "--out", p}).code, kExitOk);
    std::istringstream in(slurp(p));
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "lambda_0,lambda_1,metric,top_schmidt_sq,schmidt_gap,resource_concurrence,helstrom_success,is_perfect");
    std::string row;
    std::getline(in, row);
    EXPECT_EQ(row.substr(0, 4), "0,1,");
    std::getline(in, row);
    EXPECT_EQ(row.substr(0, 12), "0.5,0.5,1,0.");
}

TEST_F(cli_files, flags_override_config_file) {
    const std::string cfg = path("exp.cfg");
    {
        std::ofstream f(cfg);
        f << "d = 3\nx = 2\nresource = schmidt:0.2,0.3,0.5\n";
    }
    const std::string a = path("from_file.json");
    const std::string b = path("flags.json");
    ASSERT_EQ(invoke({"run", "private-dit", "--config", cfg, "--out", a}).code, kExitOk);
    ASSERT_EQ(invoke({"run", "private-dit", "--config", cfg, "--x", "0", "--out", b}).code, kExitOk);
    const auto ja = nlohmann::json::parse(slurp(a));
    const auto jb = nlohmann::json::parse(slurp(b));
    EXPECT_EQ(ja.at("meta").at("config").at("x"), "2");
    EXPECT_EQ(jb.at("meta").at("config").at("x"), "0");
    EXPECT_EQ(jb.at("meta").at("config").at("d"), "3");
    EXPECT_EQ(invoke({"run", "private-dit", "--config", path("missing.cfg")}).code, kExitUsage);
}

TEST_F(cli_files, resource_file) {
    const std::string res = path("state.json");
    {
        std::ofstream f(res);
        f << R"({"matrix": [[[0.5,0],[0,0],[0,0],[0.5,0]],
                            [[0,0],[0,0],[0,0],[0,0]],
                            [[0,0],[0,0],[0,0],[0,0]],
                            [[0.5,0],[0,0],[0,0],[0.5,0]]]})";
    }
    const std::string out = path("res.json");
    ASSERT_EQ(invoke({"run", "private-dit", "--resource", "file:" + res, "--out", out}).code, kExitOk);
    const auto j = nlohmann::json::parse(slurp(out));
    EXPECT_NEAR(j.at("data").at("metrics").at("success_probability").get<double>(), 1.0, 1e-12);
}

TEST(main, environment_sets_the_guard) {
    ASSERT_EQ(setenv("QSWITCH_MAX_DIM", "8", 1), 0);
    const int guarded = invoke({"verify", "--d", "3"}).code;
    const int flagged = invoke({"verify", "--d", "3", "--max-dim", "4096"}).code;
    unsetenv("QSWITCH_MAX_DIM");
    EXPECT_EQ(guarded, kExitUsage);
    EXPECT_EQ(flagged, kExitOk);
    EXPECT_EQ(policy().max_dim, 4096u);
}
