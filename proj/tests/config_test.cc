// Copyright 2026 The wnrqc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "config.hpp"

#include <sstream>

#include "commands.hpp"
#include "gtest/gtest.h"

using namespace wnrqc;
using namespace wnrqc::cli;

namespace {

RunConfig from_text(const std::string &text) {
    std::istringstream in(text);
    RunConfig cfg;
    apply_table(cfg, parse_toml(in, "run.toml"));
    return cfg;
}

std::string error_of(const std::string &text) {
    try {
        from_text(text);
    } catch (const ConfigError &e) {
        return e.what();
    }
    return "";
}

std::string run(RunConfig cfg) {
    std::ostringstream out;
    run_command(cfg, out);
    return out.str();
}

}  // namespace

TEST(config, parses_flat_toml_with_channel_table) {
    auto cfg = from_text(
        "# comment\n"
        "n = 53\n"
        "s_list = [0, 10, 1_000]   # trailing comment\n"
        "format = \"json\"\n"
        "\n"
        "[channel]\n"
        "kind = \"dephasing\"\n"
        "q = 3\n"
        "eps = 2.5e-3\n");
    EXPECT_EQ(cfg.n, 53u);
    EXPECT_EQ(cfg.s_list, (std::vector<uint64_t>{0, 10, 1000}));
    EXPECT_EQ(cfg.format, "json");
    EXPECT_EQ(cfg.channel, "dephasing");
    EXPECT_EQ(cfg.q, 3);
    EXPECT_DOUBLE_EQ(cfg.eps, 0.0025);
    EXPECT_TRUE(cfg.has("eps"));
    EXPECT_FALSE(cfg.has("seed"));
    EXPECT_EQ(make_channel(cfg).kind(), ChannelKind::dephasing);
}

TEST(config, errors_carry_line_and_field) {
    EXPECT_NE(error_of("n = 4\nbogus = 1\n").find("run.toml:2 (bogus): unknown key 'bogus'"), std::string::npos);
    EXPECT_NE(error_of("n = 4.5\n").find("run.toml:1 (n): field 'n' expects a non-negative integer"),
              std::string::npos);
    EXPECT_NE(error_of("\n\nformat = 3\n").find("run.toml:3"), std::string::npos);
    EXPECT_NE(error_of("n = 4\nn = 5\n").find("duplicate key 'n'"), std::string::npos);
    EXPECT_NE(error_of("n 4\n").find("expected key = value"), std::string::npos);
    EXPECT_NE(error_of("[channel\n").find("malformed table header"), std::string::npos);
    EXPECT_NE(error_of("s_list = [1, 2\n").find("arrays must close"), std::string::npos);
    EXPECT_NE(error_of("[channel]\ncolour = 1\n").find("unknown key 'channel.colour'"), std::string::npos);
    EXPECT_NE(error_of("out = \"a\"b\"\n").find("malformed string"), std::string::npos);
}

TEST(config, flags_override_file_values) {
    auto cfg = from_text("n = 8\neps = 0.01\n");
    apply_flag(cfg, "n", "12");
    apply_flag(cfg, "s-list", "5,10,20");
    apply_flag(cfg, "channel", "rotation");
    apply_flag(cfg, "theta", "0.3");
    apply_flag(cfg, "n-list", "53");
    EXPECT_EQ(cfg.n, 12u);
    EXPECT_EQ(cfg.s_list, (std::vector<uint64_t>{5, 10, 20}));
    EXPECT_EQ(cfg.n_list, (std::vector<uint32_t>{53}));
    EXPECT_EQ(make_channel(cfg).kind(), ChannelKind::rotation);
    EXPECT_THROW(apply_flag(cfg, "no-such-flag", "1"), ConfigError);
    EXPECT_THROW(apply_flag(cfg, "seed", "-3"), ConfigError);
    apply_flag(cfg, "out", "runs/fig2_n53.csv");
    EXPECT_EQ(cfg.out, "runs/fig2_n53.csv");
    EXPECT_THROW(apply_flag(cfg, "n", "abc"), ConfigError);
}

TEST(config, validate_rejects_bad_combinations) {
    RunConfig cfg;
    cfg.command = "cg-sweep";
    cfg.format = "xml";
    EXPECT_THROW(validate(cfg), ConfigError);
    cfg.format = "csv";
    cfg.eps = 2.0;
    EXPECT_THROW(validate(cfg), ConfigError);
    cfg.eps = 0.01;
    cfg.arch = "hypercube";
    EXPECT_THROW(validate(cfg), ConfigError);
    cfg.arch = "ring1d";
    EXPECT_NO_THROW(validate(cfg));
}

TEST(config, sigma_overrides_build_custom_channel) {
    RunConfig cfg;
    cfg.eps = 0.01;
    cfg.sigma1 = 0.02;
    auto ch = make_channel(cfg);
    EXPECT_EQ(ch.kind(), ChannelKind::custom);
    EXPECT_NEAR(ch.sigma1(), 0.02, 1e-15);
    EXPECT_NEAR(ch.sigma2(), make_depolarizing(2, 0.01).sigma2(), 1e-15);
}

TEST(config, sweep_points) {
    RunConfig cfg;
    cfg.s = 7;
    EXPECT_EQ(sweep_points(cfg), (std::vector<uint64_t>{7}));
    cfg.s_step = 5;
    cfg.s_max = 12;
    EXPECT_EQ(sweep_points(cfg), (std::vector<uint64_t>{0, 5, 10}));
    cfg.s_list = {3};
    EXPECT_EQ(sweep_points(cfg), (std::vector<uint64_t>{3}));
}

TEST(cli_commands, cg_sweep_is_byte_stable) {
    RunConfig cfg;
    cfg.command = "cg-sweep";
    cfg.n = 53;
    cfg.eps = 0.0045;
    cfg.s_list = {0, 430, 5000};
    std::string a = run(cfg);
    cfg.threads = 4;
    std::string b = run(cfg);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.rfind("# schema: wnrqc.bounds/1\n", 0), 0u);
    cfg.format = "json";
    auto j = nlohmann::json::parse(run(cfg));
    EXPECT_EQ(j["rows"].size(), 3u);
    EXPECT_EQ(j["rows"][2]["s"], 5000);
}

TEST(cli_commands, cg_sweep_flags_invalid_bound) {
    RunConfig cfg;
    cfg.command = "cg-sweep";
    cfg.format = "json";
    cfg.n = 60;
    cfg.eps = 0.0045;
    cfg.s_list = {594};
    auto j = nlohmann::json::parse(run(cfg));
    EXPECT_GT(j["rows"][0]["ratio"].get<double>(), 1.0);
    EXPECT_FALSE(j["rows"][0]["valid"].get<bool>());
}

TEST(cli_commands, cg_sweep_far_tail_uses_log_form) {
    RunConfig cfg;
    cfg.command = "cg-sweep";
    cfg.format = "json";
    cfg.n = 53;
    cfg.eps = 0.0045;
    cfg.s_list = {200000};
    auto row = nlohmann::json::parse(run(cfg))["rows"][0];
    EXPECT_GT(row["ratio"].get<double>(), 1.0);
    EXPECT_FALSE(row["valid"].get<bool>());
}

TEST(cli_commands, threshold_reports_inconclusive) {
    RunConfig cfg;
    cfg.command = "threshold";
    cfg.n = 53;
    cfg.s_max = 100;
    std::ostringstream out;
    EXPECT_EQ(run_command(cfg, out), kExitInconclusive);
    EXPECT_NE(out.str().find("53,inconclusive,nan"), std::string::npos);
    cfg.channel = "rotation";
    EXPECT_THROW(run_command(cfg, out), ConfigError);
}

TEST(cli_commands, validate_catches_corrupted_sigma) {
    RunConfig cfg;
    cfg.command = "validate";
    std::ostringstream good;
    EXPECT_EQ(run_command(cfg, good), kExitOk) << good.str();
    cfg.corrupt_sigma = true;
    std::ostringstream bad;
    EXPECT_EQ(run_command(cfg, bad), kExitCheckFailed);
    EXPECT_NE(bad.str().find("qoracle_vs_walk_fbar_ring4"), std::string::npos);
    bool fbar_failed = false;
    for (const auto &c : validation_checks(cfg)) {
        if (c.name == "qoracle_vs_walk_fbar_ring4") {
            fbar_failed = !c.pass;
        }
    }
    EXPECT_TRUE(fbar_failed);
}

TEST(cli_commands, small_commands_run) {
    RunConfig cfg;
    cfg.n = 4;
    cfg.eps = 0.05;
    cfg.s = 8;
    cfg.samples = 2000;
    cfg.instances = 20;
    cfg.shots = 5;
    for (const auto &name : {"walk-exact", "walk-mc", "coupled", "qoracle", "xeb", "reduction-demo"}) {
        cfg.command = name;
        std::ostringstream out;
        EXPECT_EQ(run_command(cfg, out), kExitOk) << name;
        EXPECT_EQ(out.str().rfind("# schema: wnrqc.", 0), 0u) << name;
        std::string first = out.str();
        std::ostringstream again;
        run_command(cfg, again);
        EXPECT_EQ(first, again.str()) << name;
    }
}
