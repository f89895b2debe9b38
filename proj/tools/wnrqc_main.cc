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

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "commands.hpp"

using namespace wnrqc;

namespace {

const std::map<std::string, std::string> &flag_help() {
    static const std::map<std::string, std::string> help{
        {"n", "number of qudits"},
        {"q", "local dimension"},
        {"arch", "ring1d, complete_graph or lattice"},
        {"dims", "lattice side lengths, comma separated"},
        {"channel", "depolarizing, dephasing, rotation or custom"},
        {"eps", "depolarizing/dephasing strength"},
        {"theta", "rotation angle"},
        {"r", "custom channel infidelity"},
        {"u", "custom channel unitarity"},
        {"sigma1", "override the one-noisy-copy flip rate"},
        {"sigma2", "override the two-noisy-copy flip rate"},
        {"s", "gate count for complete-graph circuits"},
        {"s-list", "gate counts for sweeps, comma separated"},
        {"s-step", "sweep step between s-min and s-max"},
        {"s-min", "smallest s in sweeps and threshold scans"},
        {"s-max", "largest s in sweeps and threshold scans"},
        {"depth", "layer count for ring1d and lattice circuits"},
        {"n-list", "qudit counts for threshold scans"},
        {"samples", "trajectories or reduction samples"},
        {"instances", "circuit instances for the quantum oracle"},
        {"shots", "samples per instance for XEB"},
        {"seed", "master seed"},
        {"out", "output path (default stdout)"},
        {"format", "csv or json"},
        {"threads", "worker threads (default WNRQC_THREADS or 1)"},
        {"placement", "gate_sites or all_sites noise placement"},
        {"k", "reduction acceptance multiplier"},
        {"f-list", "white-noise fidelities for the reduction demo"},
        {"nu", "oracle relative error for the reduction demo"},
        {"mu", "oracle failure fraction for the reduction demo"},
        {"corrupt-sigma", "test hook: skew the walk flip rate in validate"},
    };
    return help;
}

const std::map<std::string, std::string> &command_help() {
    static const std::map<std::string, std::string> help{
        {"cg-sweep", "exact complete-graph Z values and bounds over a range of s"},
        {"walk-exact", "exact walk on one ring, lattice or complete-graph diagram"},
        {"walk-mc", "Monte Carlo trajectories of the walk"},
        {"coupled", "S-destined mass of the coupled walk"},
        {"threshold", "noise threshold eps* for each n"},
        {"qoracle", "density-matrix simulation of random circuit instances"},
        {"xeb", "linear cross-entropy benchmark against the walk prediction"},
        {"reduction-demo", "rejection sampling from a white-noise oracle"},
        {"validate", "cross-check the engines against each other"},
    };
    return help;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"White-noise approximation error of noisy random circuits"};
    app.require_subcommand(1);
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> flags;
    std::map<std::string, CLI::App *> subs;
    for (const auto &name : cli::command_names()) {
        CLI::App *sub = app.add_subcommand(name, command_help().at(name));
        sub->add_option("--config", config_path, "TOML run file; flags override its values");
        for (const auto &flag : cli::flag_names()) {
            auto it = flag_help().find(flag);
            std::string help = it == flag_help().end() ? "" : it->second;
            if (flag == "corrupt-sigma") {
                sub->add_flag_callback("--" + flag, [&flags, flag] { flags.emplace_back(flag, "true"); }, help);
                continue;
            }
            sub->add_option_function<std::string>(
                "--" + flag, [&flags, flag](const std::string &v) { flags.emplace_back(flag, v); }, help);
        }
        subs[name] = sub;
    }
    CLI11_PARSE(app, argc, argv);

    cli::RunConfig cfg;
    try {
        if (!config_path.empty()) {
            cli::apply_table(cfg, cli::parse_toml_file(config_path));
        }
        for (const auto &[flag, value] : flags) {
            cli::apply_flag(cfg, flag, value);
        }
        for (const auto &[name, sub] : subs) {
            if (sub->parsed()) {
                cfg.command = name;
            }
        }
        cli::validate(cfg);
    } catch (const cli::ConfigError &e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return cli::kExitUsage;
    }

    std::ostringstream buffer;
    int code = 0;
    try {
        code = cli::run_command(cfg, buffer);
    } catch (const cli::ConfigError &e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return cli::kExitUsage;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kExitUsage;
    }
    if (cfg.out.empty()) {
        std::cout << buffer.str();
    } else {
        std::ofstream f(cfg.out, std::ios::binary);
        if (!f) {
            std::cerr << "error: cannot write " << cfg.out << '\n';
            return cli::kExitUsage;
        }
        f << buffer.str();
    }
    return code;
}
