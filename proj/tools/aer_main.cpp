/*
 * Copyright 2026 The aer-async Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <iostream>

#include <CLI11.hpp>

#include "aer/cli.hpp"

int main(int argc, char** argv) {
    using namespace aer::cli;
    CLI::App app{"aer: AER encoder tree generator, simulator and timing-closure tool"};
    app.require_subcommand(1);

    std::string config;
    std::string patch;
    std::uint64_t seed = 0;
    std::string out_dir;
    int max_iterations = 0;
    bool vcd = true;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config, "run configuration (JSON)")->required();
        cmd->add_option("--seed", seed, "override the run seed");
        cmd->add_option("--out-dir", out_dir, "directory for relative output paths");
        cmd->add_option("--params-patch", patch, "JSON merge patch applied to the config");
    };
    CLI::App* gen = app.add_subcommand("generate", "build the encoder netlist and port map");
    add_common(gen);
    CLI::App* sim = app.add_subcommand("simulate", "run a workload and check protocol monitors");
    add_common(sim);
    sim->add_flag("--vcd,!--no-vcd", vcd, "write a VCD of every named net");
    CLI::App* close = app.add_subcommand("close-timing", "iterate buffer insertion until timing closes");
    add_common(close);
    close->add_option("--max-iterations", max_iterations, "iteration bound");

    std::string metrics;
    CLI::App* report = app.add_subcommand("report", "pretty-print a metrics file");
    report->add_option("metrics", metrics, "metrics JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigError;
    }

    Overrides ov;
    for (CLI::App* cmd : {gen, sim, close}) {
        if (!cmd->parsed()) continue;
        if (cmd->count("--seed")) ov.seed = seed;
        if (cmd->count("--out-dir")) ov.out_dir = out_dir;
        if (cmd->count("--params-patch")) ov.params_patch = patch;
    }
    if (sim->parsed() && (sim->count("--vcd") || sim->count("--no-vcd"))) ov.vcd = vcd;
    if (close->parsed() && close->count("--max-iterations")) {
        if (max_iterations < 1) {
            std::cerr << "error: --max-iterations must be >= 1\n";
            return kConfigError;
        }
        ov.max_iterations = max_iterations;
    }

    if (gen->parsed()) return cmd_generate(config, ov, std::cout, std::cerr);
    if (sim->parsed()) return cmd_simulate(config, ov, std::cout, std::cerr);
    if (close->parsed()) return cmd_close_timing(config, ov, std::cout, std::cerr);
    return cmd_report(metrics, std::cout, std::cerr);
}
