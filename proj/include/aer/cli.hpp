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

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "aer/closure.hpp"
#include "aer/metrics.hpp"
#include "aer/traffic.hpp"

namespace aer::cli {

enum ExitCode : int { kOk = 0, kViolations = 1, kConfigError = 2 };

struct OutputPaths {
    std::string dir = ".";
    std::string netlist = "netlist.json";
    std::string portmap = "portmap.json";
    std::string vcd = "trace.vcd";
    std::string metrics = "metrics.json";
    std::string violations = "violations.json";
    std::string latency_csv = "latencies.csv";
    std::string closure_report = "closure.json";
    std::string params_patch = "params_patch.json";

    std::filesystem::path resolve(const std::string& file) const;
};

/// One self-describing document consumed by every command.
struct RunConfig {
    GenParams gen;
    Workload workload;
    EnergyModel energy;
    Time until_ps = kUnbounded;
    std::uint64_t seed = 1;
    ClosureOptions closure;
    int max_iterations = 50;
    bool vcd = true;
    OutputPaths outputs;
};

/// Command-line overrides applied on top of the config file.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<int> max_iterations;
    std::optional<bool> vcd;
    std::optional<std::string> params_patch;  // JSON merge patch applied to the config
};

/// Parses a config document; throws aer::Error on any invalid field.
RunConfig parse_run_config(const nlohmann::json& doc, const Overrides& ov = {});
RunConfig load_run_config(const std::filesystem::path& path, const Overrides& ov = {});
nlohmann::ordered_json to_json(const RunConfig& c);

int cmd_generate(const std::filesystem::path& config, const Overrides& ov, std::ostream& out, std::ostream& err);
int cmd_simulate(const std::filesystem::path& config, const Overrides& ov, std::ostream& out, std::ostream& err);
int cmd_close_timing(const std::filesystem::path& config, const Overrides& ov, std::ostream& out,
                     std::ostream& err);
int cmd_report(const std::filesystem::path& metrics, std::ostream& out, std::ostream& err);

}  // namespace aer::cli
