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

#include <vector>

#include <json.hpp>

#include "aer/generator.hpp"
#include "aer/protocol.hpp"
#include "aer/traffic.hpp"

namespace aer {

struct StageTiming {
    int stage = 0;
    Time t_period_ack_ps = 0;
    Time data_delay_ps = 0;
    Time setup_ps = 0;
    Time margin_ps = 0;  // t_period_ack_ps - setup_ps - data_delay_ps
    Time target_ps = 0;  // floor(0.2 * t_period_ack_ps)

    bool passes() const { return data_delay_ps <= target_ps && margin_ps > 0; }

    friend bool operator==(const StageTiming&, const StageTiming&) = default;
};

StageTiming make_stage_timing(int stage, Time period, Time data_delay, Time setup);

/// Per-stage timing from a saturating trace. Stage s period is the smallest
/// gap between consecutive rising edges of one node's local ACK, taken over
/// all nodes of the stage. Throws when some stage's ACK rose fewer than twice.
std::vector<StageTiming> extract_periods(const Trace& trace, const Netlist& netlist, const PortMap& ports);

struct ClosureOptions {
    // Tokens per leaf for the period-extraction run.
    int extract_tokens_per_leaf = 4;
    // Verification pass: full-scan tokens per leaf and number of seeds.
    int verify_tokens_per_leaf = 64;
    int verify_seeds = 2;
    std::uint64_t seed = 1;
    // Datapath slowdown applied to the verification netlist only.
    double delay_inflation = 1.0;
    Time leaf_response_ps = 200;
    Time receiver_response_ps = 200;

    friend bool operator==(const ClosureOptions&, const ClosureOptions&) = default;
};

struct ClosureIteration {
    std::vector<int> buffers;
    std::vector<StageTiming> timing;
    bool rule_passed = false;
    bool verified = false;  // verification ran and was clean
    std::size_t violations = 0;
    bool passed = false;
};

struct ClosureReport {
    int iterations = 0;
    std::vector<int> final_buffers;
    std::vector<ClosureIteration> per_iteration;
    bool converged = false;
};

ClosureReport run_closure(const GenParams& params, int max_iterations, const ClosureOptions& options = {});

nlohmann::ordered_json to_json(const StageTiming& t);
nlohmann::ordered_json to_json(const ClosureReport& r);
nlohmann::ordered_json to_json(const ClosureOptions& o);
ClosureOptions closure_options_from_json(const nlohmann::json& j);

/// Patch with the final buffer counts, mergeable into a GenParams document.
nlohmann::ordered_json params_patch(const ClosureReport& r);

}  // namespace aer
