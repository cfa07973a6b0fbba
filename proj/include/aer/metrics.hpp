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

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "aer/protocol.hpp"

namespace aer {

struct EnergyModel {
    double energy_per_toggle_j = 0.0;
    double static_power_w = 0.0;

    friend bool operator==(const EnergyModel&, const EnergyModel&) = default;
};

struct MetricsReport {
    std::int64_t tokens_completed = 0;
    Time duration_ps = 0;
    double throughput_events_per_s = 0;
    Time latency_mean_ps = 0;
    Time latency_p50_ps = 0;
    Time latency_p99_ps = 0;
    double latency_per_event_bit_ps = 0;
    Time handshake_cycle_min_ps = 0;  // 0 when stage-0 ACK edges were not available
    double dynamic_energy_j = 0;
    double static_energy_j = 0;
    double energy_per_event_j = 0;
    double energy_per_event_bit_j = 0;
};

/// Minimum gap between consecutive rising edges of any single net in `acks`;
/// nullopt when no net rose twice.
std::optional<Time> min_rise_interval(const Trace& trace, std::span<const NetId> acks);

/// Nearest-rank percentile of an ascending list, 0 < p <= 100.
Time nearest_rank(std::span<const Time> sorted, double p);

/// Throws when no token completed. `ports` supplies the stage-0 ACK nets.
MetricsReport compute_metrics(std::span<const Token> tokens, const Trace& trace, const EnergyModel& energy,
                              int num_events, const PortMap* ports = nullptr);

/// Shortest static delay from a leaf request to the root request output.
Time forward_latency_bound(const Netlist& netlist, const PortMap& ports, int leaf);

nlohmann::ordered_json to_json(const MetricsReport& m);
nlohmann::ordered_json to_json(const EnergyModel& e);
EnergyModel energy_model_from_json(const nlohmann::json& j);
void write_latency_csv(std::ostream& os, std::span<const Token> tokens);

}  // namespace aer
