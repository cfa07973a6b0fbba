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

#include <functional>
#include <memory>
#include <vector>

#include <json.hpp>

#include "aer/generator.hpp"
#include "aer/sim.hpp"

namespace aer {

struct Workload {
    enum class Kind { FullScan, Poisson, Burst, Simultaneous };
    Kind kind = Kind::FullScan;
    // FULL_SCAN
    int count_per_leaf = 1;
    // POISSON
    double rate_events_per_s_per_leaf = 1e6;
    Time duration_ps = 1'000'000;
    // BURST
    int burst_len = 4;
    Time intra_gap_ps = 0;
    Time inter_gap_ps = 100'000;
    int bursts = 1;
    // SIMULTANEOUS
    int rounds = 1;

    std::uint64_t seed = 1;

    // Environment: reaction time of each leaf driver and of the root receiver.
    Time leaf_response_ps = 200;
    Time receiver_response_ps = 200;
    // No leaf request rises before this time; lets the netlist settle from reset.
    Time start_ps = 1000;

    friend bool operator==(const Workload&, const Workload&) = default;
};

std::string_view to_string(Workload::Kind kind);
std::vector<std::string> check_workload(const Workload& w);

/// Spike arrival times per leaf, before handshake back-pressure. SIMULTANEOUS
/// has no fixed schedule and returns empty lists.
std::vector<std::vector<Time>> arrival_schedule(const Workload& w, int num_events);

enum class HandshakeEdge { ReqRise, AckRise, ReqFall, AckFall };
using HandshakeCallback = std::function<void(int leaf, HandshakeEdge edge, Time t)>;

/// Reactive leaf drivers bound to one simulator. Each leaf raises REQ for its
/// next queued spike only after its previous ACK fell, and lowers REQ a
/// response time after ACK rose.
class LeafDrivers {
public:
    LeafDrivers(Simulator& sim, const Workload& w, const PortMap& ports, HandshakeCallback cb = {});
    LeafDrivers(const LeafDrivers&) = delete;
    LeafDrivers& operator=(const LeafDrivers&) = delete;

    std::size_t injected() const { return injected_; }
    int rounds_started() const { return rounds_started_; }

private:
    struct Leaf {
        std::vector<Time> arrivals;
        std::size_t next = 0;
        bool busy = false;
    };
    void try_inject(Simulator& sim, int leaf, Time earliest);
    void on_ack(Simulator& sim, int leaf, LogicLevel v);
    void start_round(Simulator& sim, Time at);

    Workload w_;
    const PortMap& ports_;
    HandshakeCallback cb_;
    std::vector<Leaf> leaves_;
    std::size_t injected_ = 0;
    int rounds_started_ = 0;
    int round_open_ = 0;
};

/// Root-side receiver: ACK follows REQ after a fixed response time.
class RootReceiver {
public:
    RootReceiver(Simulator& sim, const PortMap& ports, Time response_ps);
};

/// Builds leaf drivers and a root receiver on `sim`.
struct Environment {
    std::unique_ptr<LeafDrivers> leaves;
    std::unique_ptr<RootReceiver> receiver;
};
Environment generate_stimuli(Simulator& sim, const Workload& w, const PortMap& ports, HandshakeCallback cb = {});

/// Nets read by the protocol monitors and metrics; use as a record mask.
std::vector<bool> monitor_mask(const Netlist& netlist, const PortMap& ports);

struct RunResult {
    Trace trace;
    SimState state;
};

inline constexpr Time kUnbounded = std::numeric_limits<Time>::max() / 4;

/// Simulates a workload until the event queue drains or `until_ps`.
RunResult run_workload(const AerTree& tree, const Workload& w, std::uint64_t seed, Time until_ps = kUnbounded,
                       SimOptions options = {}, HandshakeCallback cb = {});

nlohmann::ordered_json to_json(const Workload& w);
Workload workload_from_json(const nlohmann::json& j);

}  // namespace aer
