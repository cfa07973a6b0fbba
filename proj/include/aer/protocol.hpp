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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "aer/generator.hpp"
#include "aer/sim.hpp"

namespace aer {

/// One injected spike, from leaf REQ rising edge to root REQ falling edge.
struct Token {
    int id = 0;
    int leaf = 0;
    Time inject_ps = 0;
    std::optional<Time> complete_ps;
    std::optional<std::vector<LogicLevel>> observed_addr;  // sampled at root REQ rise, LSB first

    std::optional<Time> latency_ps() const {
        return complete_ps ? std::optional<Time>(*complete_ps - inject_ps) : std::nullopt;
    }
};

enum class ProtocolViolationKind : std::uint8_t {
    PhaseOrder,
    Bundling,
    AddressMismatch,
    TokenLoss,
    TokenDuplication,
    Deadlock,
};
std::string_view to_string(ProtocolViolationKind kind);

struct ProtocolViolation {
    ProtocolViolationKind kind;
    std::string location;
    Time time_ps = 0;
    std::string detail;
};

/// A request/acknowledge pair expected to follow REQ+, ACK+, REQ-, ACK-.
struct Boundary {
    NetId req;
    NetId ack;
    std::string name;
};

/// Every handshake boundary of a generated tree: child links, node-internal
/// request/ACK pairs and the root output, 2(N-1) + N in total.
std::vector<Boundary> tree_boundaries(const PortMap& ports);

std::vector<ProtocolViolation> check_four_phase(const Trace& trace, const Boundary& boundary);
std::vector<ProtocolViolation> check_four_phase(const Trace& trace, std::span<const Boundary> boundaries);

/// Checks that every register d-input of the stage was stable for setup_ps
/// before each rising edge of its node's local ACK, and had settled: a d-input
/// transition after an edge whose latest source change precedes that edge is
/// data that arrived late. Every kernel SETUP record must also be observed.
std::vector<ProtocolViolation> check_bundling(const Trace& trace, const Netlist& netlist, const PortMap& ports,
                                              int stage);

struct TokenReport {
    std::vector<Token> tokens;
    std::vector<ProtocolViolation> violations;
};

/// Follows each token through the tree by its register captures.
TokenReport track_tokens(const Trace& trace, const PortMap& ports, int num_events);

std::optional<ProtocolViolation> detect_deadlock(const SimState& state, const PortMap& ports);

/// All monitors over one run.
struct ProtocolReport {
    std::vector<ProtocolViolation> violations;
    std::vector<TimingViolation> timing;  // SETUP/HOLD records from the kernel
    std::vector<Token> tokens;

    std::size_t count(ProtocolViolationKind kind) const;
    std::size_t count(TimingViolationKind kind) const;
    bool clean() const { return violations.empty() && timing.empty(); }
};

ProtocolReport check_all(const Trace& trace, const Netlist& netlist, const PortMap& ports, const SimState& state);

nlohmann::ordered_json to_json(const ProtocolReport& report, const Netlist& netlist);

}  // namespace aer
