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

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "aer/netlist.hpp"

namespace aer {

/// Structural fault injected into one node's controller, for negative tests.
struct FaultInjection {
    enum class Kind { DropAckNext };
    Kind kind = Kind::DropAckNext;
    int stage = 0;
    int node = 0;

    friend bool operator==(const FaultInjection&, const FaultInjection&) = default;
};

/// Parameters of an N-event binary AER encoder tree.
struct GenParams {
    int num_events = 8;
    std::map<CellKind, Time> gate_delays = default_gate_delays();
    Time dff_setup_ps = 60;
    Time dff_hold_ps = 20;
    // One entry per stage, leaves first: DELAY_BUFFER cells on that stage's request path.
    std::vector<int> ctrl_delay_buffers = {0, 0, 0};
    Time buffer_delay_ps = 100;
    Time arbiter_meta_window_ps = 20;
    Time arbiter_resolution_tau_ps = 30;
    bool expand_c_elements = false;

    // Identity gates (AND2 with tied inputs) inserted after each address MUX of a stage.
    std::vector<int> datapath_pad_gates;
    // Multiplier on MUX2 and pad delays, models post-route datapath slowdown.
    double datapath_delay_scale = 1.0;
    // Matched delay on the root request output; 0 selects clk-to-q + setup.
    Time root_out_delay_ps = 0;
    std::optional<FaultInjection> fault;

    static std::map<CellKind, Time> default_gate_delays();
    Time delay_of(CellKind kind) const;

    friend bool operator==(const GenParams&, const GenParams&) = default;
};

int stage_count(int num_events);

/// Returns every problem with the parameters; empty when valid.
std::vector<std::string> check_params(const GenParams& params);

/// Handshake and datapath nets of one tree node.
struct NodePorts {
    int stage = 0;
    int index = 0;
    std::array<NetId, 2> child_req;  // left, right
    std::array<NetId, 2> child_ack;
    std::array<NetId, 2> grant;
    NetId merged_req;   // request after arbitration, before the delay chain
    NetId delayed_req;  // input of the input-side C-element
    NetId local_ack;    // register clock
    NetId req_out;
    NetId ack_next;
    CellId arbiter;
    std::vector<CellId> registers;  // bit 0 first
    std::vector<CellId> chain;
    std::vector<CellId> c_elements;

    friend bool operator==(const NodePorts&, const NodePorts&) = default;
};

struct PortMap {
    int num_events = 0;
    std::vector<NetId> leaf_req_in;
    std::vector<NetId> leaf_ack_out;
    NetId root_req_out;
    NetId root_ack_in;
    std::vector<NetId> root_addr_out;  // index 0 = LSB
    std::vector<std::vector<NodePorts>> stages;

    const NodePorts& root() const { return stages.back().front(); }
    std::vector<CellId> stage_registers(int stage) const;

    friend bool operator==(const PortMap&, const PortMap&) = default;
};

struct AerTree {
    Netlist netlist;
    PortMap ports;
};

/// Builds the encoder tree. Throws aer::Error listing invalid parameters.
AerTree build_aer_tree(const GenParams& params);

/// Expected encoded address of a leaf: bit s is the branch taken at stage s.
using Address = std::vector<bool>;
Address address_of_leaf(int leaf_index, int num_events);
std::string address_string(const Address& addr);  // MSB first
int address_value(const Address& addr);

nlohmann::ordered_json to_json(const GenParams& params);
GenParams gen_params_from_json(const nlohmann::json& j);

nlohmann::ordered_json to_json(const PortMap& ports);
PortMap port_map_from_json(const nlohmann::json& j);

}  // namespace aer
