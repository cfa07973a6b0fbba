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

#include <doctest.h>

#include <map>

#include "aer/generator.hpp"

using namespace aer;

namespace {

std::map<CellKind, int> census(const Netlist& nl) {
    std::map<CellKind, int> m;
    for (const Cell& c : nl.cells()) ++m[c.kind];
    return m;
}

// Walks the structure from a leaf to the root, recording which child port of
// each node the path enters. Independent of address_of_leaf.
std::vector<bool> tree_path_bits(const PortMap& ports, int leaf) {
    std::vector<bool> bits;
    NetId req = ports.leaf_req_in[static_cast<std::size_t>(leaf)];
    for (const auto& stage : ports.stages) {
        bool found = false;
        for (const NodePorts& n : stage) {
            for (int side = 0; side < 2 && !found; ++side) {
                if (n.child_req[side] != req) continue;
                bits.push_back(side == 1);
                req = n.req_out;
                found = true;
            }
            if (found) break;
        }
        REQUIRE(found);
    }
    return bits;
}

}  // namespace

TEST_CASE("tree shape: closed-form cell counts") {
    for (int n : {2, 4, 8, 16, 32}) {
        GenParams p;
        p.num_events = n;
        const int stages = stage_count(n);
        p.ctrl_delay_buffers.assign(static_cast<std::size_t>(stages), 2);
        const AerTree t = build_aer_tree(p);
        CHECK(validate(t.netlist).ok());
        const auto m = census(t.netlist);
        int reg_bits = 0, nodes = 0, muxes = 0;
        for (int s = 0; s < stages; ++s) {
            const int k = n >> (s + 1);
            nodes += k;
            reg_bits += k * (s + 1);
            muxes += k * s;
            CHECK(static_cast<int>(t.ports.stages[static_cast<std::size_t>(s)].size()) == k);
        }
        CHECK(m.at(CellKind::MutexArbiter) == n - 1);
        CHECK(nodes == n - 1);
        CHECK(m.at(CellKind::DffRising) == reg_bits);
        CHECK(m.at(CellKind::CElement) == 2 * (n - 1));
        CHECK(m.count(CellKind::Mux2) == (muxes > 0 ? 1u : 0u));
        if (muxes > 0) CHECK(m.at(CellKind::Mux2) == muxes);
        // 2 per node plus the root output bundling delay.
        CHECK(m.at(CellKind::DelayBuffer) == 2 * (n - 1) + 1);
        CHECK(t.ports.leaf_req_in.size() == static_cast<std::size_t>(n));
        CHECK(t.ports.leaf_ack_out.size() == static_cast<std::size_t>(n));
        CHECK(t.ports.root_addr_out.size() == static_cast<std::size_t>(stages));
    }
}

TEST_CASE("smallest and eight-event trees") {
    GenParams p;
    p.num_events = 2;
    p.ctrl_delay_buffers = {0};
    const AerTree two = build_aer_tree(p);
    CHECK(two.ports.stages.size() == 1);
    CHECK(two.ports.root().registers.size() == 1);

    const AerTree eight = build_aer_tree(GenParams{});
    CHECK(eight.ports.stages.size() == 3);
    CHECK(census(eight.netlist).at(CellKind::MutexArbiter) == 7);
}

TEST_CASE("invalid parameters are rejected with diagnostics") {
    GenParams p;
    p.num_events = 3;
    CHECK_THROWS_WITH_AS(build_aer_tree(p), doctest::Contains("num_events must be a power of two"), Error);
    p = GenParams{};
    p.ctrl_delay_buffers = {0, 0};
    CHECK_THROWS_WITH_AS(build_aer_tree(p), doctest::Contains("ctrl_delay_buffers"), Error);
    p = GenParams{};
    p.gate_delays[CellKind::And2] = 0;
    CHECK_FALSE(check_params(p).empty());
    p = GenParams{};
    p.buffer_delay_ps = 0;
    CHECK_FALSE(check_params(p).empty());
}

TEST_CASE("ports exist in the netlist") {
    const AerTree t = build_aer_tree(GenParams{});
    for (NetId n : t.ports.leaf_req_in) CHECK(t.netlist.is_input_port(n));
    CHECK(t.netlist.is_input_port(t.ports.root_ack_in));
    CHECK(t.netlist.output_port("root_req") == t.ports.root_req_out);
    for (std::size_t i = 0; i < t.ports.root_addr_out.size(); ++i)
        CHECK(t.netlist.output_port("root_addr[" + std::to_string(i) + "]") == t.ports.root_addr_out[i]);
}

TEST_CASE("address_of_leaf examples and tree-path oracle") {
    CHECK(address_string(address_of_leaf(0, 8)) == "000");
    CHECK(address_string(address_of_leaf(7, 8)) == "111");
    CHECK(address_string(address_of_leaf(5, 8)) == "101");
    CHECK_THROWS_AS(address_of_leaf(8, 8), Error);
    CHECK_THROWS_AS(address_of_leaf(-1, 8), Error);
    for (int n : {2, 4, 8, 16}) {
        GenParams p;
        p.num_events = n;
        p.ctrl_delay_buffers.assign(static_cast<std::size_t>(stage_count(n)), 0);
        const AerTree t = build_aer_tree(p);
        for (int leaf = 0; leaf < n; ++leaf) {
            const Address a = address_of_leaf(leaf, n);
            CHECK(a == tree_path_bits(t.ports, leaf));
            CHECK(address_value(a) == leaf);
        }
    }
}

TEST_CASE("generation is deterministic") {
    GenParams p;
    p.expand_c_elements = true;
    p.datapath_pad_gates = {0, 3, 1};
    const AerTree a = build_aer_tree(p), b = build_aer_tree(p);
    CHECK(a.netlist == b.netlist);
    CHECK(a.ports == b.ports);
    CHECK(serialize(a.netlist) == serialize(b.netlist));
}

TEST_CASE("expanded C-elements: gate network with identical path delays") {
    GenParams p;
    p.expand_c_elements = true;
    const AerTree t = build_aer_tree(p);
    CHECK(validate(t.netlist).ok());
    CHECK(census(t.netlist).count(CellKind::CElement) == 0);
    int keepers = 0;
    for (const Cell& c : t.netlist.cells()) keepers += c.keeper;
    CHECK(keepers == 2 * 7);
    p.gate_delays[CellKind::CElement] = 3;
    CHECK_THROWS_AS(build_aer_tree(p), Error);
}

TEST_CASE("datapath padding and scaling") {
    GenParams p;
    p.datapath_pad_gates = {0, 10, 0};
    const AerTree t = build_aer_tree(p);
    const auto regs1 = t.ports.stage_registers(1), regs0 = t.ports.stage_registers(0);
    CHECK(longest_register_to_register_path(t.netlist, regs0, regs1) == 100 + 10 * 50);
    p.datapath_pad_gates = {};
    p.datapath_delay_scale = 1.5;
    const AerTree s = build_aer_tree(p);
    CHECK(longest_register_to_register_path(s.netlist, s.ports.stage_registers(0), s.ports.stage_registers(1)) == 150);
}

TEST_CASE("GenParams and PortMap JSON round trip") {
    GenParams p;
    p.num_events = 16;
    p.ctrl_delay_buffers = {1, 2, 3, 4};
    p.gate_delays[CellKind::Mux2] = 123;
    p.datapath_pad_gates = {0, 1, 0, 2};
    p.fault = FaultInjection{FaultInjection::Kind::DropAckNext, 1, 2};
    const GenParams q = gen_params_from_json(nlohmann::json::parse(to_json(p).dump()));
    CHECK(q == p);
    const AerTree t = build_aer_tree(p);
    CHECK(port_map_from_json(nlohmann::json::parse(to_json(t.ports).dump())) == t.ports);
}
