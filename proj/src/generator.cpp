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

// Tree node wiring (one node, children L/R, parent P):
//
//   r1      = OR(req_L, ack_L)          arbiter request held until the child's RTZ
//   g1, g2  = MUTEX(r1, r2)
//   merged  = OR(AND(req_L, g1), AND(req_R, g2))
//   delayed = merged through ctrl_delay_buffers[stage] DELAY_BUFFERs
//   ack     = C(delayed, NOT req_out)   local ACK, clocks the address register
//   ack_L   = AND(ack, g1), ack_R = AND(ack, g2)
//   req_out = C(ack, NOT ack_next)
//   addr[s] = DFF(ack, g2), addr[i<s] = DFF(ack, MUX(g2, addr_L[i], addr_R[i]))
//
// The root's req_out reaches the root_req port through one matched DELAY_BUFFER
// covering clk-to-q of the root register.

#include "aer/generator.hpp"

#include <bit>
#include <cmath>
#include <sstream>

namespace aer {

std::map<CellKind, Time> GenParams::default_gate_delays() {
    return {
        {CellKind::And2, 50},     {CellKind::Or2, 50},       {CellKind::Nand2, 50},
        {CellKind::Not, 50},      {CellKind::Mux2, 100},     {CellKind::CElement, 100},
        {CellKind::DffRising, 100}, {CellKind::MutexArbiter, 100},
    };
}

Time GenParams::delay_of(CellKind kind) const {
    if (auto it = gate_delays.find(kind); it != gate_delays.end()) return it->second;
    const auto defaults = default_gate_delays();
    if (auto it = defaults.find(kind); it != defaults.end()) return it->second;
    return 1;
}

int stage_count(int num_events) {
    if (num_events < 2 || !std::has_single_bit(static_cast<unsigned>(num_events))) return 0;
    return std::countr_zero(static_cast<unsigned>(num_events));
}

std::vector<CellId> PortMap::stage_registers(int stage) const {
    std::vector<CellId> regs;
    for (const NodePorts& n : stages.at(static_cast<std::size_t>(stage)))
        regs.insert(regs.end(), n.registers.begin(), n.registers.end());
    return regs;
}

std::vector<std::string> check_params(const GenParams& p) {
    std::vector<std::string> problems;
    const int stages = stage_count(p.num_events);
    if (stages == 0) {
        problems.push_back("num_events must be a power of two >= 2 (got " + std::to_string(p.num_events) + ")");
    } else {
        if (p.ctrl_delay_buffers.size() != static_cast<std::size_t>(stages))
            problems.push_back("ctrl_delay_buffers must have log2(num_events) = " + std::to_string(stages) +
                               " entries (got " + std::to_string(p.ctrl_delay_buffers.size()) + ")");
        if (!p.datapath_pad_gates.empty() && p.datapath_pad_gates.size() != static_cast<std::size_t>(stages))
            problems.push_back("datapath_pad_gates must be empty or have " + std::to_string(stages) + " entries");
        if (p.fault) {
            if (p.fault->stage < 0 || p.fault->stage >= stages)
                problems.push_back("fault.stage out of range");
            else if (p.fault->node < 0 || p.fault->node >= (p.num_events >> (p.fault->stage + 1)))
                problems.push_back("fault.node out of range");
        }
    }
    for (int b : p.ctrl_delay_buffers) {
        if (b < 0) problems.push_back("ctrl_delay_buffers entries must be >= 0");
    }
    for (int g : p.datapath_pad_gates) {
        if (g < 0) problems.push_back("datapath_pad_gates entries must be >= 0");
    }
    for (const auto& [kind, d] : p.gate_delays) {
        if (d < 1) problems.push_back("gate delay for " + std::string(to_string(kind)) + " must be >= 1");
    }
    if (p.buffer_delay_ps < 1) problems.push_back("buffer_delay_ps must be >= 1");
    if (p.dff_setup_ps < 0 || p.dff_hold_ps < 0) problems.push_back("dff_setup_ps and dff_hold_ps must be >= 0");
    if (p.arbiter_meta_window_ps < 0 || p.arbiter_resolution_tau_ps < 0)
        problems.push_back("arbiter timing parameters must be >= 0");
    if (!(p.datapath_delay_scale > 0.0)) problems.push_back("datapath_delay_scale must be > 0");
    if (p.root_out_delay_ps < 0) problems.push_back("root_out_delay_ps must be >= 0");
    if (p.expand_c_elements && p.delay_of(CellKind::CElement) < 4)
        problems.push_back("C_ELEMENT delay must be >= 4 ps when expand_c_elements is set");
    return problems;
}

namespace {

class TreeBuilder {
public:
    explicit TreeBuilder(const GenParams& p) : p_(p), stages_(stage_count(p.num_events)) {}

    AerTree build() {
        ports_.num_events = p_.num_events;
        for (int i = 0; i < p_.num_events; ++i) {
            const std::string idx = "[" + std::to_string(i) + "]";
            NetId req = b_.add_net("leaf_req" + idx);
            b_.add_input_port("leaf_req" + idx, req);
            ports_.leaf_req_in.push_back(req);
            ports_.leaf_ack_out.push_back(b_.add_net("leaf_ack" + idx));
        }
        ports_.root_ack_in = b_.add_net("root_ack");
        b_.add_input_port("root_ack", ports_.root_ack_in);

        // Pre-create every node's ack_next net so children can read it before the parent drives it.
        ack_next_.resize(static_cast<std::size_t>(stages_));
        for (int s = 0; s < stages_; ++s) {
            const int nodes = p_.num_events >> (s + 1);
            for (int j = 0; j < nodes; ++j) {
                ack_next_[s].push_back(s + 1 == stages_ ? ports_.root_ack_in
                                                        : b_.add_net(prefix(s, j) + "ack_next"));
            }
        }

        ports_.stages.resize(static_cast<std::size_t>(stages_));
        addr_.resize(static_cast<std::size_t>(stages_));
        for (int s = 0; s < stages_; ++s) {
            const int nodes = p_.num_events >> (s + 1);
            for (int j = 0; j < nodes; ++j) build_node(s, j);
        }

        const NodePorts& root = ports_.stages.back().front();
        ports_.root_req_out = b_.add_net("root_req");
        const Time out_delay = p_.root_out_delay_ps > 0
                                   ? p_.root_out_delay_ps
                                   : p_.delay_of(CellKind::DffRising) + p_.dff_setup_ps;
        b_.add_delay_buffer(root.req_out, ports_.root_req_out, std::max<Time>(out_delay, 1), "root.out_bundle");
        b_.add_output_port("root_req", ports_.root_req_out);
        ports_.root_addr_out = addr_.back().front();
        for (std::size_t i = 0; i < ports_.root_addr_out.size(); ++i)
            b_.add_output_port("root_addr[" + std::to_string(i) + "]", ports_.root_addr_out[i]);
        for (int i = 0; i < p_.num_events; ++i)
            b_.add_output_port("leaf_ack[" + std::to_string(i) + "]", ports_.leaf_ack_out[static_cast<std::size_t>(i)]);

        return {std::move(b_).build(), std::move(ports_)};
    }

private:
    static std::string prefix(int s, int j) { return "s" + std::to_string(s) + "n" + std::to_string(j) + "."; }

    NetId net(const std::string& name) { return b_.add_net(name); }

    CellId gate(CellKind kind, std::vector<NetId> in, NetId out, const std::string& name) {
        return b_.add_cell(kind, std::move(in), {out}, p_.delay_of(kind), name);
    }

    Time datapath_delay(CellKind kind) const {
        const double scaled = std::round(static_cast<double>(p_.delay_of(kind)) * p_.datapath_delay_scale);
        return std::max<Time>(1, static_cast<Time>(scaled));
    }

    NetId const_low() {
        if (!const_low_.valid()) {
            const_low_ = net("const0");
            b_.add_cell(CellKind::Source, {}, {const_low_}, 0, "const0");
        }
        return const_low_;
    }

    // Behavioral C-element, or the AND/OR network q = a.b + q.(a + b) with delays
    // split so every input-to-output path matches the primitive's delay.
    CellId c_element(NetId a, NetId b, NetId q, const std::string& name) {
        const Time d = p_.delay_of(CellKind::CElement);
        if (!p_.expand_c_elements) return b_.add_cell(CellKind::CElement, {a, b}, {q}, d, name);
        const Time out_or = d / 2;
        const Time first = d - out_or;
        const Time any_or = first / 2;
        const Time hold_and = first - any_or;
        NetId both = net(name + ".ab");
        NetId any = net(name + ".a_or_b");
        NetId hold = net(name + ".hold");
        b_.add_cell(CellKind::And2, {a, b}, {both}, first, name + ".and_ab");
        b_.add_cell(CellKind::Or2, {a, b}, {any}, any_or, name + ".or_ab");
        b_.add_cell(CellKind::And2, {q, any}, {hold}, hold_and, name + ".and_hold");
        CellId keeper = b_.add_cell(CellKind::Or2, {both, hold}, {q}, out_or, name);
        b_.set_keeper(keeper);
        return keeper;
    }

    void build_node(int s, int j) {
        const std::string pre = prefix(s, j);
        NodePorts node;
        node.stage = s;
        node.index = j;

        std::array<std::vector<NetId>, 2> child_addr;
        for (int side = 0; side < 2; ++side) {
            const int child = 2 * j + side;
            if (s == 0) {
                node.child_req[side] = ports_.leaf_req_in[static_cast<std::size_t>(child)];
                node.child_ack[side] = ports_.leaf_ack_out[static_cast<std::size_t>(child)];
            } else {
                const NodePorts& c = ports_.stages[s - 1][static_cast<std::size_t>(child)];
                node.child_req[side] = c.req_out;
                node.child_ack[side] = c.ack_next;
                child_addr[side] = addr_[s - 1][static_cast<std::size_t>(child)];
            }
        }
        node.ack_next = ack_next_[s][static_cast<std::size_t>(j)];

        NetId r1 = net(pre + "r1"), r2 = net(pre + "r2");
        gate(CellKind::Or2, {node.child_req[0], node.child_ack[0]}, r1, pre + "hold_l");
        gate(CellKind::Or2, {node.child_req[1], node.child_ack[1]}, r2, pre + "hold_r");

        node.grant = {net(pre + "g1"), net(pre + "g2")};
        CellParams arb;
        arb.meta_window_ps = p_.arbiter_meta_window_ps;
        arb.resolution_tau_ps = p_.arbiter_resolution_tau_ps;
        node.arbiter = b_.add_cell(CellKind::MutexArbiter, {r1, r2}, {node.grant[0], node.grant[1]},
                                   p_.delay_of(CellKind::MutexArbiter), pre + "arb", arb);

        NetId sel_l = net(pre + "req_l"), sel_r = net(pre + "req_r");
        gate(CellKind::And2, {node.child_req[0], node.grant[0]}, sel_l, pre + "sel_l");
        gate(CellKind::And2, {node.child_req[1], node.grant[1]}, sel_r, pre + "sel_r");
        node.merged_req = net(pre + "req_merged");
        gate(CellKind::Or2, {sel_l, sel_r}, node.merged_req, pre + "merge");

        NetId tail = node.merged_req;
        const int buffers = p_.ctrl_delay_buffers[static_cast<std::size_t>(s)];
        for (int k = 0; k < buffers; ++k) {
            NetId next = net(pre + "req_d" + std::to_string(k));
            node.chain.push_back(b_.add_delay_buffer(tail, next, p_.buffer_delay_ps, pre + "chain" + std::to_string(k)));
            tail = next;
        }
        node.delayed_req = tail;

        node.local_ack = net(pre + "ack");
        node.req_out = net(pre + "req_out");
        NetId nreq_out = net(pre + "nreq_out");
        NetId nack_next = net(pre + "nack_next");
        node.c_elements.push_back(c_element(node.delayed_req, nreq_out, node.local_ack, pre + "c_in"));
        gate(CellKind::And2, {node.local_ack, node.grant[0]}, node.child_ack[0], pre + "ack_l");
        gate(CellKind::And2, {node.local_ack, node.grant[1]}, node.child_ack[1], pre + "ack_r");

        const bool drop_ack = p_.fault && p_.fault->kind == FaultInjection::Kind::DropAckNext &&
                              p_.fault->stage == s && p_.fault->node == j;
        gate(CellKind::Not, {drop_ack ? const_low() : node.ack_next}, nack_next, pre + "inv_ack_next");
        node.c_elements.push_back(c_element(node.local_ack, nack_next, node.req_out, pre + "c_out"));
        gate(CellKind::Not, {node.req_out}, nreq_out, pre + "inv_req_out");

        // Address register: bits below s are selected from the winning child, bit s is the grant.
        std::vector<NetId> q(static_cast<std::size_t>(s + 1));
        const int pads = p_.datapath_pad_gates.empty() ? 0 : p_.datapath_pad_gates[static_cast<std::size_t>(s)];
        CellParams dff;
        dff.setup_ps = p_.dff_setup_ps;
        dff.hold_ps = p_.dff_hold_ps;
        for (int bit = 0; bit <= s; ++bit) {
            const std::string b = std::to_string(bit);
            NetId d = node.grant[1];
            if (bit < s) {
                d = net(pre + "mux" + b);
                b_.add_cell(CellKind::Mux2, {node.grant[1], child_addr[0][static_cast<std::size_t>(bit)],
                                             child_addr[1][static_cast<std::size_t>(bit)]},
                            {d}, datapath_delay(CellKind::Mux2), pre + "mux" + b);
                for (int k = 0; k < pads; ++k) {
                    NetId padded = net(pre + "pad" + b + "_" + std::to_string(k));
                    b_.add_cell(CellKind::And2, {d, d}, {padded}, datapath_delay(CellKind::And2),
                                pre + "pad" + b + "_" + std::to_string(k));
                    d = padded;
                }
            }
            q[static_cast<std::size_t>(bit)] = net(pre + "addr" + b);
            node.registers.push_back(b_.add_cell(CellKind::DffRising, {node.local_ack, d},
                                                 {q[static_cast<std::size_t>(bit)]},
                                                 p_.delay_of(CellKind::DffRising), pre + "reg" + b, dff));
        }
        addr_[s].push_back(std::move(q));
        ports_.stages[s].push_back(std::move(node));
    }

    const GenParams& p_;
    const int stages_;
    NetlistBuilder b_;
    PortMap ports_;
    std::vector<std::vector<NetId>> ack_next_;
    std::vector<std::vector<std::vector<NetId>>> addr_;
    NetId const_low_;
};

}  // namespace

AerTree build_aer_tree(const GenParams& params) {
    const auto problems = check_params(params);
    if (!problems.empty()) {
        std::string msg = "invalid generator parameters: ";
        for (std::size_t i = 0; i < problems.size(); ++i) msg += (i ? "; " : "") + problems[i];
        throw Error(msg);
    }
    return TreeBuilder(params).build();
}

Address address_of_leaf(int leaf_index, int num_events) {
    const int stages = stage_count(num_events);
    if (stages == 0) throw Error("address_of_leaf: num_events must be a power of two >= 2");
    if (leaf_index < 0 || leaf_index >= num_events)
        throw Error("address_of_leaf: leaf index " + std::to_string(leaf_index) + " out of range [0, " +
                    std::to_string(num_events) + ")");
    Address addr(static_cast<std::size_t>(stages));
    for (int s = 0; s < stages; ++s) addr[static_cast<std::size_t>(s)] = ((leaf_index >> s) & 1) != 0;
    return addr;
}

std::string address_string(const Address& addr) {
    std::string s;
    for (auto it = addr.rbegin(); it != addr.rend(); ++it) s += *it ? '1' : '0';
    return s;
}

int address_value(const Address& addr) {
    int v = 0;
    for (std::size_t i = 0; i < addr.size(); ++i) v |= (addr[i] ? 1 : 0) << i;
    return v;
}

// ---------------------------------------------------------------------------
// JSON

using ojson = nlohmann::ordered_json;

ojson to_json(const GenParams& p) {
    ojson j;
    j["num_events"] = p.num_events;
    ojson delays = ojson::object();
    for (const auto& [kind, d] : p.gate_delays) delays[std::string(to_string(kind))] = d;
    j["gate_delays"] = std::move(delays);
    j["dff_setup_ps"] = p.dff_setup_ps;
    j["dff_hold_ps"] = p.dff_hold_ps;
    j["ctrl_delay_buffers"] = p.ctrl_delay_buffers;
    j["buffer_delay_ps"] = p.buffer_delay_ps;
    j["arbiter_meta_window_ps"] = p.arbiter_meta_window_ps;
    j["arbiter_resolution_tau_ps"] = p.arbiter_resolution_tau_ps;
    j["expand_c_elements"] = p.expand_c_elements;
    j["datapath_pad_gates"] = p.datapath_pad_gates;
    j["datapath_delay_scale"] = p.datapath_delay_scale;
    j["root_out_delay_ps"] = p.root_out_delay_ps;
    if (p.fault) j["fault"] = {{"kind", "drop_ack_next"}, {"stage", p.fault->stage}, {"node", p.fault->node}};
    return j;
}

namespace {

template <typename T>
T field(const nlohmann::json& j, const char* key, T fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception&) {
        throw Error(std::string("generator config: field '") + key + "' has the wrong type");
    }
}

}  // namespace

GenParams gen_params_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error("generator config: expected an object");
    GenParams p;
    p.num_events = field<int>(j, "num_events", p.num_events);
    const int stages = stage_count(p.num_events);
    if (stages > 0) p.ctrl_delay_buffers.assign(static_cast<std::size_t>(stages), 0);
    if (auto it = j.find("gate_delays"); it != j.end()) {
        if (!it->is_object()) throw Error("generator config: gate_delays must be an object");
        for (const auto& [name, value] : it->items()) {
            auto kind = cell_kind_from_string(name);
            if (!kind) throw Error("generator config: unknown cell kind '" + name + "' in gate_delays");
            if (!value.is_number_integer()) throw Error("generator config: gate_delays." + name + " must be an integer");
            p.gate_delays[*kind] = value.get<Time>();
        }
    }
    p.dff_setup_ps = field<Time>(j, "dff_setup_ps", p.dff_setup_ps);
    p.dff_hold_ps = field<Time>(j, "dff_hold_ps", p.dff_hold_ps);
    p.ctrl_delay_buffers = field<std::vector<int>>(j, "ctrl_delay_buffers", p.ctrl_delay_buffers);
    p.buffer_delay_ps = field<Time>(j, "buffer_delay_ps", p.buffer_delay_ps);
    p.arbiter_meta_window_ps = field<Time>(j, "arbiter_meta_window_ps", p.arbiter_meta_window_ps);
    p.arbiter_resolution_tau_ps = field<Time>(j, "arbiter_resolution_tau_ps", p.arbiter_resolution_tau_ps);
    p.expand_c_elements = field<bool>(j, "expand_c_elements", p.expand_c_elements);
    p.datapath_pad_gates = field<std::vector<int>>(j, "datapath_pad_gates", p.datapath_pad_gates);
    p.datapath_delay_scale = field<double>(j, "datapath_delay_scale", p.datapath_delay_scale);
    p.root_out_delay_ps = field<Time>(j, "root_out_delay_ps", p.root_out_delay_ps);
    if (auto it = j.find("fault"); it != j.end() && !it->is_null()) {
        if (field<std::string>(*it, "kind", "drop_ack_next") != "drop_ack_next")
            throw Error("generator config: unknown fault kind");
        p.fault = FaultInjection{FaultInjection::Kind::DropAckNext, field<int>(*it, "stage", 0), field<int>(*it, "node", 0)};
    }
    return p;
}

namespace {

ojson ids(const std::vector<NetId>& v) {
    ojson a = ojson::array();
    for (NetId n : v) a.push_back(n.value);
    return a;
}

ojson ids(const std::vector<CellId>& v) {
    ojson a = ojson::array();
    for (CellId c : v) a.push_back(c.value);
    return a;
}

std::vector<NetId> net_ids(const nlohmann::json& j) {
    std::vector<NetId> v;
    for (const auto& x : j) v.emplace_back(x.get<std::uint32_t>());
    return v;
}

std::vector<CellId> cell_ids(const nlohmann::json& j) {
    std::vector<CellId> v;
    for (const auto& x : j) v.emplace_back(x.get<std::uint32_t>());
    return v;
}

}  // namespace

ojson to_json(const PortMap& m) {
    ojson j;
    j["num_events"] = m.num_events;
    j["leaf_req_in"] = ids(m.leaf_req_in);
    j["leaf_ack_out"] = ids(m.leaf_ack_out);
    j["root_req_out"] = m.root_req_out.value;
    j["root_ack_in"] = m.root_ack_in.value;
    j["root_addr_out"] = ids(m.root_addr_out);
    ojson stages = ojson::array();
    for (const auto& stage : m.stages) {
        ojson nodes = ojson::array();
        for (const NodePorts& n : stage) {
            ojson o;
            o["stage"] = n.stage;
            o["index"] = n.index;
            o["child_req"] = {n.child_req[0].value, n.child_req[1].value};
            o["child_ack"] = {n.child_ack[0].value, n.child_ack[1].value};
            o["grant"] = {n.grant[0].value, n.grant[1].value};
            o["merged_req"] = n.merged_req.value;
            o["delayed_req"] = n.delayed_req.value;
            o["local_ack"] = n.local_ack.value;
            o["req_out"] = n.req_out.value;
            o["ack_next"] = n.ack_next.value;
            o["arbiter"] = n.arbiter.value;
            o["registers"] = ids(n.registers);
            o["chain"] = ids(n.chain);
            o["c_elements"] = ids(n.c_elements);
            nodes.push_back(std::move(o));
        }
        stages.push_back(std::move(nodes));
    }
    j["stages"] = std::move(stages);
    return j;
}

PortMap port_map_from_json(const nlohmann::json& j) {
    try {
        PortMap m;
        m.num_events = j.at("num_events").get<int>();
        m.leaf_req_in = net_ids(j.at("leaf_req_in"));
        m.leaf_ack_out = net_ids(j.at("leaf_ack_out"));
        m.root_req_out = NetId{j.at("root_req_out").get<std::uint32_t>()};
        m.root_ack_in = NetId{j.at("root_ack_in").get<std::uint32_t>()};
        m.root_addr_out = net_ids(j.at("root_addr_out"));
        for (const auto& stage : j.at("stages")) {
            auto& nodes = m.stages.emplace_back();
            for (const auto& o : stage) {
                NodePorts n;
                n.stage = o.at("stage").get<int>();
                n.index = o.at("index").get<int>();
                for (int k = 0; k < 2; ++k) {
                    n.child_req[k] = NetId{o.at("child_req").at(k).get<std::uint32_t>()};
                    n.child_ack[k] = NetId{o.at("child_ack").at(k).get<std::uint32_t>()};
                    n.grant[k] = NetId{o.at("grant").at(k).get<std::uint32_t>()};
                }
                n.merged_req = NetId{o.at("merged_req").get<std::uint32_t>()};
                n.delayed_req = NetId{o.at("delayed_req").get<std::uint32_t>()};
                n.local_ack = NetId{o.at("local_ack").get<std::uint32_t>()};
                n.req_out = NetId{o.at("req_out").get<std::uint32_t>()};
                n.ack_next = NetId{o.at("ack_next").get<std::uint32_t>()};
                n.arbiter = CellId{o.at("arbiter").get<std::uint32_t>()};
                n.registers = cell_ids(o.at("registers"));
                n.chain = cell_ids(o.at("chain"));
                n.c_elements = cell_ids(o.at("c_elements"));
                nodes.push_back(std::move(n));
            }
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("port map document: ") + e.what());
    }
}

}  // namespace aer
