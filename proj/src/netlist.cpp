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

#include "aer/netlist.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

namespace aer {

std::string_view to_string(CellKind kind) {
    switch (kind) {
    case CellKind::And2: return "AND2";
    case CellKind::Or2: return "OR2";
    case CellKind::Nand2: return "NAND2";
    case CellKind::Not: return "NOT";
    case CellKind::Mux2: return "MUX2";
    case CellKind::DelayBuffer: return "DELAY_BUFFER";
    case CellKind::CElement: return "C_ELEMENT";
    case CellKind::DffRising: return "DFF_RISING";
    case CellKind::MutexArbiter: return "MUTEX_ARBITER";
    case CellKind::Source: return "SOURCE";
    case CellKind::Probe: return "PROBE";
    }
    return "?";
}

std::optional<CellKind> cell_kind_from_string(std::string_view name) {
    for (CellKind k : kAllCellKinds) {
        if (to_string(k) == name) return k;
    }
    return std::nullopt;
}

PinSignature signature(CellKind kind) {
    switch (kind) {
    case CellKind::And2:
    case CellKind::Or2:
    case CellKind::Nand2:
    case CellKind::CElement:
    case CellKind::DffRising: return {2, 1};
    case CellKind::Not:
    case CellKind::DelayBuffer: return {1, 1};
    case CellKind::Mux2: return {3, 1};
    case CellKind::MutexArbiter: return {2, 2};
    case CellKind::Source: return {0, 1};
    case CellKind::Probe: return {1, 0};
    }
    return {0, 0};
}

bool is_stateful(CellKind kind) {
    return kind == CellKind::CElement || kind == CellKind::DffRising || kind == CellKind::MutexArbiter;
}

// ---------------------------------------------------------------------------

Netlist::Netlist(std::vector<Net> nets, std::vector<Cell> cells, std::vector<Port> input_ports,
                 std::vector<Port> output_ports)
    : nets_(std::move(nets)),
      cells_(std::move(cells)),
      input_ports_(std::move(input_ports)),
      output_ports_(std::move(output_ports)) {}

std::optional<NetId> Netlist::find_net(std::string_view name) const {
    for (const Net& n : nets_) {
        if (n.name == name) return n.id;
    }
    return std::nullopt;
}

std::optional<CellId> Netlist::find_cell(std::string_view name) const {
    for (const Cell& c : cells_) {
        if (c.name == name) return c.id;
    }
    return std::nullopt;
}

std::optional<NetId> Netlist::input_port(std::string_view name) const {
    for (const Port& p : input_ports_) {
        if (p.name == name) return p.net;
    }
    return std::nullopt;
}

std::optional<NetId> Netlist::output_port(std::string_view name) const {
    for (const Port& p : output_ports_) {
        if (p.name == name) return p.net;
    }
    return std::nullopt;
}

bool Netlist::is_input_port(NetId net) const {
    return std::any_of(input_ports_.begin(), input_ports_.end(), [&](const Port& p) { return p.net == net; });
}

std::string Netlist::net_label(NetId id) const {
    if (has_net(id) && !nets_[id.index()].name.empty()) return nets_[id.index()].name;
    return "n" + std::to_string(id.value);
}

// ---------------------------------------------------------------------------

NetId NetlistBuilder::add_net(std::string name) {
    NetId id{static_cast<std::uint32_t>(nets_.size())};
    nets_.push_back({id, std::move(name)});
    return id;
}

CellId NetlistBuilder::add_cell(CellKind kind, std::vector<NetId> inputs, std::vector<NetId> outputs,
                                Time prop_delay_ps, std::string name, CellParams params) {
    CellId id{static_cast<std::uint32_t>(cells_.size())};
    Cell c;
    c.id = id;
    c.kind = kind;
    c.inputs = std::move(inputs);
    c.outputs = std::move(outputs);
    c.prop_delay_ps = prop_delay_ps;
    c.params = params;
    c.name = std::move(name);
    cells_.push_back(std::move(c));
    return id;
}

CellId NetlistBuilder::add_delay_buffer(NetId in, NetId out, Time delay_ps, std::string name) {
    CellParams p;
    p.delay_ps = delay_ps;
    return add_cell(CellKind::DelayBuffer, {in}, {out}, delay_ps, std::move(name), p);
}

void NetlistBuilder::set_keeper(CellId cell) { cells_.at(cell.index()).keeper = true; }

void NetlistBuilder::add_input_port(std::string name, NetId net) { inputs_.push_back({std::move(name), net}); }

void NetlistBuilder::add_output_port(std::string name, NetId net) { outputs_.push_back({std::move(name), net}); }

Netlist NetlistBuilder::build() && {
    return Netlist(std::move(nets_), std::move(cells_), std::move(inputs_), std::move(outputs_));
}

// ---------------------------------------------------------------------------

std::string_view to_string(ViolationKind kind) {
    switch (kind) {
    case ViolationKind::MultiDriver: return "MULTI_DRIVER";
    case ViolationKind::Undriven: return "UNDRIVEN";
    case ViolationKind::UnknownNet: return "UNKNOWN_NET";
    case ViolationKind::Arity: return "ARITY";
    case ViolationKind::BadDelay: return "BAD_DELAY";
    case ViolationKind::CombinationalCycle: return "COMBINATIONAL_CYCLE";
    }
    return "?";
}

std::size_t ValidationReport::count(ViolationKind kind) const {
    return static_cast<std::size_t>(
        std::count_if(violations.begin(), violations.end(), [&](const auto& v) { return v.kind == kind; }));
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    for (const auto& v : violations) os << to_string(v.kind) << ": " << v.message << '\n';
    return os.str();
}

NetlistIndex::NetlistIndex(const Netlist& netlist)
    : driver(netlist.nets().size()), loads(netlist.nets().size()) {
    for (const Cell& c : netlist.cells()) {
        for (NetId out : c.outputs) {
            if (netlist.has_net(out) && !driver[out.index()].valid()) driver[out.index()] = c.id;
        }
        for (std::uint32_t pin = 0; pin < c.inputs.size(); ++pin) {
            NetId in = c.inputs[pin];
            if (netlist.has_net(in)) loads[in.index()].push_back({c.id, pin});
        }
    }
}

namespace {

std::string cell_label(const Cell& c) {
    std::string s = "cell " + std::to_string(c.id.value);
    if (!c.name.empty()) s += " (" + c.name + ")";
    return s;
}

// Strongly connected components over combinational edges (iterative Tarjan).
std::vector<std::vector<CellId>> combinational_cycles(const Netlist& netlist) {
    const auto cells = netlist.cells();
    const std::size_t n = cells.size();
    std::vector<std::vector<std::uint32_t>> succ(n);
    NetlistIndex index(netlist);
    for (const Cell& c : cells) {
        if (c.holds_state()) continue;
        for (NetId out : c.outputs) {
            if (!netlist.has_net(out)) continue;
            for (const auto& load : index.loads[out.index()]) succ[c.id.index()].push_back(load.cell.value);
        }
    }

    std::vector<std::int64_t> order(n, -1);
    std::vector<std::int64_t> low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::uint32_t> stack;
    std::vector<std::vector<CellId>> cycles;
    std::int64_t counter = 0;

    struct Frame {
        std::uint32_t node;
        std::size_t edge;
    };
    for (std::uint32_t root = 0; root < n; ++root) {
        if (order[root] >= 0) continue;
        std::vector<Frame> frames{{root, 0}};
        order[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.edge < succ[f.node].size()) {
                std::uint32_t next = succ[f.node][f.edge++];
                if (order[next] < 0) {
                    order[next] = low[next] = counter++;
                    stack.push_back(next);
                    on_stack[next] = true;
                    frames.push_back({next, 0});
                } else if (on_stack[next]) {
                    low[f.node] = std::min(low[f.node], order[next]);
                }
                continue;
            }
            const std::uint32_t node = f.node;
            frames.pop_back();
            if (!frames.empty()) low[frames.back().node] = std::min(low[frames.back().node], low[node]);
            if (low[node] != order[node]) continue;
            std::vector<CellId> scc;
            std::uint32_t member;
            do {
                member = stack.back();
                stack.pop_back();
                on_stack[member] = false;
                scc.push_back(CellId{member});
            } while (member != node);
            const bool self_loop =
                std::find(succ[node].begin(), succ[node].end(), node) != succ[node].end();
            if (scc.size() > 1 || self_loop) {
                std::sort(scc.begin(), scc.end());
                cycles.push_back(std::move(scc));
            }
        }
    }
    return cycles;
}

}  // namespace

ValidationReport validate(const Netlist& netlist) {
    ValidationReport report;
    auto add = [&](ViolationKind kind, std::vector<CellId> cells, std::vector<NetId> nets, std::string msg) {
        report.violations.push_back({kind, std::move(cells), std::move(nets), std::move(msg)});
    };

    std::vector<std::uint32_t> drivers(netlist.nets().size(), 0);
    for (const Port& p : netlist.input_ports()) {
        if (!netlist.has_net(p.net)) {
            add(ViolationKind::UnknownNet, {}, {p.net}, "input port '" + p.name + "' references missing net");
            continue;
        }
        ++drivers[p.net.index()];
    }
    for (const Port& p : netlist.output_ports()) {
        if (!netlist.has_net(p.net))
            add(ViolationKind::UnknownNet, {}, {p.net}, "output port '" + p.name + "' references missing net");
    }

    for (const Cell& c : netlist.cells()) {
        const PinSignature sig = signature(c.kind);
        if (c.inputs.size() != sig.inputs || c.outputs.size() != sig.outputs) {
            add(ViolationKind::Arity, {c.id}, {},
                cell_label(c) + " of kind " + std::string(to_string(c.kind)) + " has " +
                    std::to_string(c.inputs.size()) + " inputs/" + std::to_string(c.outputs.size()) +
                    " outputs, expected " + std::to_string(sig.inputs) + "/" + std::to_string(sig.outputs));
        }
        for (NetId in : c.inputs) {
            if (!netlist.has_net(in))
                add(ViolationKind::UnknownNet, {c.id}, {in}, cell_label(c) + " reads missing net " +
                                                                 std::to_string(in.value));
        }
        for (NetId out : c.outputs) {
            if (!netlist.has_net(out)) {
                add(ViolationKind::UnknownNet, {c.id}, {out},
                    cell_label(c) + " drives missing net " + std::to_string(out.value));
                continue;
            }
            ++drivers[out.index()];
        }
        if (c.kind != CellKind::Source && c.prop_delay_ps < 1)
            add(ViolationKind::BadDelay, {c.id}, {}, cell_label(c) + " has prop_delay_ps < 1");
        if (c.kind == CellKind::Source && c.prop_delay_ps < 0)
            add(ViolationKind::BadDelay, {c.id}, {}, cell_label(c) + " has negative prop_delay_ps");
        const CellParams& p = c.params;
        if (p.delay_ps < 0 || p.setup_ps < 0 || p.hold_ps < 0 || p.meta_window_ps < 0 || p.resolution_tau_ps < 0)
            add(ViolationKind::BadDelay, {c.id}, {}, cell_label(c) + " has a negative timing parameter");
        if (c.kind == CellKind::DelayBuffer && p.delay_ps != c.prop_delay_ps)
            add(ViolationKind::BadDelay, {c.id}, {}, cell_label(c) + " delay_ps differs from prop_delay_ps");
    }

    for (const Net& n : netlist.nets()) {
        const auto d = drivers[n.id.index()];
        if (d > 1)
            add(ViolationKind::MultiDriver, {}, {n.id},
                "net '" + netlist.net_label(n.id) + "' has " + std::to_string(d) + " drivers");
        else if (d == 0)
            add(ViolationKind::Undriven, {}, {n.id}, "net '" + netlist.net_label(n.id) + "' has no driver");
    }

    for (auto& cycle : combinational_cycles(netlist)) {
        std::string msg = "combinational cycle through";
        for (CellId id : cycle) msg += " " + cell_label(netlist.cell(id));
        add(ViolationKind::CombinationalCycle, std::move(cycle), {}, std::move(msg));
    }
    return report;
}

// ---------------------------------------------------------------------------

Time longest_register_to_register_path(const Netlist& netlist, std::span<const CellId> from,
                                       std::span<const CellId> to) {
    auto check = [&](CellId id) {
        if (!netlist.has_cell(id) || netlist.cell(id).kind != CellKind::DffRising)
            throw Error("longest_register_to_register_path: cell " + std::to_string(id.value) +
                        " is not a DFF_RISING register");
    };
    for (CellId id : from) check(id);
    for (CellId id : to) check(id);

    std::unordered_set<CellId> targets(to.begin(), to.end());
    NetlistIndex index(netlist);
    constexpr Time kNone = -1;
    // best[net]: longest delay from this net to a target d pin, kNone when unreachable.
    std::vector<Time> best(netlist.nets().size(), kNone);
    std::vector<std::uint8_t> state(netlist.nets().size(), 0);  // 0 new, 1 active, 2 done

    auto visit = [&](auto&& self, NetId net) -> Time {
        auto& st = state[net.index()];
        if (st == 2) return best[net.index()];
        if (st == 1) throw Error("longest_register_to_register_path: combinational cycle at net " +
                                 netlist.net_label(net));
        st = 1;
        Time result = kNone;
        for (const auto& load : index.loads[net.index()]) {
            const Cell& c = netlist.cell(load.cell);
            if (c.kind == CellKind::DffRising) {
                if (load.pin == pin::kDffD && targets.contains(c.id)) result = std::max<Time>(result, 0);
                continue;
            }
            if (c.holds_state() || c.kind == CellKind::Probe || c.kind == CellKind::Source) continue;
            for (NetId out : c.outputs) {
                const Time down = self(self, out);
                if (down != kNone) result = std::max(result, down + c.prop_delay_ps);
            }
        }
        st = 2;
        best[net.index()] = result;
        return result;
    };

    Time longest = 0;
    for (CellId id : from) {
        const Cell& reg = netlist.cell(id);
        if (reg.outputs.empty() || !netlist.has_net(reg.outputs[0])) continue;
        longest = std::max(longest, visit(visit, reg.outputs[0]));
    }
    return longest;
}

}  // namespace aer
