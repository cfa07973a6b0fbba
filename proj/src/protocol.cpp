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

#include "aer/protocol.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <iterator>
#include <queue>
#include <set>
#include <utility>

namespace aer {

std::string_view to_string(ProtocolViolationKind kind) {
    switch (kind) {
    case ProtocolViolationKind::PhaseOrder: return "PHASE_ORDER";
    case ProtocolViolationKind::Bundling: return "BUNDLING";
    case ProtocolViolationKind::AddressMismatch: return "ADDRESS_MISMATCH";
    case ProtocolViolationKind::TokenLoss: return "TOKEN_LOSS";
    case ProtocolViolationKind::TokenDuplication: return "TOKEN_DUPLICATION";
    case ProtocolViolationKind::Deadlock: return "DEADLOCK";
    }
    return "?";
}

namespace {

std::string node_name(int stage, int node) { return "s" + std::to_string(stage) + "n" + std::to_string(node); }

// Four-phase position, encoded as (req, ack) levels.
enum class Phase : std::uint8_t { Idle, ReqHigh, Acked, ReqLow };

Phase phase_of(LogicLevel req, LogicLevel ack) {
    const bool r = req == LogicLevel::High;
    const bool a = ack == LogicLevel::High;
    if (!r && !a) return Phase::Idle;
    if (r && !a) return Phase::ReqHigh;
    if (r && a) return Phase::Acked;
    return Phase::ReqLow;
}

struct PhaseMonitor {
    LogicLevel req = LogicLevel::Low;
    LogicLevel ack = LogicLevel::Low;

    // Returns a description of the illegal edge, or nullptr for a legal one.
    const char* step(bool is_req, LogicLevel v) {
        const Phase p = phase_of(req, ack);
        const char* err = nullptr;
        if (v == LogicLevel::Unknown || (is_req ? req : ack) == LogicLevel::Unknown) {
            err = "edge involves X";
        } else if (is_req) {
            if (v == LogicLevel::High && p != Phase::Idle) err = "REQ rose before ACK returned low";
            if (v == LogicLevel::Low && p != Phase::Acked) err = "REQ fell before ACK rose";
        } else {
            if (v == LogicLevel::High && p != Phase::ReqHigh) err = "ACK rose without a pending REQ";
            if (v == LogicLevel::Low && p != Phase::ReqLow) err = "ACK fell before REQ fell";
        }
        (is_req ? req : ack) = v;
        return err;
    }
};

}  // namespace

std::vector<Boundary> tree_boundaries(const PortMap& ports) {
    std::vector<Boundary> out;
    for (const auto& stage : ports.stages) {
        for (const NodePorts& n : stage) {
            const std::string name = node_name(n.stage, n.index);
            out.push_back({n.child_req[0], n.child_ack[0], name + ".left"});
            out.push_back({n.child_req[1], n.child_ack[1], name + ".right"});
            out.push_back({n.delayed_req, n.local_ack, name + ".local"});
        }
    }
    out.push_back({ports.root_req_out, ports.root_ack_in, "root.out"});
    return out;
}

std::vector<ProtocolViolation> check_four_phase(const Trace& trace, const Boundary& boundary) {
    return check_four_phase(trace, std::span<const Boundary>(&boundary, 1));
}

std::vector<ProtocolViolation> check_four_phase(const Trace& trace, std::span<const Boundary> boundaries) {
    // net -> (boundary, is_req) roles
    std::vector<std::vector<std::pair<std::uint32_t, bool>>> roles(trace.net_count);
    for (std::size_t b = 0; b < boundaries.size(); ++b) {
        roles.at(boundaries[b].req.index()).emplace_back(static_cast<std::uint32_t>(b), true);
        roles.at(boundaries[b].ack.index()).emplace_back(static_cast<std::uint32_t>(b), false);
    }
    std::vector<PhaseMonitor> monitors(boundaries.size());
    std::vector<ProtocolViolation> out;
    for (const Transition& t : trace.transitions) {
        for (const auto& [b, is_req] : roles[t.net.index()]) {
            if (const char* err = monitors[b].step(is_req, t.level)) {
                out.push_back({ProtocolViolationKind::PhaseOrder, boundaries[b].name, t.time_ps,
                               std::string(is_req ? "REQ " : "ACK ") + level_char(t.level) + ": " + err});
            }
        }
    }
    return out;
}

namespace {

struct DataSource {
    NetId net;
    Time min_delay_ps;  // shortest combinational path to the d-input
};

// Nets whose transitions launch data toward `d` (outputs of registers,
// arbiters and sources, and port-driven nets), reached through combinational
// cells, each with its shortest path delay.
std::vector<DataSource> data_sources(const Netlist& netlist, const NetlistIndex& index, NetId d) {
    std::vector<Time> dist(netlist.nets().size(), kNever);
    using Item = std::pair<Time, std::uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    dist[d.index()] = 0;
    queue.push({0, d.value});
    std::vector<DataSource> out;
    while (!queue.empty()) {
        const auto [at, n] = queue.top();
        queue.pop();
        if (at != dist[n]) continue;
        const CellId drv = index.driver[n];
        bool through = false;
        if (drv.valid()) {
            switch (netlist.cell(drv).kind) {
            case CellKind::And2:
            case CellKind::Or2:
            case CellKind::Nand2:
            case CellKind::Not:
            case CellKind::Mux2:
            case CellKind::DelayBuffer: through = !netlist.cell(drv).keeper; break;
            default: break;
            }
        }
        if (!through) {
            out.push_back({NetId{n}, at});
            continue;
        }
        const Cell& c = netlist.cell(drv);
        for (NetId in : c.inputs) {
            const Time nd = at + c.prop_delay_ps;
            if (dist[in.index()] == kNever || nd < dist[in.index()]) {
                dist[in.index()] = nd;
                queue.push({nd, in.value});
            }
        }
    }
    return out;
}

}  // namespace

std::vector<ProtocolViolation> check_bundling(const Trace& trace, const Netlist& netlist, const PortMap& ports,
                                              int stage) {
    if (stage < 0 || stage >= static_cast<int>(ports.stages.size()))
        throw Error("check_bundling: stage " + std::to_string(stage) + " out of range");
    const auto& nodes = ports.stages[static_cast<std::size_t>(stage)];
    const NetlistIndex index(netlist);

    std::vector<int> clock_of(trace.net_count, -1);  // net -> node index within the stage
    std::set<std::uint32_t> stage_cells;
    // d net -> (node, bit) of each register it feeds, with the data sources of that net
    std::vector<std::vector<std::pair<int, std::size_t>>> d_of(trace.net_count);
    std::vector<std::vector<DataSource>> sources(trace.net_count);
    std::vector<bool> is_source(trace.net_count, false);
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        clock_of.at(nodes[j].local_ack.index()) = static_cast<int>(j);
        for (std::size_t bit = 0; bit < nodes[j].registers.size(); ++bit) {
            const CellId r = nodes[j].registers[bit];
            stage_cells.insert(r.value);
            const NetId d = netlist.cell(r).inputs[pin::kDffD];
            d_of.at(d.index()).emplace_back(static_cast<int>(j), bit);
            if (sources[d.index()].empty()) sources[d.index()] = data_sources(netlist, index, d);
            for (const DataSource& src : sources[d.index()]) is_source[src.net.index()] = true;
        }
    }

    std::set<std::pair<std::uint32_t, Time>> sim_setup;
    for (const TimingViolation& v : trace.violations)
        if (v.kind == TimingViolationKind::Setup && stage_cells.count(v.cell.value)) sim_setup.insert({v.cell.value, v.time_ps});

    std::vector<Time> last_change(trace.net_count, kNever);
    std::vector<LogicLevel> level(trace.net_count, LogicLevel::Low);
    std::vector<Time> last_edge(nodes.size(), kNever);
    std::vector<std::vector<Time>> changes(trace.net_count);  // source nets only
    std::set<std::pair<std::uint32_t, Time>> seen;
    std::vector<ProtocolViolation> out;
    auto flag = [&](int j, std::size_t bit, Time edge, std::string detail) {
        const CellId reg = nodes[static_cast<std::size_t>(j)].registers[bit];
        if (!seen.insert({reg.value, edge}).second) return;
        out.push_back({ProtocolViolationKind::Bundling, node_name(stage, j) + ".addr" + std::to_string(bit), edge,
                       std::move(detail)});
    };

    for (const Transition& t : trace.transitions) {
        const std::uint32_t n = t.net.value;
        const LogicLevel before = level[n];
        level[n] = t.level;
        last_change[n] = t.time_ps;
        if (is_source[n]) changes[n].push_back(t.time_ps);

        // Late arrival: the latest source change able to cause this d-input
        // transition precedes the clock edge, so data launched before the edge
        // settled after it.
        for (const auto& [j, bit] : d_of[n]) {
            const Time edge = last_edge[static_cast<std::size_t>(j)];
            if (edge == kNever || t.time_ps < edge) continue;
            Time cause = kNever;
            for (const DataSource& src : sources[n]) {
                const auto& ch = changes[src.net.index()];
                auto it = std::upper_bound(ch.begin(), ch.end(), t.time_ps - src.min_delay_ps);
                if (it != ch.begin()) cause = std::max(cause, *std::prev(it));
            }
            if (cause != kNever && cause < edge)
                flag(j, bit, edge,
                     "data launched " + std::to_string(edge - cause) + " ps before clock settled " +
                         std::to_string(t.time_ps - edge) + " ps after it");
        }

        const int j = clock_of[n];
        if (j < 0 || before != LogicLevel::Low || t.level != LogicLevel::High) continue;
        last_edge[static_cast<std::size_t>(j)] = t.time_ps;
        const NodePorts& node = nodes[static_cast<std::size_t>(j)];
        for (std::size_t bit = 0; bit < node.registers.size(); ++bit) {
            const Cell& reg = netlist.cell(node.registers[bit]);
            const Time since = t.time_ps - last_change[reg.inputs[pin::kDffD].index()];
            if (since >= reg.params.setup_ps) continue;
            flag(j, bit, t.time_ps,
                 "data changed " + std::to_string(since) + " ps before clock, setup " +
                     std::to_string(reg.params.setup_ps) + " ps");
        }
    }
    for (const auto& [cell, time] : sim_setup) {
        if (seen.count({cell, time})) continue;
        out.push_back({ProtocolViolationKind::Bundling, netlist.cell(CellId{cell}).name, time,
                       "kernel recorded SETUP not observed in trace"});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const ProtocolViolation& a, const ProtocolViolation& b) { return a.time_ps < b.time_ps; });
    return out;
}

TokenReport track_tokens(const Trace& trace, const PortMap& ports, int num_events) {
    if (num_events != ports.num_events)
        throw Error("track_tokens: num_events " + std::to_string(num_events) + " does not match port map (" +
                    std::to_string(ports.num_events) + ")");
    const std::size_t nets = trace.net_count;
    constexpr int kNone = -1;

    // Net roles.
    std::vector<int> leaf_of(nets, kNone);
    for (int i = 0; i < num_events; ++i) leaf_of.at(ports.leaf_req_in[static_cast<std::size_t>(i)].index()) = i;
    std::vector<std::pair<int, int>> clock_of(nets, {kNone, kNone});
    for (const auto& stage : ports.stages)
        for (const NodePorts& n : stage) clock_of.at(n.local_ack.index()) = {n.stage, n.index};
    const std::uint32_t root_req = ports.root_req_out.value;

    std::vector<LogicLevel> level(nets, LogicLevel::Low);
    std::vector<std::deque<int>> pending(static_cast<std::size_t>(num_events));
    std::vector<std::vector<int>> slot(ports.stages.size());
    for (std::size_t s = 0; s < ports.stages.size(); ++s) slot[s].assign(ports.stages[s].size(), kNone);
    std::deque<int> at_output;

    TokenReport rep;
    std::vector<bool> lost;
    auto lose = [&](int tok, Time now, const std::string& where, const std::string& why) {
        lost[static_cast<std::size_t>(tok)] = true;
        rep.violations.push_back({ProtocolViolationKind::TokenLoss, where, now,
                                  "token " + std::to_string(tok) + " from leaf " +
                                      std::to_string(rep.tokens[static_cast<std::size_t>(tok)].leaf) + " " + why});
    };

    for (const Transition& t : trace.transitions) {
        const std::uint32_t n = t.net.value;
        const LogicLevel before = level[n];
        level[n] = t.level;
        const bool rise = before == LogicLevel::Low && t.level == LogicLevel::High;
        const bool fall = before == LogicLevel::High && t.level == LogicLevel::Low;

        if (const int leaf = leaf_of[n]; leaf != kNone && rise) {
            Token tok;
            tok.id = static_cast<int>(rep.tokens.size());
            tok.leaf = leaf;
            tok.inject_ps = t.time_ps;
            pending[static_cast<std::size_t>(leaf)].push_back(tok.id);
            rep.tokens.push_back(std::move(tok));
            lost.push_back(false);
        }

        if (const auto [s, j] = clock_of[n]; s != kNone && rise) {
            const NodePorts& node = ports.stages[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)];
            const std::string where = node_name(s, j);
            const bool g1 = level[node.grant[0].index()] == LogicLevel::High;
            const bool g2 = level[node.grant[1].index()] == LogicLevel::High;
            if (g1 == g2) {
                rep.violations.push_back({ProtocolViolationKind::AddressMismatch, where, t.time_ps,
                                          g1 ? "register clocked with both grants high"
                                             : "register clocked with no grant"});
                continue;
            }
            const int side = g2 ? 1 : 0;
            const int child = 2 * j + side;
            int tok = kNone;
            if (s == 0) {
                auto& q = pending[static_cast<std::size_t>(child)];
                if (!q.empty()) {
                    tok = q.front();
                    q.pop_front();
                }
            } else {
                int& c = slot[static_cast<std::size_t>(s - 1)][static_cast<std::size_t>(child)];
                tok = std::exchange(c, kNone);
            }
            if (tok == kNone) {
                rep.violations.push_back({ProtocolViolationKind::TokenDuplication, where, t.time_ps,
                                          "capture from " + std::string(side ? "right" : "left") +
                                              " child holding no token"});
                continue;
            }
            int& mine = slot[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)];
            if (mine != kNone) lose(mine, t.time_ps, where, "overwritten before the parent captured it");
            mine = tok;
        }

        if (n == root_req && rise) {
            int& r = slot.back().front();
            const int tok = std::exchange(r, kNone);
            if (tok == kNone) {
                rep.violations.push_back(
                    {ProtocolViolationKind::TokenDuplication, "root.out", t.time_ps, "root request without a token"});
                continue;
            }
            Token& token = rep.tokens[static_cast<std::size_t>(tok)];
            std::vector<LogicLevel> seen;
            for (NetId a : ports.root_addr_out) seen.push_back(level[a.index()]);
            const Address want = address_of_leaf(token.leaf, num_events);
            bool match = true;
            for (std::size_t b = 0; b < want.size(); ++b)
                match &= seen[b] == (want[b] ? LogicLevel::High : LogicLevel::Low);
            if (!match) {
                std::string got;
                for (auto it = seen.rbegin(); it != seen.rend(); ++it) got += level_char(*it);
                rep.violations.push_back({ProtocolViolationKind::AddressMismatch, "root.out", t.time_ps,
                                          "token " + std::to_string(tok) + " from leaf " +
                                              std::to_string(token.leaf) + " expected " + address_string(want) +
                                              " got " + got});
            }
            token.observed_addr = std::move(seen);
            at_output.push_back(tok);
        }

        if (n == root_req && fall && !at_output.empty()) {
            rep.tokens[static_cast<std::size_t>(at_output.front())].complete_ps = t.time_ps;
            at_output.pop_front();
        }
    }

    for (const Token& tok : rep.tokens) {
        if (tok.complete_ps || lost[static_cast<std::size_t>(tok.id)]) continue;
        lose(tok.id, trace.end_ps, "leaf" + std::to_string(tok.leaf), "never completed at the root");
    }
    return rep;
}

std::optional<ProtocolViolation> detect_deadlock(const SimState& state, const PortMap& ports) {
    if (!state.quiescent()) return std::nullopt;
    auto high = [&](NetId n) { return state.net_levels.at(n.index()) == LogicLevel::High; };
    std::string stuck;
    for (int i = 0; i < ports.num_events; ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (high(ports.leaf_req_in[k]) || high(ports.leaf_ack_out[k]))
            stuck += (stuck.empty() ? "" : ",") + std::to_string(i);
    }
    if (stuck.empty() && !high(ports.root_req_out)) return std::nullopt;
    return ProtocolViolation{ProtocolViolationKind::Deadlock, stuck.empty() ? "root.out" : "leaf[" + stuck + "]",
                             state.now_ps, "event queue empty with an open handshake"};
}

std::size_t ProtocolReport::count(ProtocolViolationKind kind) const {
    return static_cast<std::size_t>(
        std::count_if(violations.begin(), violations.end(), [&](const ProtocolViolation& v) { return v.kind == kind; }));
}

std::size_t ProtocolReport::count(TimingViolationKind kind) const {
    return static_cast<std::size_t>(
        std::count_if(timing.begin(), timing.end(), [&](const TimingViolation& v) { return v.kind == kind; }));
}

ProtocolReport check_all(const Trace& trace, const Netlist& netlist, const PortMap& ports, const SimState& state) {
    ProtocolReport rep;
    const auto bounds = tree_boundaries(ports);
    rep.violations = check_four_phase(trace, bounds);
    for (int s = 0; s < static_cast<int>(ports.stages.size()); ++s) {
        auto b = check_bundling(trace, netlist, ports, s);
        rep.violations.insert(rep.violations.end(), b.begin(), b.end());
    }
    TokenReport tokens = track_tokens(trace, ports, ports.num_events);
    rep.violations.insert(rep.violations.end(), tokens.violations.begin(), tokens.violations.end());
    rep.tokens = std::move(tokens.tokens);
    if (auto d = detect_deadlock(state, ports)) rep.violations.push_back(*d);
    rep.timing = trace.violations;
    return rep;
}

nlohmann::ordered_json to_json(const ProtocolReport& report, const Netlist& netlist) {
    constexpr std::size_t kMaxListed = 1000;
    nlohmann::ordered_json j;
    j["clean"] = report.clean();
    nlohmann::ordered_json counts = nlohmann::ordered_json::object();
    for (auto k : {ProtocolViolationKind::PhaseOrder, ProtocolViolationKind::Bundling,
                   ProtocolViolationKind::AddressMismatch, ProtocolViolationKind::TokenLoss,
                   ProtocolViolationKind::TokenDuplication, ProtocolViolationKind::Deadlock})
        counts[std::string(to_string(k))] = report.count(k);
    counts["SETUP"] = report.count(TimingViolationKind::Setup);
    counts["HOLD"] = report.count(TimingViolationKind::Hold);
    j["counts"] = counts;

    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < report.violations.size() && i < kMaxListed; ++i) {
        const auto& v = report.violations[i];
        list.push_back({{"kind", to_string(v.kind)}, {"location", v.location}, {"time_ps", v.time_ps},
                        {"detail", v.detail}});
    }
    j["violations"] = list;
    nlohmann::ordered_json timing = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < report.timing.size() && i < kMaxListed; ++i) {
        const auto& v = report.timing[i];
        timing.push_back({{"kind", to_string(v.kind)}, {"cell", netlist.cell(v.cell).name},
                          {"time_ps", v.time_ps}, {"slack_ps", v.slack_ps}});
    }
    j["timing"] = timing;
    j["truncated"] = report.violations.size() > kMaxListed || report.timing.size() > kMaxListed;
    const auto completed = std::count_if(report.tokens.begin(), report.tokens.end(),
                                         [](const Token& t) { return t.complete_ps.has_value(); });
    j["tokens_injected"] = report.tokens.size();
    j["tokens_completed"] = completed;
    return j;
}

}  // namespace aer
