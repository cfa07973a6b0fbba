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

#include "aer/metrics.hpp"
#include "aer/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <queue>

namespace aer {

std::optional<Time> min_rise_interval(const Trace& trace, std::span<const NetId> acks) {
    std::vector<int> watched(trace.net_count, -1);
    for (std::size_t i = 0; i < acks.size(); ++i) watched.at(acks[i].index()) = static_cast<int>(i);
    std::vector<Time> last_rise(acks.size(), kNever);
    std::vector<LogicLevel> level(acks.size(), LogicLevel::Low);
    std::optional<Time> best;
    for (const Transition& t : trace.transitions) {
        const int k = watched[t.net.index()];
        if (k < 0) continue;
        const auto i = static_cast<std::size_t>(k);
        const bool rise = level[i] == LogicLevel::Low && t.level == LogicLevel::High;
        level[i] = t.level;
        if (!rise) continue;
        if (last_rise[i] != kNever) {
            const Time gap = t.time_ps - last_rise[i];
            if (!best || gap < *best) best = gap;
        }
        last_rise[i] = t.time_ps;
    }
    return best;
}

Time nearest_rank(std::span<const Time> sorted, double p) {
    if (sorted.empty()) throw Error("nearest_rank: empty list");
    if (!(p > 0 && p <= 100)) throw Error("nearest_rank: percentile must be in (0, 100]");
    auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(sorted.size())));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

MetricsReport compute_metrics(std::span<const Token> tokens, const Trace& trace, const EnergyModel& energy,
                              int num_events, const PortMap* ports) {
    const int bits = stage_count(num_events);
    if (bits == 0) throw Error("compute_metrics: num_events must be a power of two >= 2");
    if (energy.energy_per_toggle_j < 0 || energy.static_power_w < 0)
        throw Error("compute_metrics: energy model terms must be non-negative");

    std::vector<Time> lat;
    Time first_inject = kUnbounded;
    Time last_complete = kNever;
    for (const Token& t : tokens) {
        if (!t.complete_ps) continue;
        lat.push_back(*t.complete_ps - t.inject_ps);
        first_inject = std::min(first_inject, t.inject_ps);
        last_complete = std::max(last_complete, *t.complete_ps);
    }
    if (lat.empty()) throw Error("compute_metrics: no completed tokens to normalize");
    std::sort(lat.begin(), lat.end());

    MetricsReport m;
    m.tokens_completed = static_cast<std::int64_t>(lat.size());
    m.duration_ps = last_complete - first_inject;
    m.throughput_events_per_s = static_cast<double>(m.tokens_completed) / (static_cast<double>(m.duration_ps) * 1e-12);
    long double sum = 0;
    for (Time l : lat) sum += static_cast<long double>(l);
    const double mean = static_cast<double>(sum / static_cast<long double>(lat.size()));
    m.latency_mean_ps = static_cast<Time>(std::llround(mean));
    m.latency_p50_ps = nearest_rank(lat, 50);
    m.latency_p99_ps = nearest_rank(lat, 99);
    m.latency_per_event_bit_ps = mean / bits;

    if (ports && !ports->stages.empty()) {
        std::vector<NetId> acks;
        for (const NodePorts& n : ports->stages.front()) acks.push_back(n.local_ack);
        m.handshake_cycle_min_ps = min_rise_interval(trace, acks).value_or(0);
    }

    m.dynamic_energy_j = energy.energy_per_toggle_j * static_cast<double>(trace.transition_count);
    m.static_energy_j = energy.static_power_w * static_cast<double>(m.duration_ps) * 1e-12;
    m.energy_per_event_j = (m.dynamic_energy_j + m.static_energy_j) / static_cast<double>(m.tokens_completed);
    m.energy_per_event_bit_j = m.energy_per_event_j / bits;
    return m;
}

Time forward_latency_bound(const Netlist& netlist, const PortMap& ports, int leaf) {
    if (leaf < 0 || leaf >= ports.num_events) throw Error("forward_latency_bound: leaf out of range");
    const NetlistIndex index(netlist);
    const std::size_t nets = netlist.nets().size();
    std::vector<Time> dist(nets, kUnbounded);
    using Item = std::pair<Time, std::uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> q;
    const NetId src = ports.leaf_req_in[static_cast<std::size_t>(leaf)];
    dist[src.index()] = 0;
    q.push({0, src.value});
    while (!q.empty()) {
        const auto [d, n] = q.top();
        q.pop();
        if (d != dist[n]) continue;
        if (n == ports.root_req_out.value) return d;
        for (const auto& [cell, pin] : index.loads[n]) {
            const Cell& c = netlist.cell(cell);
            if (c.kind == CellKind::DffRising && pin != pin::kDffClk) continue;
            for (NetId out : c.outputs) {
                const Time nd = d + c.prop_delay_ps;
                if (nd < dist[out.index()]) {
                    dist[out.index()] = nd;
                    q.push({nd, out.value});
                }
            }
        }
    }
    throw Error("forward_latency_bound: root request unreachable from leaf " + std::to_string(leaf));
}

nlohmann::ordered_json to_json(const MetricsReport& m) {
    nlohmann::ordered_json j;
    j["tokens_completed"] = m.tokens_completed;
    j["duration_ps"] = m.duration_ps;
    j["throughput_events_per_s"] = m.throughput_events_per_s;
    j["latency_mean_ps"] = m.latency_mean_ps;
    j["latency_p50_ps"] = m.latency_p50_ps;
    j["latency_p99_ps"] = m.latency_p99_ps;
    j["latency_per_event_bit_ps"] = m.latency_per_event_bit_ps;
    j["handshake_cycle_min_ps"] = m.handshake_cycle_min_ps;
    j["dynamic_energy_j"] = m.dynamic_energy_j;
    j["static_energy_j"] = m.static_energy_j;
    j["energy_per_event_j"] = m.energy_per_event_j;
    j["energy_per_event_bit_j"] = m.energy_per_event_bit_j;
    return j;
}

nlohmann::ordered_json to_json(const EnergyModel& e) {
    return {{"energy_per_toggle_j", e.energy_per_toggle_j}, {"static_power_w", e.static_power_w}};
}

EnergyModel energy_model_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error("energy: expected an object");
    EnergyModel e;
    try {
        e.energy_per_toggle_j = j.value("energy_per_toggle_j", 0.0);
        e.static_power_w = j.value("static_power_w", 0.0);
    } catch (const nlohmann::json::exception& ex) {
        throw Error(std::string("energy: ") + ex.what());
    }
    if (e.energy_per_toggle_j < 0 || e.static_power_w < 0) throw Error("energy: terms must be non-negative");
    return e;
}

void write_latency_csv(std::ostream& os, std::span<const Token> tokens) {
    os << "token,leaf,inject_ps,complete_ps,latency_ps\n";
    for (const Token& t : tokens) {
        os << t.id << ',' << t.leaf << ',' << t.inject_ps << ',';
        if (t.complete_ps) os << *t.complete_ps << ',' << (*t.complete_ps - t.inject_ps);
        else os << ',';
        os << '\n';
    }
}

}  // namespace aer
