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

#include "aer/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace aer {

std::string_view to_string(Workload::Kind kind) {
    switch (kind) {
    case Workload::Kind::FullScan: return "FULL_SCAN";
    case Workload::Kind::Poisson: return "POISSON";
    case Workload::Kind::Burst: return "BURST";
    case Workload::Kind::Simultaneous: return "SIMULTANEOUS";
    }
    return "?";
}

std::vector<std::string> check_workload(const Workload& w) {
    std::vector<std::string> p;
    switch (w.kind) {
    case Workload::Kind::FullScan:
        if (w.count_per_leaf < 1) p.push_back("count_per_leaf must be >= 1");
        break;
    case Workload::Kind::Poisson:
        if (!(w.rate_events_per_s_per_leaf > 0) || !std::isfinite(w.rate_events_per_s_per_leaf))
            p.push_back("rate_events_per_s_per_leaf must be > 0");
        if (w.duration_ps < 1) p.push_back("duration_ps must be >= 1");
        break;
    case Workload::Kind::Burst:
        if (w.burst_len < 1) p.push_back("burst_len must be >= 1");
        if (w.bursts < 1) p.push_back("bursts must be >= 1");
        if (w.intra_gap_ps < 0) p.push_back("intra_gap_ps must be >= 0");
        if (w.inter_gap_ps < 0) p.push_back("inter_gap_ps must be >= 0");
        break;
    case Workload::Kind::Simultaneous:
        if (w.rounds < 1) p.push_back("rounds must be >= 1");
        break;
    }
    if (w.leaf_response_ps < 1) p.push_back("leaf_response_ps must be >= 1");
    if (w.receiver_response_ps < 1) p.push_back("receiver_response_ps must be >= 1");
    if (w.start_ps < 0) p.push_back("start_ps must be >= 0");
    return p;
}

std::vector<std::vector<Time>> arrival_schedule(const Workload& w, int num_events) {
    const auto n = static_cast<std::size_t>(num_events);
    std::vector<std::vector<Time>> out(n);
    std::mt19937_64 rng(w.seed);
    switch (w.kind) {
    case Workload::Kind::FullScan:
        for (auto& leaf : out) leaf.assign(static_cast<std::size_t>(w.count_per_leaf), w.start_ps);
        break;
    case Workload::Kind::Poisson: {
        const double mean_gap_ps = 1e12 / w.rate_events_per_s_per_leaf;
        std::exponential_distribution<double> gap(1.0 / mean_gap_ps);
        for (auto& leaf : out) {
            double t = 0;
            for (;;) {
                t += gap(rng);
                if (t >= static_cast<double>(w.duration_ps)) break;
                leaf.push_back(w.start_ps + static_cast<Time>(t));
            }
        }
        break;
    }
    case Workload::Kind::Burst: {
        const Time period = static_cast<Time>(w.burst_len - 1) * w.intra_gap_ps + w.inter_gap_ps;
        std::uniform_int_distribution<Time> phase(0, std::max<Time>(w.inter_gap_ps, 1) - 1);
        for (auto& leaf : out) {
            const Time offset = w.start_ps + phase(rng);
            for (int b = 0; b < w.bursts; ++b)
                for (int i = 0; i < w.burst_len; ++i) leaf.push_back(offset + b * period + i * w.intra_gap_ps);
        }
        break;
    }
    case Workload::Kind::Simultaneous: break;
    }
    return out;
}

LeafDrivers::LeafDrivers(Simulator& sim, const Workload& w, const PortMap& ports, HandshakeCallback cb)
    : w_(w), ports_(ports), cb_(std::move(cb)) {
    const auto problems = check_workload(w);
    if (!problems.empty()) throw Error("invalid workload: " + problems.front());
    auto schedule = arrival_schedule(w, ports.num_events);
    leaves_.resize(schedule.size());
    for (std::size_t i = 0; i < schedule.size(); ++i) leaves_[i].arrivals = std::move(schedule[i]);

    for (int i = 0; i < ports.num_events; ++i) {
        sim.watch(ports.leaf_ack_out[static_cast<std::size_t>(i)],
                  [this, i](Simulator& s, NetId, LogicLevel v) { on_ack(s, i, v); });
        if (cb_) {
            sim.watch(ports.leaf_req_in[static_cast<std::size_t>(i)], [this, i](Simulator& s, NetId, LogicLevel v) {
                cb_(i, v == LogicLevel::High ? HandshakeEdge::ReqRise : HandshakeEdge::ReqFall, s.now());
            });
        }
    }
    if (w.kind == Workload::Kind::Simultaneous) {
        start_round(sim, w.start_ps);
    } else {
        for (int i = 0; i < ports.num_events; ++i) try_inject(sim, i, w.start_ps);
    }
}

void LeafDrivers::try_inject(Simulator& sim, int leaf, Time earliest) {
    Leaf& l = leaves_[static_cast<std::size_t>(leaf)];
    if (l.busy || l.next >= l.arrivals.size()) return;
    const Time at = std::max(earliest, l.arrivals[l.next++]);
    l.busy = true;
    ++injected_;
    sim.drive(ports_.leaf_req_in[static_cast<std::size_t>(leaf)], LogicLevel::High, at);
}

void LeafDrivers::start_round(Simulator& sim, Time at) {
    ++rounds_started_;
    round_open_ = ports_.num_events;
    for (int i = 0; i < ports_.num_events; ++i) {
        leaves_[static_cast<std::size_t>(i)].busy = true;
        ++injected_;
        sim.drive(ports_.leaf_req_in[static_cast<std::size_t>(i)], LogicLevel::High, at);
    }
}

void LeafDrivers::on_ack(Simulator& sim, int leaf, LogicLevel v) {
    if (cb_) cb_(leaf, v == LogicLevel::High ? HandshakeEdge::AckRise : HandshakeEdge::AckFall, sim.now());
    const NetId req = ports_.leaf_req_in[static_cast<std::size_t>(leaf)];
    if (v == LogicLevel::High) {
        sim.drive(req, LogicLevel::Low, sim.now() + w_.leaf_response_ps);
        return;
    }
    if (v != LogicLevel::Low) return;
    leaves_[static_cast<std::size_t>(leaf)].busy = false;
    if (w_.kind == Workload::Kind::Simultaneous) {
        if (--round_open_ == 0 && rounds_started_ < w_.rounds) start_round(sim, sim.now() + w_.leaf_response_ps);
    } else {
        try_inject(sim, leaf, sim.now() + w_.leaf_response_ps);
    }
}

RootReceiver::RootReceiver(Simulator& sim, const PortMap& ports, Time response_ps) {
    const NetId ack = ports.root_ack_in;
    sim.watch(ports.root_req_out, [ack, response_ps](Simulator& s, NetId, LogicLevel v) {
        if (v == LogicLevel::Unknown) return;
        s.drive(ack, v, s.now() + response_ps);
    });
}

Environment generate_stimuli(Simulator& sim, const Workload& w, const PortMap& ports, HandshakeCallback cb) {
    Environment env;
    env.leaves = std::make_unique<LeafDrivers>(sim, w, ports, std::move(cb));
    env.receiver = std::make_unique<RootReceiver>(sim, ports, w.receiver_response_ps);
    return env;
}

std::vector<bool> monitor_mask(const Netlist& netlist, const PortMap& ports) {
    std::vector<bool> mask(netlist.nets().size(), false);
    auto set = [&](NetId n) { mask.at(n.index()) = true; };
    for (NetId n : ports.leaf_req_in) set(n);
    for (NetId n : ports.leaf_ack_out) set(n);
    for (NetId n : ports.root_addr_out) set(n);
    set(ports.root_req_out);
    set(ports.root_ack_in);
    for (const auto& stage : ports.stages) {
        for (const NodePorts& node : stage) {
            for (int k = 0; k < 2; ++k) {
                set(node.child_req[k]);
                set(node.child_ack[k]);
                set(node.grant[k]);
            }
            set(node.delayed_req);
            set(node.local_ack);
            set(node.req_out);
            set(node.ack_next);
            for (CellId r : node.registers) {
                set(netlist.cell(r).inputs[pin::kDffD]);
                set(netlist.cell(r).outputs[0]);
            }
        }
    }
    return mask;
}

RunResult run_workload(const AerTree& tree, const Workload& w, std::uint64_t seed, Time until_ps, SimOptions options,
                       HandshakeCallback cb) {
    Simulator sim(tree.netlist, seed, std::move(options));
    Environment env = generate_stimuli(sim, w, tree.ports, std::move(cb));
    sim.run(until_ps);
    RunResult r;
    r.state = sim.state();
    r.trace = sim.take_trace();
    return r;
}

nlohmann::ordered_json to_json(const Workload& w) {
    nlohmann::ordered_json j;
    j["kind"] = to_string(w.kind);
    switch (w.kind) {
    case Workload::Kind::FullScan: j["count_per_leaf"] = w.count_per_leaf; break;
    case Workload::Kind::Poisson:
        j["rate_events_per_s_per_leaf"] = w.rate_events_per_s_per_leaf;
        j["duration_ps"] = w.duration_ps;
        break;
    case Workload::Kind::Burst:
        j["burst_len"] = w.burst_len;
        j["intra_gap_ps"] = w.intra_gap_ps;
        j["inter_gap_ps"] = w.inter_gap_ps;
        j["bursts"] = w.bursts;
        break;
    case Workload::Kind::Simultaneous: j["rounds"] = w.rounds; break;
    }
    j["seed"] = w.seed;
    j["leaf_response_ps"] = w.leaf_response_ps;
    j["receiver_response_ps"] = w.receiver_response_ps;
    j["start_ps"] = w.start_ps;
    return j;
}

Workload workload_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error("workload: expected an object");
    Workload w;
    const std::string kind = j.value("kind", std::string("FULL_SCAN"));
    if (kind == "FULL_SCAN") w.kind = Workload::Kind::FullScan;
    else if (kind == "POISSON") w.kind = Workload::Kind::Poisson;
    else if (kind == "BURST") w.kind = Workload::Kind::Burst;
    else if (kind == "SIMULTANEOUS") w.kind = Workload::Kind::Simultaneous;
    else throw Error("workload: unknown kind '" + kind + "'");
    try {
        w.count_per_leaf = j.value("count_per_leaf", w.count_per_leaf);
        w.rate_events_per_s_per_leaf = j.value("rate_events_per_s_per_leaf", w.rate_events_per_s_per_leaf);
        w.duration_ps = j.value("duration_ps", w.duration_ps);
        w.burst_len = j.value("burst_len", w.burst_len);
        w.intra_gap_ps = j.value("intra_gap_ps", w.intra_gap_ps);
        w.inter_gap_ps = j.value("inter_gap_ps", w.inter_gap_ps);
        w.bursts = j.value("bursts", w.bursts);
        w.rounds = j.value("rounds", w.rounds);
        w.seed = j.value("seed", w.seed);
        w.leaf_response_ps = j.value("leaf_response_ps", w.leaf_response_ps);
        w.receiver_response_ps = j.value("receiver_response_ps", w.receiver_response_ps);
        w.start_ps = j.value("start_ps", w.start_ps);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("workload: ") + e.what());
    }
    const auto problems = check_workload(w);
    if (!problems.empty()) throw Error("workload: " + problems.front());
    return w;
}

}  // namespace aer
