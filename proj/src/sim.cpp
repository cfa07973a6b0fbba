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

#include "aer/sim.hpp"

#include <algorithm>
#include <cmath>

namespace aer {

std::string_view to_string(TimingViolationKind kind) {
    return kind == TimingViolationKind::Setup ? "SETUP" : "HOLD";
}

// ---------------------------------------------------------------------------
// Arbiter

Time resolution_delay(double u, Time tau) {
    if (tau <= 0) return 0;
    const double cap = 100.0 * static_cast<double>(tau);
    const double t = std::min(static_cast<double>(tau) * std::log(1.0 / u), cap);
    return static_cast<Time>(t);
}

ArbiterDecision evaluate_arbiter(const ArbiterState& state, LogicLevel r1, LogicLevel r2, Time now,
                                 const ArbiterParams& params, ArbiterRng& rng) {
    using Phase = ArbiterState::Phase;
    ArbiterDecision out;
    ArbiterState s = state;
    const std::array<bool, 2> r{r1 == LogicLevel::High, r2 == LogicLevel::High};
    std::array<bool, 2> rose{};
    for (int i = 0; i < 2; ++i) {
        rose[i] = r[i] && !s.req[i];
        if (rose[i]) s.req_time[i] = now;
        s.req[i] = r[i];
    }
    if (s.phase == Phase::Resolving && now >= s.grant_time) s.phase = s.winner == 0 ? Phase::Grant1 : Phase::Grant2;

    const Time d = params.prop_delay_ps;
    auto grant = [&](int w, Time delay) {
        out.drive = true;
        out.grant[w] = LogicLevel::High;
        out.grant[1 - w] = LogicLevel::Low;
        out.delay = {delay, delay};
    };
    auto release_all = [&] {
        out.drive = true;
        out.grant = {LogicLevel::Low, LogicLevel::Low};
        out.delay = {d, d};
    };
    auto resolve = [&] {
        s.winner = rng.coin() ? 1 : 0;
        const Time extra = resolution_delay(rng.unit_open_closed(), params.resolution_tau_ps);
        s.phase = Phase::Resolving;
        s.grant_time = now + d + extra;
        out.extra_delay_ps = extra;
        out.contended = true;
        grant(s.winner, d + extra);
    };

    if (s.phase == Phase::Idle) {
        if (r[0] && r[1]) {
            resolve();
        } else if (r[0] || r[1]) {
            s.winner = r[0] ? 0 : 1;
            s.phase = s.winner == 0 ? Phase::Grant1 : Phase::Grant2;
            s.grant_time = now + d;
            grant(s.winner, d);
        }
    } else {
        const int w = s.winner;
        const int o = 1 - w;
        if (!r[w]) {
            // Winner released: hand over to a pending loser, else go idle.
            if (r[o]) {
                s.winner = o;
                s.phase = o == 0 ? Phase::Grant1 : Phase::Grant2;
                s.grant_time = now + d;
                grant(o, d);
            } else {
                s.phase = Phase::Idle;
                release_all();
            }
        } else if (rose[o]) {
            const bool tentative = now < s.grant_time;
            if (tentative && s.phase != Phase::Resolving && now - s.req_time[w] < params.meta_window_ps) resolve();
        }
    }
    out.next = s;
    return out;
}

// ---------------------------------------------------------------------------
// Kernel

namespace {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Arbiter streams are keyed by cell name so that netlists differing only in
// unrelated cells draw identical random sequences.
std::uint64_t arbiter_seed(std::uint64_t seed, const Cell& c) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    if (c.name.empty()) {
        h ^= c.id.value;
        h *= 0x100000001b3ULL;
    }
    for (unsigned char ch : c.name) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return mix64(seed ^ mix64(h));
}

}  // namespace

Simulator::Simulator(const Netlist& netlist, std::uint64_t seed, SimOptions options)
    : netlist_(netlist), seed_(seed), options_(std::move(options)) {
    const std::size_t nets = netlist.nets().size();
    const std::size_t cells = netlist.cells().size();
    levels_.assign(nets, LogicLevel::Low);
    last_change_.assign(nets, kNever);
    pending_.assign(nets, {});
    externally_driven_.assign(nets, false);
    watchers_.resize(nets);
    trace_.net_count = nets;
    if (!options_.record_mask.empty() && options_.record_mask.size() != nets)
        throw Error("SimOptions::record_mask must have one entry per net");

    for (const Port& p : netlist.input_ports()) externally_driven_[p.net.index()] = true;

    std::vector<std::uint32_t> counts(nets + 1, 0);
    for (const Cell& c : netlist.cells()) {
        if (c.kind == CellKind::Source)
            for (NetId out : c.outputs) externally_driven_[out.index()] = true;
        for (NetId in : c.inputs) ++counts[in.index()];
    }
    load_begin_.assign(nets + 1, 0);
    for (std::size_t i = 0; i < nets; ++i) load_begin_[i + 1] = load_begin_[i] + counts[i];
    loads_.resize(load_begin_[nets]);
    std::vector<std::uint32_t> fill(load_begin_.begin(), load_begin_.end() - 1);
    for (const Cell& c : netlist.cells()) {
        for (std::uint32_t pin = 0; pin < c.inputs.size(); ++pin)
            loads_[fill[c.inputs[pin].index()]++] = {c.id.value, pin};
    }

    state_index_.assign(cells, 0);
    for (const Cell& c : netlist.cells()) {
        if (c.kind == CellKind::DffRising) {
            state_index_[c.id.index()] = static_cast<std::uint32_t>(dffs_.size());
            dffs_.push_back({});
        } else if (c.kind == CellKind::MutexArbiter) {
            state_index_[c.id.index()] = static_cast<std::uint32_t>(arbiters_.size());
            arbiters_.push_back({});
            arbiter_rngs_.emplace_back(arbiter_seed(seed, c));
        }
    }

    // Reset: every net LOW. Combinational cells settle from there.
    for (const Cell& c : netlist.cells()) {
        switch (c.kind) {
        case CellKind::Not:
        case CellKind::Nand2:
        case CellKind::And2:
        case CellKind::Or2:
        case CellKind::Mux2:
        case CellKind::DelayBuffer: evaluate(c.id.value, 0, LogicLevel::Low); break;
        default: break;
        }
    }
}

void Simulator::push(Time at, std::uint32_t target, std::uint32_t gen, LogicLevel level, EventType type) {
    queue_.push({at, seq_++, target, gen, level, type});
}

void Simulator::drive(NetId net, LogicLevel level, Time at) {
    if (!netlist_.has_net(net)) throw Error("Simulator::drive: unknown net " + std::to_string(net.value));
    if (!externally_driven_[net.index()])
        throw Error("Simulator::drive: net '" + netlist_.net_label(net) + "' is driven by a cell, not a port");
    if (at < now_) throw Error("Simulator::drive: stimulus scheduled in the past");
    push(at, net.value, 0, level, EventType::Stimulus);
}

void Simulator::call_at(Time at, Callback fn) {
    if (at < now_) throw Error("Simulator::call_at: callback scheduled in the past");
    callbacks_.push_back(std::move(fn));
    push(at, static_cast<std::uint32_t>(callbacks_.size() - 1), 0, LogicLevel::Low, EventType::Callback);
}

void Simulator::watch(NetId net, Watcher fn) { watchers_.at(net.index()).push_back(std::move(fn)); }

void Simulator::drive_inertial(std::uint32_t net, LogicLevel v, Time at) {
    Pending& p = pending_[net];
    if (p.active) {
        if (p.level == v) return;
        p.active = false;
        ++p.gen;
    }
    if (v == levels_[net]) return;
    ++p.gen;
    p.active = true;
    p.level = v;
    p.time = at;
    push(at, net, p.gen, v, EventType::CellOutput);
}

void Simulator::drive_forced(std::uint32_t net, LogicLevel v, Time at) {
    Pending& p = pending_[net];
    if (p.active) {
        if (p.level == v && p.time == at) return;
        p.active = false;
        ++p.gen;
    }
    if (v == levels_[net]) return;
    ++p.gen;
    p.active = true;
    p.level = v;
    p.time = at;
    push(at, net, p.gen, v, EventType::CellOutput);
}

void Simulator::apply(std::uint32_t net, LogicLevel level) {
    const LogicLevel before = levels_[net];
    if (before == level) return;
    levels_[net] = level;
    last_change_[net] = now_;
    ++trace_.transition_count;
    if (options_.record_trace && (options_.record_mask.empty() || options_.record_mask[net]))
        trace_.transitions.push_back({now_, NetId{net}, level});
    for (std::uint32_t i = load_begin_[net]; i < load_begin_[net + 1]; ++i)
        evaluate(loads_[i].cell, loads_[i].pin, before);
    if (!watchers_[net].empty()) {
        // Watchers may register further watchers; iterate by index.
        for (std::size_t i = 0; i < watchers_[net].size(); ++i) watchers_[net][i](*this, NetId{net}, level);
    }
}

void Simulator::evaluate(std::uint32_t cell_index, std::uint32_t pin, LogicLevel before) {
    const Cell& c = netlist_.cells()[cell_index];
    const Time at = now_ + c.prop_delay_ps;
    switch (c.kind) {
    case CellKind::And2: drive_inertial(c.outputs[0].value, logic_and(in(c, 0), in(c, 1)), at); break;
    case CellKind::Or2: drive_inertial(c.outputs[0].value, logic_or(in(c, 0), in(c, 1)), at); break;
    case CellKind::Nand2: drive_inertial(c.outputs[0].value, logic_not(logic_and(in(c, 0), in(c, 1))), at); break;
    case CellKind::Not: drive_inertial(c.outputs[0].value, logic_not(in(c, 0)), at); break;
    case CellKind::DelayBuffer: drive_inertial(c.outputs[0].value, in(c, 0), at); break;
    case CellKind::Mux2:
        drive_inertial(c.outputs[0].value, logic_mux(in(c, pin::kMuxSel), in(c, pin::kMuxIn0), in(c, pin::kMuxIn1)),
                       at);
        break;
    case CellKind::CElement: {
        const std::uint32_t q = c.outputs[0].value;
        drive_inertial(q, c_element_next(in(c, 0), in(c, 1), levels_[q]), at);
        break;
    }
    case CellKind::DffRising: {
        DffState& st = dffs_[state_index_[cell_index]];
        const std::uint32_t q = c.outputs[0].value;
        if (pin == pin::kDffClk) {
            if (before != LogicLevel::Low || in(c, pin::kDffClk) != LogicLevel::High) break;
            st.last_rise = now_;
            const Time since = now_ - last_change_[c.inputs[pin::kDffD].index()];
            LogicLevel v = in(c, pin::kDffD);
            if (since < c.params.setup_ps) {
                trace_.violations.push_back({TimingViolationKind::Setup, c.id, now_, since - c.params.setup_ps});
                v = LogicLevel::Unknown;
            }
            drive_inertial(q, v, at);
        } else if (st.last_rise != kNever && now_ - st.last_rise < c.params.hold_ps) {
            trace_.violations.push_back(
                {TimingViolationKind::Hold, c.id, now_, (now_ - st.last_rise) - c.params.hold_ps});
            drive_inertial(q, LogicLevel::Unknown, at);
        }
        break;
    }
    case CellKind::MutexArbiter: {
        const std::uint32_t k = state_index_[cell_index];
        const ArbiterParams params{c.prop_delay_ps, c.params.meta_window_ps, c.params.resolution_tau_ps};
        const ArbiterDecision dec =
            evaluate_arbiter(arbiters_[k], in(c, pin::kArbR1), in(c, pin::kArbR2), now_, params, arbiter_rngs_[k]);
        arbiters_[k] = dec.next;
        if (dec.drive) {
            // Falling grants are scheduled first so a hand-over never overlaps at one timestamp.
            for (int pass = 0; pass < 2; ++pass) {
                for (int g = 0; g < 2; ++g) {
                    const bool rising = dec.grant[g] == LogicLevel::High;
                    if (rising != (pass == 1)) continue;
                    drive_forced(c.outputs[g].value, dec.grant[g], now_ + dec.delay[g]);
                }
            }
        }
        break;
    }
    case CellKind::Source:
    case CellKind::Probe: break;
    }
}

void Simulator::run(Time until) {
    while (!queue_.empty() && queue_.top().time <= until) {
        const QueuedEvent ev = queue_.top();
        queue_.pop();
        now_ = ev.time;
        switch (ev.type) {
        case EventType::CellOutput: {
            Pending& p = pending_[ev.target];
            if (!p.active || p.gen != ev.gen) continue;
            p.active = false;
            apply(ev.target, ev.level);
            break;
        }
        case EventType::Stimulus: apply(ev.target, ev.level); break;
        case EventType::Callback: {
            Callback fn = std::move(callbacks_[ev.target]);
            callbacks_[ev.target] = nullptr;
            fn(*this);
            break;
        }
        }
    }
    if (!queue_.empty()) now_ = std::max(now_, until);
    trace_.end_ps = now_;
}

Trace Simulator::take_trace() {
    Trace out = std::move(trace_);
    trace_ = Trace{};
    trace_.net_count = out.net_count;
    return out;
}

SimState Simulator::state() const {
    SimState s;
    s.now_ps = now_;
    s.net_levels = levels_;
    // Cancelled cell outputs stay in the heap until popped; count only live entries.
    std::size_t live = 0;
    auto copy = queue_;
    while (!copy.empty()) {
        const QueuedEvent& ev = copy.top();
        if (ev.type != EventType::CellOutput || (pending_[ev.target].active && pending_[ev.target].gen == ev.gen))
            ++live;
        copy.pop();
    }
    s.pending_events = live;
    s.rng_seed = seed_;
    s.violation_log = trace_.violations;
    return s;
}

Trace run(const Netlist& netlist, std::span<const SimEvent> stimuli, Time until_ps, std::uint64_t seed) {
    Simulator sim(netlist, seed);
    Time last = 0;
    for (const SimEvent& ev : stimuli) {
        if (ev.time_ps < last) throw Error("run: stimuli must be sorted by time");
        last = ev.time_ps;
        sim.drive(ev.net, ev.level, ev.time_ps);
    }
    if (until_ps < last) throw Error("run: until_ps precedes the last stimulus");
    sim.run(until_ps);
    return sim.take_trace();
}

}  // namespace aer
