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
#include <functional>
#include <iosfwd>
#include <queue>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "aer/netlist.hpp"

namespace aer {

/// A timestamped level change requested on a net.
struct SimEvent {
    Time time_ps = 0;
    NetId net;
    LogicLevel level = LogicLevel::Low;
    std::uint64_t seq = 0;
};

/// One applied transition, in processing order.
struct Transition {
    Time time_ps;
    NetId net;
    LogicLevel level;

    friend bool operator==(const Transition&, const Transition&) = default;
};

enum class TimingViolationKind : std::uint8_t { Setup, Hold };
std::string_view to_string(TimingViolationKind kind);

struct TimingViolation {
    TimingViolationKind kind;
    CellId cell;
    Time time_ps;
    Time slack_ps;  // always negative

    friend bool operator==(const TimingViolation&, const TimingViolation&) = default;
};

/// Everything observed during one run. Every net starts LOW at t=0.
struct Trace {
    std::size_t net_count = 0;
    std::vector<Transition> transitions;
    std::vector<TimingViolation> violations;
    // Counts every applied transition, including nets excluded from recording.
    std::uint64_t transition_count = 0;
    Time end_ps = 0;

    friend bool operator==(const Trace&, const Trace&) = default;
};

/// Snapshot of the kernel at the end of a run.
struct SimState {
    Time now_ps = 0;
    std::vector<LogicLevel> net_levels;
    std::size_t pending_events = 0;
    std::uint64_t rng_seed = 0;
    std::vector<TimingViolation> violation_log;

    bool quiescent() const { return pending_events == 0; }
};

// ---------------------------------------------------------------------------
// Mutex arbiter model

struct ArbiterParams {
    Time prop_delay_ps = 1;
    Time meta_window_ps = 0;
    Time resolution_tau_ps = 0;
};

struct ArbiterState {
    enum class Phase : std::uint8_t { Idle, Grant1, Grant2, Resolving };
    Phase phase = Phase::Idle;
    int winner = 0;         // 0 for r1/g1, 1 for r2/g2
    Time grant_time = 0;    // when the winner's grant becomes visible (release time if Resolving)
    std::array<bool, 2> req{false, false};
    std::array<Time, 2> req_time{kNever, kNever};

    friend bool operator==(const ArbiterState&, const ArbiterState&) = default;
};

struct ArbiterDecision {
    ArbiterState next;
    bool drive = false;  // when set, both grant outputs are retargeted
    std::array<LogicLevel, 2> grant{LogicLevel::Low, LogicLevel::Low};
    std::array<Time, 2> delay{0, 0};
    Time extra_delay_ps = 0;
    bool contended = false;
};

/// Random source for metastability resolution; one per arbiter instance.
class ArbiterRng {
public:
    explicit ArbiterRng(std::uint64_t seed) : engine_(seed) {}
    bool coin() { return (engine_() >> 63) != 0; }
    double unit_open_closed() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

/// Pure arbiter transition function, called on every edge of r1 or r2.
/// `now` is the edge time; arrival skew is taken from the state's request times.
ArbiterDecision evaluate_arbiter(const ArbiterState& state, LogicLevel r1, LogicLevel r2, Time now,
                                 const ArbiterParams& params, ArbiterRng& rng);

/// Metastability resolution time for a uniform draw u in (0, 1]: tau ln(1/u), capped at 100 tau.
Time resolution_delay(double u, Time tau);

// ---------------------------------------------------------------------------
// Kernel

struct SimOptions {
    bool record_trace = true;
    // When non-empty, only nets with a set entry are recorded.
    std::vector<bool> record_mask;
};

class Simulator {
public:
    using Watcher = std::function<void(Simulator&, NetId, LogicLevel)>;
    using Callback = std::function<void(Simulator&)>;

    Simulator(const Netlist& netlist, std::uint64_t seed, SimOptions options = {});

    /// Schedules a level on an input port (or SOURCE-driven net). Throws for internal nets.
    void drive(NetId net, LogicLevel level, Time at);
    void call_at(Time at, Callback fn);
    void watch(NetId net, Watcher fn);

    /// Processes every event with time <= until.
    void run(Time until);

    Time now() const { return now_; }
    LogicLevel level(NetId net) const { return levels_[net.index()]; }
    const Netlist& netlist() const { return netlist_; }
    const Trace& trace() const { return trace_; }
    Trace take_trace();
    SimState state() const;

private:
    enum class EventType : std::uint8_t { CellOutput, Stimulus, Callback };
    struct QueuedEvent {
        Time time;
        std::uint64_t seq;
        std::uint32_t target;  // net id, or callback index
        std::uint32_t gen;
        LogicLevel level;
        EventType type;
    };
    struct Later {
        bool operator()(const QueuedEvent& a, const QueuedEvent& b) const {
            return a.time != b.time ? a.time > b.time : a.seq > b.seq;
        }
    };
    struct Pending {
        Time time = 0;
        std::uint32_t gen = 0;
        LogicLevel level = LogicLevel::Low;
        bool active = false;
    };
    struct Load {
        std::uint32_t cell;
        std::uint32_t pin;
    };
    struct DffState {
        Time last_rise = kNever;
    };

    void push(Time at, std::uint32_t target, std::uint32_t gen, LogicLevel level, EventType type);
    void apply(std::uint32_t net, LogicLevel level);
    void evaluate(std::uint32_t cell, std::uint32_t pin, LogicLevel before);
    void drive_inertial(std::uint32_t net, LogicLevel v, Time at);
    void drive_forced(std::uint32_t net, LogicLevel v, Time at);
    LogicLevel in(const Cell& c, std::size_t pin) const { return levels_[c.inputs[pin].index()]; }

    const Netlist& netlist_;
    std::uint64_t seed_;
    SimOptions options_;
    Time now_ = 0;
    std::uint64_t seq_ = 0;
    std::priority_queue<QueuedEvent, std::vector<QueuedEvent>, Later> queue_;

    std::vector<LogicLevel> levels_;
    std::vector<Time> last_change_;
    std::vector<Pending> pending_;
    std::vector<std::uint32_t> load_begin_;
    std::vector<Load> loads_;
    std::vector<bool> externally_driven_;
    std::vector<std::uint32_t> state_index_;
    std::vector<DffState> dffs_;
    std::vector<ArbiterState> arbiters_;
    std::vector<ArbiterRng> arbiter_rngs_;
    std::vector<std::vector<Watcher>> watchers_;
    std::vector<Callback> callbacks_;
    Trace trace_;
};

/// Runs a netlist against a fixed stimulus list and returns the full trace.
Trace run(const Netlist& netlist, std::span<const SimEvent> stimuli, Time until_ps, std::uint64_t seed);

/// IEEE 1364 value change dump, ps timescale, one variable per named net.
std::string export_vcd(const Trace& trace, const Netlist& netlist);

/// One {"t","net","level"} JSON object per line.
void write_transition_log(std::ostream& os, const Trace& trace, const Netlist& netlist);

}  // namespace aer
