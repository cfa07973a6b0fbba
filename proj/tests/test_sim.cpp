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
#include <random>

#include "aer/sim.hpp"

using namespace aer;

namespace {

constexpr LogicLevel L = LogicLevel::Low, H = LogicLevel::High, X = LogicLevel::Unknown;

struct OneCell {
    Netlist nl;
    std::vector<NetId> in;
    std::vector<NetId> out;
};

OneCell one_cell(CellKind kind, Time delay, CellParams params = {}) {
    NetlistBuilder b;
    OneCell r;
    const PinSignature sig = signature(kind);
    for (std::size_t i = 0; i < sig.inputs; ++i) {
        r.in.push_back(b.add_net("in" + std::to_string(i)));
        b.add_input_port("in" + std::to_string(i), r.in.back());
    }
    for (std::size_t i = 0; i < sig.outputs; ++i) r.out.push_back(b.add_net("out" + std::to_string(i)));
    b.add_cell(kind, r.in, r.out, delay, "dut", params);
    for (std::size_t i = 0; i < sig.outputs; ++i) b.add_output_port("out" + std::to_string(i), r.out[i]);
    r.nl = std::move(b).build();
    return r;
}

std::vector<Transition> on_net(const Trace& t, NetId n) {
    std::vector<Transition> v;
    for (const Transition& x : t.transitions)
        if (x.net == n) v.push_back(x);
    return v;
}

ArbiterParams arb_params(Time d = 100, Time window = 20, Time tau = 30) { return {d, window, tau}; }

}  // namespace

TEST_CASE("no stimuli: nothing moves on a circuit without inverters") {
    const OneCell c = one_cell(CellKind::And2, 50);
    const Trace t = run(c.nl, {}, 10'000, 1);
    CHECK(t.transitions.empty());
    CHECK(t.violations.empty());
}

TEST_CASE("inverter settles from reset, then follows its input after the delay") {
    const OneCell c = one_cell(CellKind::Not, 50);
    const std::vector<SimEvent> stim{{1000, c.in[0], H, 0}};
    const Trace t = run(c.nl, stim, 5000, 1);
    const auto out = on_net(t, c.out[0]);
    REQUIRE(out.size() == 2);
    CHECK(out[0] == Transition{50, c.out[0], H});
    CHECK(out[1] == Transition{1050, c.out[0], L});
}

TEST_CASE("C-element hand evaluation") {
    const OneCell c = one_cell(CellKind::CElement, 100);
    const std::vector<SimEvent> stim{{0, c.in[0], H, 0}, {200, c.in[1], H, 0}, {400, c.in[0], L, 0}};
    const Trace t = run(c.nl, stim, 2000, 1);
    const auto q = on_net(t, c.out[0]);
    REQUIRE(q.size() == 1);
    CHECK(q[0] == Transition{300, c.out[0], H});
    const std::vector<SimEvent> more{{0, c.in[0], H, 0}, {200, c.in[1], H, 0}, {400, c.in[0], L, 0},
                                     {600, c.in[1], L, 0}};
    const auto q2 = on_net(run(c.nl, more, 2000, 1), c.out[0]);
    REQUIRE(q2.size() == 2);
    CHECK(q2[1] == Transition{700, c.out[0], L});
}

TEST_CASE("inertial delay swallows pulses shorter than the gate delay") {
    const OneCell c = one_cell(CellKind::And2, 50);
    const std::vector<SimEvent> stim{{0, c.in[0], H, 0}, {100, c.in[1], H, 0}, {120, c.in[1], L, 0},
                                     {300, c.in[1], H, 0}};
    const auto y = on_net(run(c.nl, stim, 2000, 1), c.out[0]);
    REQUIRE(y.size() == 1);
    CHECK(y[0] == Transition{350, c.out[0], H});
}

TEST_CASE("stimulus validation") {
    const OneCell c = one_cell(CellKind::Not, 50);
    Simulator sim(c.nl, 1);
    CHECK_THROWS_AS(sim.drive(c.out[0], H, 10), Error);
    sim.run(100);
    CHECK_THROWS_AS(sim.drive(c.in[0], H, 10), Error);
    const std::vector<SimEvent> unsorted{{10, c.in[0], H, 0}, {5, c.in[0], L, 0}};
    CHECK_THROWS_AS(run(c.nl, unsorted, 100, 1), Error);
}

TEST_CASE("DFF capture, setup and hold") {
    CellParams p;
    p.setup_ps = 60;
    p.hold_ps = 20;
    const OneCell c = one_cell(CellKind::DffRising, 100, p);
    const NetId clk = c.in[pin::kDffClk], d = c.in[pin::kDffD], q = c.out[0];

    SUBCASE("clean capture") {
        const std::vector<SimEvent> s{{0, d, H, 0}, {100, clk, H, 0}};
        const Trace t = run(c.nl, s, 1000, 1);
        CHECK(t.violations.empty());
        CHECK(on_net(t, q) == std::vector<Transition>{{200, q, H}});
    }
    SUBCASE("setup violation drives q unknown until a clean capture") {
        const std::vector<SimEvent> s{{70, d, H, 0}, {100, clk, H, 0}, {300, clk, L, 0}, {500, clk, H, 0}};
        const Trace t = run(c.nl, s, 1000, 1);
        REQUIRE(t.violations.size() == 1);
        CHECK(t.violations[0].kind == TimingViolationKind::Setup);
        CHECK(t.violations[0].slack_ps == -30);
        CHECK(on_net(t, q) == std::vector<Transition>{{200, q, X}, {600, q, H}});
    }
    SUBCASE("hold violation") {
        const std::vector<SimEvent> s{{0, d, H, 0}, {100, clk, H, 0}, {110, d, L, 0}};
        const Trace t = run(c.nl, s, 1000, 1);
        REQUIRE(t.violations.size() == 1);
        CHECK(t.violations[0].kind == TimingViolationKind::Hold);
        CHECK(t.violations[0].slack_ps == -10);
    }
    SUBCASE("unknown clock edge leaves q alone") {
        const std::vector<SimEvent> s{{0, d, H, 0}, {100, clk, X, 0}, {200, clk, H, 0}};
        const Trace t = run(c.nl, s, 1000, 1);
        CHECK(t.violations.empty());
        CHECK(on_net(t, q).empty());
    }
}

TEST_CASE("setup detection: exactly one record iff d moved inside the window") {
    CellParams p;
    p.setup_ps = 60;
    const OneCell c = one_cell(CellKind::DffRising, 100, p);
    for (Time delta = 0; delta <= 120; delta += 5) {
        const std::vector<SimEvent> s{{1000 - delta, c.in[pin::kDffD], H, 0}, {1000, c.in[pin::kDffClk], H, 0}};
        const Trace t = run(c.nl, s, 5000, 1);
        const std::size_t expected = delta < 60 ? 1 : 0;
        CHECK(t.violations.size() == expected);
    }
}

TEST_CASE("causality: every gate output edge follows an input edge by exactly the cell delay") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 40; ++trial) {
        NetlistBuilder b;
        std::vector<NetId> pool;
        for (int i = 0; i < 3; ++i) {
            pool.push_back(b.add_net("i" + std::to_string(i)));
            b.add_input_port("i" + std::to_string(i), pool.back());
        }
        const std::vector<NetId> inputs = pool;
        const CellKind kinds[] = {CellKind::And2, CellKind::Or2, CellKind::Nand2, CellKind::Not, CellKind::Mux2};
        for (int g = 0; g < 12; ++g) {
            const CellKind k = kinds[rng() % 5];
            std::vector<NetId> in(signature(k).inputs);
            for (NetId& n : in) n = pool[rng() % pool.size()];
            const NetId out = b.add_net();
            b.add_cell(k, in, {out}, 1 + static_cast<Time>(rng() % 90));
            pool.push_back(out);
        }
        const Netlist nl = std::move(b).build();
        std::vector<SimEvent> stim;
        std::vector<LogicLevel> cur(3, L);
        for (Time t = 100; t < 3000; t += 1 + static_cast<Time>(rng() % 120)) {
            const std::size_t i = rng() % 3;
            cur[i] = cur[i] == L ? H : L;
            stim.push_back({t, inputs[i], cur[i], 0});
        }
        const Trace tr = run(nl, stim, 10'000, 1);
        std::map<std::pair<std::uint32_t, Time>, bool> edge;
        for (const Transition& x : tr.transitions) edge[{x.net.value, x.time_ps}] = true;
        for (const Cell& c : nl.cells()) {
            for (const Transition& x : on_net(tr, c.outputs[0])) {
                const Time cause = x.time_ps - c.prop_delay_ps;
                bool ok = cause == 0;  // settling from reset
                for (NetId in : c.inputs) ok = ok || edge.count({in.value, cause});
                CHECK(ok);
            }
        }
    }
}

TEST_CASE("evaluate_arbiter: uncontended grant and release") {
    ArbiterRng rng(1);
    ArbiterState s;
    auto d = evaluate_arbiter(s, H, L, 0, arb_params(), rng);
    CHECK(d.drive);
    CHECK(d.grant[0] == H);
    CHECK(d.grant[1] == L);
    CHECK(d.delay[0] == 100);
    CHECK_FALSE(d.contended);
    d = evaluate_arbiter(d.next, L, L, 500, arb_params(), rng);
    CHECK(d.next.phase == ArbiterState::Phase::Idle);
    CHECK(d.grant[0] == L);
}

TEST_CASE("evaluate_arbiter: late second request waits, then is served on release") {
    ArbiterRng rng(1);
    auto d = evaluate_arbiter({}, H, L, 0, arb_params(), rng);
    d = evaluate_arbiter(d.next, H, H, 50, arb_params(), rng);  // outside the 20 ps window
    CHECK_FALSE(d.contended);
    CHECK(d.next.winner == 0);
    d = evaluate_arbiter(d.next, L, H, 400, arb_params(), rng);
    CHECK(d.drive);
    CHECK(d.grant[0] == L);
    CHECK(d.grant[1] == H);
    CHECK(d.next.winner == 1);
}

TEST_CASE("evaluate_arbiter: near-simultaneous requests resolve with extra delay") {
    ArbiterRng rng(3);
    auto d = evaluate_arbiter({}, H, L, 0, arb_params(100, 20, 30), rng);
    d = evaluate_arbiter(d.next, H, H, 5, arb_params(100, 20, 30), rng);
    CHECK(d.contended);
    CHECK(d.next.phase == ArbiterState::Phase::Resolving);
    CHECK(d.extra_delay_ps >= 0);
    CHECK(d.extra_delay_ps <= 3000);
    CHECK(d.grant[d.next.winner] == H);
    CHECK(d.grant[1 - d.next.winner] == L);
}

TEST_CASE("resolution delay law") {
    CHECK(resolution_delay(1.0, 30) == 0);
    CHECK(resolution_delay(std::exp(-1.0), 30) == 30);  // tau ln(e)
    CHECK(resolution_delay(std::exp(-2.0), 30) == 60);
    CHECK(resolution_delay(1e-300, 30) == 3000);  // capped at 100 tau
    CHECK(resolution_delay(0.5, 0) == 0);
}

TEST_CASE("arbiter fairness: Monte Carlo over seeds") {
    const OneCell c = one_cell(CellKind::MutexArbiter, 100, CellParams{0, 0, 0, 50, 30});
    int r1_wins = 0;
    constexpr int kTrials = 10'000;
    for (int seed = 0; seed < kTrials; ++seed) {
        const std::vector<SimEvent> s{{0, c.in[0], H, 0}, {2, c.in[1], H, 0}};
        const Trace t = run(c.nl, s, 100'000, static_cast<std::uint64_t>(seed));
        const auto g1 = on_net(t, c.out[0]);
        const auto g2 = on_net(t, c.out[1]);
        const bool one = !g1.empty() && g1.back().level == H;
        const bool two = !g2.empty() && g2.back().level == H;
        REQUIRE(one != two);
        r1_wins += one;
    }
    const double share = static_cast<double>(r1_wins) / kTrials;
    CHECK(share > 0.48);
    CHECK(share < 0.52);
}

TEST_CASE("mutual exclusion holds at every transition under random request traffic") {
    const OneCell c = one_cell(CellKind::MutexArbiter, 40, CellParams{0, 0, 0, 30, 20});
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<SimEvent> s;
        std::array<LogicLevel, 2> cur{L, L};
        for (Time t = 0; t < 5000; t += static_cast<Time>(rng() % 60)) {
            const std::size_t i = rng() % 2;
            cur[i] = cur[i] == L ? H : L;
            s.push_back({t, c.in[i], cur[i], 0});
        }
        const Trace tr = run(c.nl, s, 50'000, rng());
        LogicLevel g1 = L, g2 = L;
        for (const Transition& x : tr.transitions) {
            if (x.net == c.out[0]) g1 = x.level;
            if (x.net == c.out[1]) g2 = x.level;
            CHECK_FALSE((g1 == H && g2 == H));
        }
    }
}

TEST_CASE("pending loser is granted after the winner releases") {
    const OneCell c = one_cell(CellKind::MutexArbiter, 100, CellParams{0, 0, 0, 20, 30});
    const std::vector<SimEvent> s{{0, c.in[0], H, 0}, {500, c.in[1], H, 0}, {1000, c.in[0], L, 0}};
    const Trace t = run(c.nl, s, 10'000, 1);
    CHECK(on_net(t, c.out[0]) == std::vector<Transition>{{100, c.out[0], H}, {1100, c.out[0], L}});
    CHECK(on_net(t, c.out[1]) == std::vector<Transition>{{1100, c.out[1], H}});
}

TEST_CASE("determinism: same seed, same trace") {
    const OneCell c = one_cell(CellKind::MutexArbiter, 100, CellParams{0, 0, 0, 50, 30});
    const std::vector<SimEvent> s{{0, c.in[0], H, 0}, {1, c.in[1], H, 0}};
    for (std::uint64_t seed : {1u, 2u, 77u}) CHECK(run(c.nl, s, 10'000, seed) == run(c.nl, s, 10'000, seed));
}

TEST_CASE("record mask limits stored transitions but not the count") {
    const OneCell c = one_cell(CellKind::Not, 10);
    SimOptions o;
    o.record_mask.assign(c.nl.nets().size(), false);
    o.record_mask[c.in[0].index()] = true;
    Simulator sim(c.nl, 1, o);
    sim.drive(c.in[0], H, 100);
    sim.run(1000);
    CHECK(sim.trace().transitions.size() == 1);
    CHECK(sim.trace().transition_count == 3);
    CHECK(sim.state().quiescent());
}
