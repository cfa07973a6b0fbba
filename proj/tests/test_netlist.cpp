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

#include <functional>
#include <random>
#include <set>

#include "aer/generator.hpp"
#include "aer/netlist.hpp"

using namespace aer;

namespace {

struct RandomBanks {
    Netlist netlist;
    std::vector<CellId> from, to;
};

// Register bank -> random combinational DAG (<= 20 cells) -> register bank.
RandomBanks random_banks(std::mt19937_64& rng) {
    NetlistBuilder b;
    const NetId clk = b.add_net("clk");
    const NetId din = b.add_net("din");
    b.add_input_port("clk", clk);
    b.add_input_port("din", din);
    RandomBanks r;
    std::vector<NetId> pool{din};
    const int n_from = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < n_from; ++i) {
        const NetId q = b.add_net("q" + std::to_string(i));
        r.from.push_back(b.add_cell(CellKind::DffRising, {clk, din}, {q}, 10));
        pool.push_back(q);
    }
    const int n_gates = static_cast<int>(rng() % 21);
    const CellKind kinds[] = {CellKind::And2, CellKind::Or2, CellKind::Not, CellKind::Mux2, CellKind::DelayBuffer};
    for (int g = 0; g < n_gates; ++g) {
        const CellKind k = kinds[rng() % 5];
        const Time d = 1 + static_cast<Time>(rng() % 200);
        const NetId out = b.add_net();
        std::vector<NetId> in(signature(k).inputs);
        for (NetId& n : in) n = pool[rng() % pool.size()];
        if (k == CellKind::DelayBuffer) b.add_delay_buffer(in[0], out, d);
        else b.add_cell(k, in, {out}, d);
        pool.push_back(out);
    }
    const int n_to = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < n_to; ++i) {
        const NetId q = b.add_net();
        r.to.push_back(b.add_cell(CellKind::DffRising, {clk, pool[rng() % pool.size()]}, {q}, 10));
    }
    r.netlist = std::move(b).build();
    return r;
}

// Enumerates every combinational path explicitly; no memoization.
Time brute_force_longest(const Netlist& nl, const std::vector<CellId>& from, const std::vector<CellId>& to) {
    std::set<std::uint32_t> targets;
    for (CellId c : to) targets.insert(nl.cell(c).inputs[pin::kDffD].value);
    Time best = -1;
    std::function<void(NetId, Time)> walk = [&](NetId net, Time acc) {
        if (targets.count(net.value)) best = std::max(best, acc);
        for (const Cell& c : nl.cells()) {
            if (c.holds_state() || c.kind == CellKind::Probe) continue;
            for (NetId in : c.inputs) {
                if (in != net) continue;
                walk(c.outputs[0], acc + c.prop_delay_ps);
                break;
            }
        }
    };
    for (CellId c : from) walk(nl.cell(c).outputs[0], 0);
    return std::max<Time>(best, 0);
}

// DFS over combinational cells only; true when a back edge exists.
bool has_combinational_cycle(const Netlist& nl) {
    const std::size_t n = nl.cells().size();
    std::vector<std::vector<std::size_t>> succ(n);
    for (const Cell& a : nl.cells()) {
        if (a.holds_state()) continue;
        for (const Cell& b : nl.cells()) {
            if (b.holds_state()) continue;
            for (NetId in : b.inputs)
                for (NetId out : a.outputs)
                    if (in == out) succ[a.id.index()].push_back(b.id.index());
        }
    }
    std::vector<int> color(n, 0);
    std::function<bool(std::size_t)> dfs = [&](std::size_t u) {
        color[u] = 1;
        for (std::size_t v : succ[u]) {
            if (color[v] == 1) return true;
            if (color[v] == 0 && dfs(v)) return true;
        }
        color[u] = 2;
        return false;
    };
    for (std::size_t u = 0; u < n; ++u)
        if (color[u] == 0 && dfs(u)) return true;
    return false;
}

// Every net driven exactly once, inputs drawn from all nets: cycles allowed.
Netlist random_graph(std::mt19937_64& rng) {
    NetlistBuilder b;
    const int cells = 1 + static_cast<int>(rng() % 8);
    const NetId in = b.add_net("in");
    b.add_input_port("in", in);
    std::vector<NetId> nets{in};
    for (int i = 0; i < cells; ++i) nets.push_back(b.add_net());
    const CellKind kinds[] = {CellKind::Not, CellKind::And2, CellKind::Or2, CellKind::CElement};
    for (int i = 0; i < cells; ++i) {
        const CellKind k = kinds[rng() % 4];
        std::vector<NetId> ins(signature(k).inputs);
        for (NetId& x : ins) x = nets[rng() % nets.size()];
        b.add_cell(k, ins, {nets[static_cast<std::size_t>(i) + 1]}, 5);
    }
    return std::move(b).build();
}

}  // namespace

TEST_CASE("validate: empty netlist is clean") { CHECK(validate(Netlist{}).ok()); }

TEST_CASE("validate: two drivers on one net") {
    NetlistBuilder b;
    const NetId a = b.add_net("a"), y = b.add_net("y");
    b.add_input_port("a", a);
    b.add_cell(CellKind::Not, {a}, {y}, 10);
    b.add_cell(CellKind::Not, {a}, {y}, 10);
    const auto rep = validate(std::move(b).build());
    REQUIRE(rep.count(ViolationKind::MultiDriver) == 1);
    const auto& v = rep.violations.front();
    REQUIRE(v.nets.size() == 1);
    CHECK(v.nets.front() == y);
}

TEST_CASE("validate: inverter feeding itself is one combinational cycle") {
    NetlistBuilder b;
    const NetId y = b.add_net("y");
    b.add_cell(CellKind::Not, {y}, {y}, 10);
    const auto rep = validate(std::move(b).build());
    CHECK(rep.count(ViolationKind::CombinationalCycle) == 1);
    CHECK(rep.violations.size() == 1);
}

TEST_CASE("validate: C-element loop is not combinational") {
    NetlistBuilder b;
    const NetId a = b.add_net("a"), q = b.add_net("q");
    b.add_input_port("a", a);
    b.add_cell(CellKind::CElement, {a, q}, {q}, 10);
    CHECK(validate(std::move(b).build()).ok());
}

TEST_CASE("validate: undriven, arity, unknown net and delay problems") {
    NetlistBuilder b;
    const NetId a = b.add_net("a"), y = b.add_net("y"), z = b.add_net("z");
    b.add_cell(CellKind::And2, {a}, {y}, 10);   // arity
    b.add_cell(CellKind::Not, {y}, {z}, 0);     // delay < 1
    b.add_cell(CellKind::Not, {NetId{99}}, {b.add_net("w")}, 5);
    const auto rep = validate(std::move(b).build());
    CHECK(rep.count(ViolationKind::Undriven) == 1);  // a
    CHECK(rep.count(ViolationKind::Arity) == 1);
    CHECK(rep.count(ViolationKind::BadDelay) == 1);
    CHECK(rep.count(ViolationKind::UnknownNet) >= 1);
    CHECK_FALSE(rep.summary().empty());
}

TEST_CASE("validate is idempotent") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 50; ++i) {
        const Netlist nl = random_graph(rng);
        const auto a = validate(nl), b = validate(nl);
        CHECK(a.summary() == b.summary());
    }
}

TEST_CASE("combinational cycle detection agrees with a DFS oracle") {
    std::mt19937_64 rng(11);
    int cyclic = 0;
    for (int i = 0; i < 400; ++i) {
        const Netlist nl = random_graph(rng);
        const bool expect = has_combinational_cycle(nl);
        cyclic += expect;
        CHECK((validate(nl).count(ViolationKind::CombinationalCycle) > 0) == expect);
    }
    CHECK(cyclic > 20);
    CHECK(cyclic < 380);
}

TEST_CASE("longest path: examples") {
    NetlistBuilder b;
    const NetId clk = b.add_net("clk"), d = b.add_net("d"), s = b.add_net("s");
    b.add_input_port("clk", clk);
    b.add_input_port("d", d);
    b.add_input_port("s", s);
    const NetId q0 = b.add_net(), q1 = b.add_net(), m = b.add_net(), q2 = b.add_net(), q3 = b.add_net();
    const CellId r0 = b.add_cell(CellKind::DffRising, {clk, d}, {q0}, 10);
    const CellId r1 = b.add_cell(CellKind::DffRising, {clk, d}, {q1}, 10);
    b.add_cell(CellKind::Mux2, {s, q0, q1}, {m}, 100);
    const CellId r2 = b.add_cell(CellKind::DffRising, {clk, m}, {q2}, 10);
    const CellId lone = b.add_cell(CellKind::DffRising, {clk, d}, {q3}, 10);
    const Netlist nl = std::move(b).build();
    const std::vector<CellId> from{r0, r1}, to{r2}, none{lone};
    CHECK(longest_register_to_register_path(nl, from, to) == 100);
    CHECK(longest_register_to_register_path(nl, from, none) == 0);
    const std::vector<CellId> bad{CellId{2}};  // the MUX
    CHECK_THROWS_AS(longest_register_to_register_path(nl, bad, to), Error);
}

TEST_CASE("longest path: parallel chains of 3 and 5 gates") {
    NetlistBuilder b;
    const NetId clk = b.add_net("clk"), d = b.add_net("d");
    b.add_input_port("clk", clk);
    b.add_input_port("d", d);
    const NetId q = b.add_net();
    const CellId src = b.add_cell(CellKind::DffRising, {clk, d}, {q}, 10);
    auto chain = [&](int n) {
        NetId cur = q;
        for (int i = 0; i < n; ++i) {
            const NetId nx = b.add_net();
            b.add_cell(CellKind::Not, {cur}, {nx}, 100);
            cur = nx;
        }
        return cur;
    };
    const NetId a = chain(3), c = chain(5), y = b.add_net(), qq = b.add_net();
    b.add_cell(CellKind::And2, {a, c}, {y}, 1);
    const CellId dst = b.add_cell(CellKind::DffRising, {clk, y}, {qq}, 10);
    const Netlist nl = std::move(b).build();
    const std::vector<CellId> from{src}, to{dst};
    CHECK(longest_register_to_register_path(nl, from, to) == 501);
    CHECK(brute_force_longest(nl, from, to) == 501);
}

TEST_CASE("longest path equals brute-force enumeration on random DAGs") {
    std::mt19937_64 rng(2026);
    for (int i = 0; i < 300; ++i) {
        const RandomBanks r = random_banks(rng);
        REQUIRE(validate(r.netlist).ok());
        CHECK(longest_register_to_register_path(r.netlist, r.from, r.to) ==
              brute_force_longest(r.netlist, r.from, r.to));
    }
}

TEST_CASE("serialization round trip") {
    SUBCASE("source to probe") {
        NetlistBuilder b;
        const NetId n = b.add_net("n");
        b.add_cell(CellKind::Source, {}, {n}, 0, "src");
        b.add_cell(CellKind::Probe, {n}, {}, 1, "probe");
        const Netlist nl = std::move(b).build();
        CHECK(deserialize(serialize(nl)) == nl);
    }
    SUBCASE("random register DAGs") {
        std::mt19937_64 rng(7);
        for (int i = 0; i < 50; ++i) {
            const Netlist nl = random_banks(rng).netlist;
            const std::string doc = serialize(nl);
            CHECK(deserialize(doc) == nl);
            CHECK(serialize(deserialize(doc)) == doc);
        }
    }
    SUBCASE("generated trees") {
        for (int n : {2, 8, 16}) {
            GenParams p;
            p.num_events = n;
            p.ctrl_delay_buffers.assign(static_cast<std::size_t>(stage_count(n)), 1);
            for (bool expand : {false, true}) {
                p.expand_c_elements = expand;
                const Netlist nl = build_aer_tree(p).netlist;
                CHECK(deserialize(serialize(nl)) == nl);
            }
        }
    }
}

TEST_CASE("deserialize diagnostics") {
    NetlistBuilder b;
    const NetId i = b.add_net("i"), o = b.add_net("o");
    b.add_input_port("i", i);
    b.add_delay_buffer(i, o, 40, "buf");
    const std::string good = serialize(std::move(b).build());

    auto edited = [&](const std::function<void(nlohmann::json&)>& f) {
        nlohmann::json j = nlohmann::json::parse(good);
        f(j);
        return j.dump(2);
    };
    SUBCASE("negative delay names the field") {
        const auto doc = edited([](auto& j) { j["cells"][0]["params"]["delay_ps"] = -5; });
        CHECK_THROWS_WITH_AS(deserialize(doc), doctest::Contains("delay_ps"), Error);
    }
    SUBCASE("unknown kind") {
        const auto doc = edited([](auto& j) { j["cells"][0]["kind"] = "XOR3"; });
        CHECK_THROWS_WITH_AS(deserialize(doc), doctest::Contains("XOR3"), Error);
    }
    SUBCASE("wrong format version") {
        const auto doc = edited([](auto& j) { j["format_version"] = 99; });
        CHECK_THROWS_AS(deserialize(doc), Error);
    }
    SUBCASE("malformed text reports a line") {
        CHECK_THROWS_WITH_AS(deserialize("{\n  \"nets\": [\n  oops\n"), doctest::Contains("line 3"), Error);
    }
}
