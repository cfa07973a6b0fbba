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
#include <sstream>

#include "aer/traffic.hpp"

using namespace aer;

namespace {

struct VcdChange {
    Time t;
    std::string name;
    char value;
    friend bool operator==(const VcdChange&, const VcdChange&) = default;
};

struct ParsedVcd {
    std::string timescale;
    std::map<std::string, std::string> names;  // code -> name
    std::map<std::string, char> initial;
    std::vector<VcdChange> changes;
};

// Minimal reader for the subset of IEEE 1364 used by scalar wire dumps.
ParsedVcd parse_vcd(const std::string& text) {
    ParsedVcd out;
    std::istringstream in(text);
    std::string tok;
    Time now = 0;
    bool in_dumpvars = false, defs_done = false;
    while (in >> tok) {
        if (tok == "$timescale") {
            in >> out.timescale;
            in >> tok;  // $end
        } else if (tok == "$var") {
            std::string type, width, code, name, end;
            in >> type >> width >> code >> name >> end;
            REQUIRE(type == "wire");
            REQUIRE(width == "1");
            REQUIRE(end == "$end");
            out.names[code] = name;
        } else if (tok == "$enddefinitions") {
            in >> tok;
            defs_done = true;
        } else if (tok == "$dumpvars") {
            in_dumpvars = true;
        } else if (tok == "$end") {
            in_dumpvars = false;
        } else if (tok[0] == '$') {
            while (in >> tok && tok != "$end") {}
        } else if (tok[0] == '#') {
            REQUIRE(defs_done);
            now = std::stoll(tok.substr(1));
        } else {
            const char v = tok[0];
            REQUIRE((v == '0' || v == '1' || v == 'x'));
            const std::string code = tok.substr(1);
            REQUIRE(out.names.count(code));
            if (in_dumpvars) out.initial[code] = v;
            else out.changes.push_back({now, out.names[code], v});
        }
    }
    return out;
}

}  // namespace

TEST_CASE("VCD of an empty trace is a header plus initial LOW values") {
    NetlistBuilder b;
    const NetId a = b.add_net("a"), y = b.add_net("y");
    b.add_input_port("a", a);
    b.add_cell(CellKind::And2, {a, a}, {y}, 5);
    const Netlist nl = std::move(b).build();
    const ParsedVcd v = parse_vcd(export_vcd(Trace{}, nl));
    CHECK(v.timescale == "1ps");
    CHECK(v.names.size() == 2);
    CHECK(v.initial.size() == 2);
    for (const auto& [code, val] : v.initial) CHECK(val == '0');
    CHECK(v.changes.empty());
}

TEST_CASE("a single transition lands under its timestamp") {
    NetlistBuilder b;
    const NetId a = b.add_net("a");
    b.add_input_port("a", a);
    const Netlist nl = std::move(b).build();
    Trace t;
    t.net_count = 1;
    t.transitions.push_back({50, a, LogicLevel::High});
    const std::string text = export_vcd(t, nl);
    CHECK(text.find("#50\n") != std::string::npos);
    const ParsedVcd v = parse_vcd(text);
    CHECK(v.changes == std::vector<VcdChange>{{50, "a", '1'}});
}

TEST_CASE("full-scan trace: independent reader recovers every transition") {
    const AerTree tree = build_aer_tree(GenParams{});
    Workload w;
    w.count_per_leaf = 4;
    const RunResult r = run_workload(tree, w, 3);
    const ParsedVcd v = parse_vcd(export_vcd(r.trace, tree.netlist));
    std::vector<VcdChange> expect;
    for (const Transition& t : r.trace.transitions) {
        const std::string& name = tree.netlist.net(t.net).name;
        if (!name.empty()) expect.push_back({t.time_ps, name, level_char(t.level)});
    }
    CHECK(expect.size() > 1000);
    CHECK(v.changes.size() == expect.size());
    CHECK(v.changes == expect);
}

TEST_CASE("transition log is one JSON object per line") {
    const AerTree tree = build_aer_tree(GenParams{});
    Workload w;
    const RunResult r = run_workload(tree, w, 3);
    std::ostringstream os;
    write_transition_log(os, r.trace, tree.netlist);
    std::istringstream in(os.str());
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j.at("t").get<Time>() == r.trace.transitions[n].time_ps);
        CHECK(j.at("net").get<std::string>() == tree.netlist.net_label(r.trace.transitions[n].net));
        ++n;
    }
    CHECK(n == r.trace.transitions.size());
}
