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

#include <ostream>
#include <sstream>

#include <json.hpp>

#include "aer/sim.hpp"

namespace aer {

namespace {

// Short printable identifier codes: '!' .. '~', base 94.
std::string vcd_code(std::size_t n) {
    std::string s;
    do {
        s += static_cast<char>('!' + n % 94);
        n /= 94;
    } while (n > 0);
    return s;
}

}  // namespace

std::string export_vcd(const Trace& trace, const Netlist& netlist) {
    std::vector<std::string> code(netlist.nets().size());
    std::size_t next = 0;
    std::ostringstream os;
    os << "$version aer-sim $end\n";
    os << "$timescale 1ps $end\n";
    os << "$scope module aer $end\n";
    for (const Net& n : netlist.nets()) {
        if (n.name.empty()) continue;
        code[n.id.index()] = vcd_code(next++);
        os << "$var wire 1 " << code[n.id.index()] << ' ' << n.name << " $end\n";
    }
    os << "$upscope $end\n";
    os << "$enddefinitions $end\n";
    os << "#0\n$dumpvars\n";
    for (const Net& n : netlist.nets()) {
        if (!code[n.id.index()].empty()) os << '0' << code[n.id.index()] << '\n';
    }
    os << "$end\n";

    Time current = 0;
    for (const Transition& t : trace.transitions) {
        const std::string& c = code[t.net.index()];
        if (c.empty()) continue;
        if (t.time_ps != current) {
            current = t.time_ps;
            os << '#' << current << '\n';
        }
        os << level_char(t.level) << c << '\n';
    }
    return os.str();
}

void write_transition_log(std::ostream& os, const Trace& trace, const Netlist& netlist) {
    for (const Transition& t : trace.transitions) {
        nlohmann::ordered_json j;
        j["t"] = t.time_ps;
        j["net"] = netlist.net_label(t.net);
        j["level"] = std::string(1, level_char(t.level));
        os << j.dump() << '\n';
    }
}

}  // namespace aer
