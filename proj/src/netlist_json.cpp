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

#include <algorithm>
#include <json.hpp>

#include "aer/netlist.hpp"

namespace aer {

using ojson = nlohmann::ordered_json;

namespace {

ojson params_json(const Cell& c) {
    ojson p = ojson::object();
    switch (c.kind) {
    case CellKind::DelayBuffer: p["delay_ps"] = c.params.delay_ps; break;
    case CellKind::DffRising:
        p["setup_ps"] = c.params.setup_ps;
        p["hold_ps"] = c.params.hold_ps;
        break;
    case CellKind::MutexArbiter:
        p["meta_window_ps"] = c.params.meta_window_ps;
        p["resolution_tau_ps"] = c.params.resolution_tau_ps;
        break;
    default: break;
    }
    return p;
}

ojson ports_json(std::span<const Port> ports) {
    ojson arr = ojson::array();
    for (const Port& p : ports) arr.push_back({{"name", p.name}, {"net", p.net.value}});
    return arr;
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw Error("netlist document: " + path + ": " + what);
}

const ojson& member(const ojson& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(path + "." + key, "missing required field");
    return *it;
}

const ojson& array_member(const ojson& obj, const char* key, const std::string& path) {
    const ojson& v = member(obj, key, path);
    if (!v.is_array()) fail(path + "." + key, "expected an array");
    return v;
}

std::int64_t integer(const ojson& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<std::int64_t>();
}

Time non_negative(const ojson& v, const std::string& path) {
    const std::int64_t x = integer(v, path);
    if (x < 0) fail(path, "must be non-negative, got " + std::to_string(x));
    return x;
}

std::uint32_t id_value(const ojson& v, const std::string& path) {
    const std::int64_t x = integer(v, path);
    if (x < 0 || x > std::int64_t{0xfffffffe}) fail(path, "id out of range");
    return static_cast<std::uint32_t>(x);
}

std::vector<NetId> net_list(const ojson& obj, const char* key, const std::string& path) {
    const ojson& arr = array_member(obj, key, path);
    std::vector<NetId> out;
    for (std::size_t i = 0; i < arr.size(); ++i)
        out.emplace_back(id_value(arr[i], path + "." + key + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<Port> parse_ports(const ojson& doc, const char* key) {
    const ojson& arr = array_member(doc, key, "$");
    std::vector<Port> ports;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string path = std::string("$.") + key + "[" + std::to_string(i) + "]";
        const ojson& name = member(arr[i], "name", path);
        if (!name.is_string()) fail(path + ".name", "expected a string");
        ports.push_back({name.get<std::string>(), NetId{id_value(member(arr[i], "net", path), path + ".net")}});
    }
    return ports;
}

std::size_t line_of(std::string_view text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace

std::string serialize(const Netlist& netlist) {
    ojson doc;
    doc["format_version"] = kNetlistFormatVersion;
    ojson nets = ojson::array();
    for (const Net& n : netlist.nets()) {
        ojson j;
        j["id"] = n.id.value;
        if (!n.name.empty()) j["name"] = n.name;
        nets.push_back(std::move(j));
    }
    doc["nets"] = std::move(nets);

    ojson cells = ojson::array();
    for (const Cell& c : netlist.cells()) {
        ojson j;
        j["id"] = c.id.value;
        if (!c.name.empty()) j["name"] = c.name;
        j["kind"] = to_string(c.kind);
        j["params"] = params_json(c);
        ojson in = ojson::array(), out = ojson::array();
        for (NetId n : c.inputs) in.push_back(n.value);
        for (NetId n : c.outputs) out.push_back(n.value);
        j["inputs"] = std::move(in);
        j["outputs"] = std::move(out);
        j["prop_delay_ps"] = c.prop_delay_ps;
        if (c.keeper) j["keeper"] = true;
        cells.push_back(std::move(j));
    }
    doc["cells"] = std::move(cells);
    doc["input_ports"] = ports_json(netlist.input_ports());
    doc["output_ports"] = ports_json(netlist.output_ports());
    return doc.dump(1) + "\n";
}

Netlist deserialize(std::string_view text) {
    ojson doc;
    try {
        doc = ojson::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("netlist document: line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
    }
    if (!doc.is_object()) fail("$", "expected an object");
    const std::int64_t version = integer(member(doc, "format_version", "$"), "$.format_version");
    if (version != kNetlistFormatVersion)
        fail("$.format_version", "unsupported version " + std::to_string(version));

    const ojson& net_arr = array_member(doc, "nets", "$");
    std::vector<Net> nets;
    for (std::size_t i = 0; i < net_arr.size(); ++i) {
        const std::string path = "$.nets[" + std::to_string(i) + "]";
        const std::uint32_t id = id_value(member(net_arr[i], "id", path), path + ".id");
        if (id != i) fail(path + ".id", "ids must be dense and ordered, expected " + std::to_string(i));
        Net n{NetId{id}, {}};
        if (auto it = net_arr[i].find("name"); it != net_arr[i].end()) {
            if (!it->is_string()) fail(path + ".name", "expected a string");
            n.name = it->get<std::string>();
        }
        nets.push_back(std::move(n));
    }

    const ojson& cell_arr = array_member(doc, "cells", "$");
    std::vector<Cell> cells;
    for (std::size_t i = 0; i < cell_arr.size(); ++i) {
        const std::string path = "$.cells[" + std::to_string(i) + "]";
        const ojson& cj = cell_arr[i];
        Cell c;
        const std::uint32_t id = id_value(member(cj, "id", path), path + ".id");
        if (id != i) fail(path + ".id", "ids must be dense and ordered, expected " + std::to_string(i));
        c.id = CellId{id};
        const ojson& kind = member(cj, "kind", path);
        if (!kind.is_string()) fail(path + ".kind", "expected a string");
        auto parsed = cell_kind_from_string(kind.get<std::string>());
        if (!parsed) fail(path + ".kind", "unknown cell kind '" + kind.get<std::string>() + "'");
        c.kind = *parsed;
        if (auto it = cj.find("name"); it != cj.end()) {
            if (!it->is_string()) fail(path + ".name", "expected a string");
            c.name = it->get<std::string>();
        }
        c.inputs = net_list(cj, "inputs", path);
        c.outputs = net_list(cj, "outputs", path);

        const ojson* params = nullptr;
        if (auto it = cj.find("params"); it != cj.end()) {
            if (!it->is_object()) fail(path + ".params", "expected an object");
            params = &*it;
        }
        auto param = [&](const char* key, Time& field, bool required) {
            if (params && params->contains(key)) {
                field = non_negative((*params)[key], path + ".params." + key);
            } else if (required) {
                fail(path + ".params." + key, "missing required field");
            }
        };
        switch (c.kind) {
        case CellKind::DelayBuffer: param("delay_ps", c.params.delay_ps, true); break;
        case CellKind::DffRising:
            param("setup_ps", c.params.setup_ps, true);
            param("hold_ps", c.params.hold_ps, true);
            break;
        case CellKind::MutexArbiter:
            param("meta_window_ps", c.params.meta_window_ps, true);
            param("resolution_tau_ps", c.params.resolution_tau_ps, true);
            break;
        default: break;
        }

        if (auto it = cj.find("prop_delay_ps"); it != cj.end()) {
            c.prop_delay_ps = non_negative(*it, path + ".prop_delay_ps");
        } else if (c.kind == CellKind::DelayBuffer) {
            c.prop_delay_ps = c.params.delay_ps;
        } else {
            fail(path + ".prop_delay_ps", "missing required field");
        }
        if (c.kind == CellKind::DelayBuffer && c.prop_delay_ps != c.params.delay_ps)
            fail(path + ".prop_delay_ps", "must equal params.delay_ps for DELAY_BUFFER");
        if (auto it = cj.find("keeper"); it != cj.end()) {
            if (!it->is_boolean()) fail(path + ".keeper", "expected a boolean");
            c.keeper = it->get<bool>();
        }
        cells.push_back(std::move(c));
    }

    return Netlist(std::move(nets), std::move(cells), parse_ports(doc, "input_ports"),
                   parse_ports(doc, "output_ports"));
}

}  // namespace aer
