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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aer/types.hpp"

namespace aer {

enum class CellKind : std::uint8_t {
    And2,
    Or2,
    Nand2,
    Not,
    Mux2,
    DelayBuffer,
    CElement,
    DffRising,
    MutexArbiter,
    Source,
    Probe,
};

inline constexpr CellKind kAllCellKinds[] = {
    CellKind::And2,     CellKind::Or2,       CellKind::Nand2,        CellKind::Not,
    CellKind::Mux2,     CellKind::DelayBuffer, CellKind::CElement,   CellKind::DffRising,
    CellKind::MutexArbiter, CellKind::Source, CellKind::Probe,
};

std::string_view to_string(CellKind kind);
std::optional<CellKind> cell_kind_from_string(std::string_view name);

/// Pin signature of a kind: number of inputs and outputs.
struct PinSignature {
    std::size_t inputs;
    std::size_t outputs;
};
PinSignature signature(CellKind kind);

/// True for cells whose output depends on internal state (cuts combinational cycles).
bool is_stateful(CellKind kind);

// Pin positions for the multi-input kinds.
namespace pin {
inline constexpr std::size_t kMuxSel = 0, kMuxIn0 = 1, kMuxIn1 = 2;
inline constexpr std::size_t kDffClk = 0, kDffD = 1;
inline constexpr std::size_t kArbR1 = 0, kArbR2 = 1;
inline constexpr std::size_t kArbG1 = 0, kArbG2 = 1;
}  // namespace pin

/// Kind-specific parameters. Fields not used by a kind stay zero.
struct CellParams {
    Time delay_ps = 0;           // DELAY_BUFFER
    Time setup_ps = 0;           // DFF_RISING
    Time hold_ps = 0;            // DFF_RISING
    Time meta_window_ps = 0;     // MUTEX_ARBITER
    Time resolution_tau_ps = 0;  // MUTEX_ARBITER

    friend bool operator==(const CellParams&, const CellParams&) = default;
};

struct Cell {
    CellId id;
    CellKind kind = CellKind::And2;
    std::vector<NetId> inputs;
    std::vector<NetId> outputs;
    Time prop_delay_ps = 1;
    CellParams params;
    std::string name;
    // Marks the feedback gate of a gate-level state-holding loop (the OR closing an
    // expanded C-element). Such gates are treated as state points by cycle checks.
    bool keeper = false;

    bool holds_state() const { return keeper || is_stateful(kind); }

    friend bool operator==(const Cell&, const Cell&) = default;
};

struct Net {
    NetId id;
    std::string name;

    friend bool operator==(const Net&, const Net&) = default;
};

struct Port {
    std::string name;
    NetId net;

    friend bool operator==(const Port&, const Port&) = default;
};

/// Immutable circuit graph. Cell and net ids are dense indices into cells()/nets().
class Netlist {
public:
    Netlist() = default;
    Netlist(std::vector<Net> nets, std::vector<Cell> cells, std::vector<Port> input_ports,
            std::vector<Port> output_ports);

    std::span<const Net> nets() const { return nets_; }
    std::span<const Cell> cells() const { return cells_; }
    std::span<const Port> input_ports() const { return input_ports_; }
    std::span<const Port> output_ports() const { return output_ports_; }

    const Cell& cell(CellId id) const { return cells_.at(id.index()); }
    const Net& net(NetId id) const { return nets_.at(id.index()); }
    bool has_net(NetId id) const { return id.valid() && id.index() < nets_.size(); }
    bool has_cell(CellId id) const { return id.valid() && id.index() < cells_.size(); }

    std::optional<NetId> find_net(std::string_view name) const;
    std::optional<CellId> find_cell(std::string_view name) const;
    std::optional<NetId> input_port(std::string_view name) const;
    std::optional<NetId> output_port(std::string_view name) const;
    bool is_input_port(NetId net) const;

    std::string net_label(NetId id) const;

    friend bool operator==(const Netlist&, const Netlist&) = default;

private:
    std::vector<Net> nets_;
    std::vector<Cell> cells_;
    std::vector<Port> input_ports_;
    std::vector<Port> output_ports_;
};

class NetlistBuilder {
public:
    NetId add_net(std::string name = {});
    CellId add_cell(CellKind kind, std::vector<NetId> inputs, std::vector<NetId> outputs, Time prop_delay_ps,
                    std::string name = {}, CellParams params = {});
    CellId add_delay_buffer(NetId in, NetId out, Time delay_ps, std::string name = {});
    void set_keeper(CellId cell);
    void add_input_port(std::string name, NetId net);
    void add_output_port(std::string name, NetId net);

    std::size_t net_count() const { return nets_.size(); }
    std::size_t cell_count() const { return cells_.size(); }

    Netlist build() &&;

private:
    std::vector<Net> nets_;
    std::vector<Cell> cells_;
    std::vector<Port> inputs_;
    std::vector<Port> outputs_;
};

// ---------------------------------------------------------------------------
// Validation

enum class ViolationKind : std::uint8_t {
    MultiDriver,
    Undriven,
    UnknownNet,
    Arity,
    BadDelay,
    CombinationalCycle,
};
std::string_view to_string(ViolationKind kind);

struct NetlistViolation {
    ViolationKind kind;
    std::vector<CellId> cells;
    std::vector<NetId> nets;
    std::string message;
};

struct ValidationReport {
    std::vector<NetlistViolation> violations;

    bool ok() const { return violations.empty(); }
    std::size_t count(ViolationKind kind) const;
    std::string summary() const;
};

ValidationReport validate(const Netlist& netlist);

/// Driver and fanout lookup tables derived from a netlist.
struct NetlistIndex {
    struct Load {
        CellId cell;
        std::uint32_t pin;
    };
    // Driving cell of each net; invalid for port-driven or undriven nets.
    std::vector<CellId> driver;
    std::vector<std::vector<Load>> loads;

    explicit NetlistIndex(const Netlist& netlist);
};

/// Longest sum of prop_delay_ps along combinational paths from a q output of a
/// register in `from` to the d input of a register in `to`; 0 when unconnected.
/// Throws aer::Error if either set names a non-DFF_RISING cell.
Time longest_register_to_register_path(const Netlist& netlist, std::span<const CellId> from,
                                       std::span<const CellId> to);

// ---------------------------------------------------------------------------
// Serialization (JSON, format_version 1)

inline constexpr int kNetlistFormatVersion = 1;

std::string serialize(const Netlist& netlist);

/// Parses a netlist document. Throws aer::Error with a JSON path on malformed input.
Netlist deserialize(std::string_view text);

}  // namespace aer
