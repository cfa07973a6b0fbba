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

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace aer {

/// Simulation time in integer picoseconds.
using Time = std::int64_t;

inline constexpr Time kNever = std::numeric_limits<Time>::min() / 4;

/// Thin strong index type; Tag only disambiguates the overloads.
template <typename Tag>
struct Id {
    std::uint32_t value = std::numeric_limits<std::uint32_t>::max();

    constexpr Id() = default;
    constexpr explicit Id(std::uint32_t v) : value(v) {}

    constexpr bool valid() const { return value != std::numeric_limits<std::uint32_t>::max(); }
    constexpr std::size_t index() const { return value; }

    friend constexpr auto operator<=>(Id, Id) = default;
};

struct NetTag {};
struct CellTag {};
using NetId = Id<NetTag>;
using CellId = Id<CellTag>;

/// Three-valued logic. UNKNOWN stands for unresolved or metastable values.
enum class LogicLevel : std::uint8_t { Low = 0, High = 1, Unknown = 2 };

constexpr LogicLevel logic_not(LogicLevel a) {
    switch (a) {
    case LogicLevel::Low: return LogicLevel::High;
    case LogicLevel::High: return LogicLevel::Low;
    default: return LogicLevel::Unknown;
    }
}

constexpr LogicLevel logic_and(LogicLevel a, LogicLevel b) {
    if (a == LogicLevel::Low || b == LogicLevel::Low) return LogicLevel::Low;
    if (a == LogicLevel::High && b == LogicLevel::High) return LogicLevel::High;
    return LogicLevel::Unknown;
}

constexpr LogicLevel logic_or(LogicLevel a, LogicLevel b) {
    if (a == LogicLevel::High || b == LogicLevel::High) return LogicLevel::High;
    if (a == LogicLevel::Low && b == LogicLevel::Low) return LogicLevel::Low;
    return LogicLevel::Unknown;
}

constexpr LogicLevel logic_mux(LogicLevel sel, LogicLevel in0, LogicLevel in1) {
    if (sel == LogicLevel::Low) return in0;
    if (sel == LogicLevel::High) return in1;
    return in0 == in1 ? in0 : LogicLevel::Unknown;
}

/// Muller C-element next state: q' = a.b + q.(a + b).
constexpr LogicLevel c_element_next(LogicLevel a, LogicLevel b, LogicLevel q) {
    return logic_or(logic_and(a, b), logic_and(q, logic_or(a, b)));
}

constexpr char level_char(LogicLevel l) {
    switch (l) {
    case LogicLevel::Low: return '0';
    case LogicLevel::High: return '1';
    default: return 'x';
    }
}

/// Base class for errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace aer

template <typename Tag>
struct std::hash<aer::Id<Tag>> {
    std::size_t operator()(aer::Id<Tag> id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};
