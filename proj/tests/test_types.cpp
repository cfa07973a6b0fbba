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

#include "aer/types.hpp"

using aer::LogicLevel;
namespace {
constexpr LogicLevel L = LogicLevel::Low, H = LogicLevel::High, X = LogicLevel::Unknown;
constexpr LogicLevel kAll[] = {L, H, X};

// Reference semantics: treat X as "could be either" and resolve only when both
// substitutions agree.
template <typename F>
LogicLevel by_substitution(F f, LogicLevel a, LogicLevel b) {
    auto expand = [](LogicLevel v) {
        if (v == X) return std::vector<bool>{false, true};
        return std::vector<bool>{v == H};
    };
    bool seen0 = false, seen1 = false;
    for (bool x : expand(a))
        for (bool y : expand(b)) (f(x, y) ? seen1 : seen0) = true;
    return seen0 && seen1 ? X : (seen1 ? H : L);
}
}  // namespace

TEST_CASE("two-input gates agree with X-substitution semantics") {
    for (LogicLevel a : kAll) {
        for (LogicLevel b : kAll) {
            CHECK(aer::logic_and(a, b) == by_substitution([](bool x, bool y) { return x && y; }, a, b));
            CHECK(aer::logic_or(a, b) == by_substitution([](bool x, bool y) { return x || y; }, a, b));
        }
    }
}

TEST_CASE("controlling inputs resolve through UNKNOWN") {
    CHECK(aer::logic_and(L, X) == L);
    CHECK(aer::logic_or(H, X) == H);
    CHECK(aer::logic_not(X) == X);
    CHECK(aer::logic_mux(X, H, H) == H);
    CHECK(aer::logic_mux(X, L, H) == X);
    CHECK(aer::logic_mux(L, H, L) == H);
    CHECK(aer::logic_mux(H, H, L) == L);
}

TEST_CASE("C-element hand truth table") {
    // a b q -> q'
    struct Row { LogicLevel a, b, q, next; };
    const Row rows[] = {
        {L, L, L, L}, {L, L, H, L}, {H, H, L, H}, {H, H, H, H},
        {L, H, L, L}, {L, H, H, H}, {H, L, L, L}, {H, L, H, H},
        {X, H, H, H}, {X, L, L, L}, {X, H, L, X}, {H, H, X, H},
    };
    for (const Row& r : rows) CHECK(aer::c_element_next(r.a, r.b, r.q) == r.next);
}

TEST_CASE("level characters") {
    CHECK(aer::level_char(L) == '0');
    CHECK(aer::level_char(H) == '1');
    CHECK(aer::level_char(X) == 'x');
}

TEST_CASE("ids are invalid by default and ordered by value") {
    aer::NetId n;
    CHECK_FALSE(n.valid());
    CHECK(aer::NetId{3} < aer::NetId{4});
    CHECK(aer::NetId{3}.index() == 3);
}
