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

#include "aer/closure.hpp"

#include <map>

#include "aer/metrics.hpp"

namespace aer {

StageTiming make_stage_timing(int stage, Time period, Time data_delay, Time setup) {
    StageTiming t;
    t.stage = stage;
    t.t_period_ack_ps = period;
    t.data_delay_ps = data_delay;
    t.setup_ps = setup;
    t.margin_ps = period - setup - data_delay;
    t.target_ps = period / 5;  // floor(0.2 T) for T >= 0
    return t;
}

std::vector<StageTiming> extract_periods(const Trace& trace, const Netlist& netlist, const PortMap& ports) {
    std::vector<StageTiming> out;
    for (std::size_t s = 0; s < ports.stages.size(); ++s) {
        std::vector<NetId> acks;
        for (const NodePorts& n : ports.stages[s]) acks.push_back(n.local_ack);
        const auto period = min_rise_interval(trace, acks);
        if (!period)
            throw Error("extract_periods: insufficient workload, no stage-" + std::to_string(s) +
                        " ACK rose twice");
        const std::vector<CellId> to = ports.stage_registers(static_cast<int>(s));
        Time data = 0;
        if (s > 0) data = longest_register_to_register_path(netlist, ports.stage_registers(static_cast<int>(s) - 1), to);
        Time setup = 0;
        for (CellId r : to) setup = std::max(setup, netlist.cell(r).params.setup_ps);
        out.push_back(make_stage_timing(static_cast<int>(s), *period, data, setup));
    }
    return out;
}

namespace {

Workload full_scan(int per_leaf, std::uint64_t seed, const ClosureOptions& o) {
    Workload w;
    w.kind = Workload::Kind::FullScan;
    w.count_per_leaf = per_leaf;
    w.seed = seed;
    w.leaf_response_ps = o.leaf_response_ps;
    w.receiver_response_ps = o.receiver_response_ps;
    return w;
}

// Stages implicated by register-level violations.
std::vector<bool> implicated_stages(const ProtocolReport& rep, const Netlist& netlist, const PortMap& ports) {
    std::map<std::uint32_t, std::size_t> stage_of;
    for (std::size_t s = 0; s < ports.stages.size(); ++s)
        for (CellId r : ports.stage_registers(static_cast<int>(s))) stage_of[r.value] = s;
    std::vector<bool> hit(ports.stages.size(), false);
    for (const TimingViolation& v : rep.timing)
        if (auto it = stage_of.find(v.cell.value); it != stage_of.end()) hit[it->second] = true;
    for (const ProtocolViolation& v : rep.violations) {
        if (v.kind != ProtocolViolationKind::Bundling) continue;
        // Locations look like "s<stage>n<node>.addr<bit>", or a register cell name.
        if (v.location.size() > 1 && v.location[0] == 's') {
            const auto s = static_cast<std::size_t>(std::stoi(v.location.substr(1)));
            if (s < hit.size()) hit[s] = true;
        } else if (auto c = netlist.find_cell(v.location)) {
            if (auto it = stage_of.find(c->value); it != stage_of.end()) hit[it->second] = true;
        }
    }
    return hit;
}

}  // namespace

ClosureReport run_closure(const GenParams& params, int max_iterations, const ClosureOptions& options) {
    if (max_iterations < 1) throw Error("run_closure: max_iterations must be >= 1");
    if (options.verify_seeds < 1 || options.verify_tokens_per_leaf < 1 || options.extract_tokens_per_leaf < 2)
        throw Error("run_closure: invalid verification options");
    if (!(options.delay_inflation > 0)) throw Error("run_closure: delay_inflation must be > 0");

    ClosureReport report;
    GenParams current = params;
    for (int iter = 0; iter < max_iterations; ++iter) {
        ClosureIteration it;
        it.buffers = current.ctrl_delay_buffers;
        const AerTree tree = build_aer_tree(current);
        SimOptions rec;
        rec.record_mask = monitor_mask(tree.netlist, tree.ports);
        const RunResult extract =
            run_workload(tree, full_scan(options.extract_tokens_per_leaf, options.seed, options), options.seed,
                         kUnbounded, rec);
        it.timing = extract_periods(extract.trace, tree.netlist, tree.ports);

        const std::size_t stages = it.timing.size();
        std::vector<bool> bump(stages, false);
        it.rule_passed = true;
        for (const StageTiming& t : it.timing) {
            if (!t.passes()) {
                bump[static_cast<std::size_t>(t.stage)] = true;
                it.rule_passed = false;
            }
        }

        if (it.rule_passed) {
            GenParams inflated = current;
            inflated.datapath_delay_scale *= options.delay_inflation;
            const AerTree vtree = build_aer_tree(inflated);
            SimOptions vrec;
            vrec.record_mask = monitor_mask(vtree.netlist, vtree.ports);
            std::vector<bool> hit(stages, false);
            bool attributable = false;
            for (int k = 0; k < options.verify_seeds; ++k) {
                const std::uint64_t seed = options.seed + static_cast<std::uint64_t>(k);
                const RunResult run = run_workload(vtree, full_scan(options.verify_tokens_per_leaf, seed, options),
                                                   seed, kUnbounded, vrec);
                const ProtocolReport rep = check_all(run.trace, vtree.netlist, vtree.ports, run.state);
                it.violations += rep.violations.size() + rep.timing.size();
                const auto h = implicated_stages(rep, vtree.netlist, vtree.ports);
                for (std::size_t s = 0; s < stages; ++s) {
                    if (h[s]) {
                        hit[s] = true;
                        attributable = true;
                    }
                }
            }
            it.verified = it.violations == 0;
            if (!it.verified) bump = attributable ? hit : std::vector<bool>(stages, true);
        }

        it.passed = it.rule_passed && it.verified;
        report.per_iteration.push_back(it);
        report.iterations = iter + 1;
        if (it.passed) {
            report.converged = true;
            break;
        }
        for (std::size_t s = 0; s < stages; ++s)
            if (bump[s]) ++current.ctrl_delay_buffers[s];
    }
    report.final_buffers = report.converged ? report.per_iteration.back().buffers : current.ctrl_delay_buffers;
    return report;
}

nlohmann::ordered_json to_json(const StageTiming& t) {
    return {{"stage", t.stage},           {"t_period_ack_ps", t.t_period_ack_ps},
            {"data_delay_ps", t.data_delay_ps}, {"setup_ps", t.setup_ps},
            {"margin_ps", t.margin_ps},   {"target_ps", t.target_ps},
            {"passes", t.passes()}};
}

nlohmann::ordered_json to_json(const ClosureReport& r) {
    nlohmann::ordered_json j;
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    j["final_buffers"] = r.final_buffers;
    nlohmann::ordered_json hist = nlohmann::ordered_json::array();
    for (const ClosureIteration& it : r.per_iteration) {
        nlohmann::ordered_json e;
        e["buffers"] = it.buffers;
        nlohmann::ordered_json timing = nlohmann::ordered_json::array();
        for (const StageTiming& t : it.timing) timing.push_back(to_json(t));
        e["timing"] = timing;
        e["rule_passed"] = it.rule_passed;
        e["verified"] = it.verified;
        e["violations"] = it.violations;
        e["passed"] = it.passed;
        hist.push_back(e);
    }
    j["per_iteration"] = hist;
    return j;
}

nlohmann::ordered_json to_json(const ClosureOptions& o) {
    return {{"extract_tokens_per_leaf", o.extract_tokens_per_leaf},
            {"verify_tokens_per_leaf", o.verify_tokens_per_leaf},
            {"verify_seeds", o.verify_seeds},
            {"seed", o.seed},
            {"delay_inflation", o.delay_inflation},
            {"leaf_response_ps", o.leaf_response_ps},
            {"receiver_response_ps", o.receiver_response_ps}};
}

ClosureOptions closure_options_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error("closure: expected an object");
    ClosureOptions o;
    try {
        o.extract_tokens_per_leaf = j.value("extract_tokens_per_leaf", o.extract_tokens_per_leaf);
        o.verify_tokens_per_leaf = j.value("verify_tokens_per_leaf", o.verify_tokens_per_leaf);
        o.verify_seeds = j.value("verify_seeds", o.verify_seeds);
        o.seed = j.value("seed", o.seed);
        o.delay_inflation = j.value("delay_inflation", o.delay_inflation);
        o.leaf_response_ps = j.value("leaf_response_ps", o.leaf_response_ps);
        o.receiver_response_ps = j.value("receiver_response_ps", o.receiver_response_ps);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("closure: ") + e.what());
    }
    if (o.extract_tokens_per_leaf < 2) throw Error("closure: extract_tokens_per_leaf must be >= 2");
    if (o.verify_tokens_per_leaf < 1 || o.verify_seeds < 1) throw Error("closure: verification sizes must be >= 1");
    if (!(o.delay_inflation > 0)) throw Error("closure: delay_inflation must be > 0");
    return o;
}

nlohmann::ordered_json params_patch(const ClosureReport& r) { return {{"ctrl_delay_buffers", r.final_buffers}}; }

}  // namespace aer
