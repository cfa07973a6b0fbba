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

#include "aer/cli.hpp"

#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace aer::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

fs::path OutputPaths::resolve(const std::string& file) const {
    const fs::path p(file);
    return p.is_absolute() ? p : fs::path(dir) / p;
}

namespace {

nlohmann::json read_json_file(const fs::path& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw Error(std::string("cannot open ") + what + " '" + path.string() + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(std::string(what) + " '" + path.string() + "' is not valid JSON: " + e.what());
    }
}

void write_file(const fs::path& path, const std::string& body) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << body;
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception&) {
        throw Error(std::string("config: field '") + key + "' has the wrong type");
    }
}

}  // namespace

RunConfig parse_run_config(const nlohmann::json& input, const Overrides& ov) {
    nlohmann::json doc = input;
    if (!doc.is_object()) throw Error("config: expected a JSON object");
    if (ov.params_patch) doc.merge_patch(read_json_file(*ov.params_patch, "params patch"));

    RunConfig c;
    c.gen = gen_params_from_json(doc.value("gen", nlohmann::json::object()));
    const auto problems = check_params(c.gen);
    if (!problems.empty()) {
        std::string msg = "config: invalid generator parameters: ";
        for (std::size_t i = 0; i < problems.size(); ++i) msg += (i ? "; " : "") + problems[i];
        throw Error(msg);
    }
    c.seed = get_or<std::uint64_t>(doc, "seed", c.seed);
    if (ov.seed) c.seed = *ov.seed;

    nlohmann::json wl = doc.value("workload", nlohmann::json::object());
    if (!wl.is_object()) throw Error("config: workload must be an object");
    if (!wl.contains("seed")) wl["seed"] = c.seed;
    c.workload = workload_from_json(wl);
    c.energy = energy_model_from_json(doc.value("energy", nlohmann::json::object()));
    c.until_ps = get_or<Time>(doc, "until_ps", c.until_ps);
    if (c.until_ps < 1) throw Error("config: until_ps must be >= 1");

    nlohmann::json cl = doc.value("closure", nlohmann::json::object());
    if (!cl.is_object()) throw Error("config: closure must be an object");
    if (!cl.contains("seed")) cl["seed"] = c.seed;
    c.closure = closure_options_from_json(cl);
    c.max_iterations = get_or<int>(doc, "max_iterations", c.max_iterations);
    if (ov.max_iterations) c.max_iterations = *ov.max_iterations;
    if (c.max_iterations < 1) throw Error("config: max_iterations must be >= 1");

    c.vcd = get_or<bool>(doc, "vcd", c.vcd);
    if (ov.vcd) c.vcd = *ov.vcd;

    const nlohmann::json out = doc.value("outputs", nlohmann::json::object());
    if (!out.is_object()) throw Error("config: outputs must be an object");
    OutputPaths& o = c.outputs;
    const std::map<std::string, std::string*> fields = {
        {"dir", &o.dir},
        {"netlist", &o.netlist},
        {"portmap", &o.portmap},
        {"vcd", &o.vcd},
        {"metrics", &o.metrics},
        {"violations", &o.violations},
        {"latency_csv", &o.latency_csv},
        {"closure_report", &o.closure_report},
        {"params_patch", &o.params_patch},
    };
    for (const auto& [key, dst] : fields) *dst = get_or<std::string>(out, key.c_str(), *dst);
    if (ov.out_dir) o.dir = *ov.out_dir;
    for (const auto& [key, dst] : fields)
        if (dst->empty()) throw Error("config: outputs." + key + " must be non-empty");
    return c;
}

RunConfig load_run_config(const fs::path& path, const Overrides& ov) {
    return parse_run_config(read_json_file(path, "config"), ov);
}

ojson to_json(const RunConfig& c) {
    ojson j;
    j["gen"] = to_json(c.gen);
    j["workload"] = to_json(c.workload);
    j["energy"] = to_json(c.energy);
    j["until_ps"] = c.until_ps;
    j["seed"] = c.seed;
    j["closure"] = to_json(c.closure);
    j["max_iterations"] = c.max_iterations;
    j["vcd"] = c.vcd;
    const OutputPaths& o = c.outputs;
    j["outputs"] = {{"dir", o.dir},
                    {"netlist", o.netlist},
                    {"portmap", o.portmap},
                    {"vcd", o.vcd},
                    {"metrics", o.metrics},
                    {"violations", o.violations},
                    {"latency_csv", o.latency_csv},
                    {"closure_report", o.closure_report},
                    {"params_patch", o.params_patch}};
    return j;
}

namespace {

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }
}

}  // namespace

int cmd_generate(const fs::path& config, const Overrides& ov, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig c = load_run_config(config, ov);
        const AerTree tree = build_aer_tree(c.gen);
        const ValidationReport v = validate(tree.netlist);
        if (!v.ok()) throw Error("generated netlist failed validation: " + v.summary());
        write_file(c.outputs.resolve(c.outputs.netlist), serialize(tree.netlist));
        write_file(c.outputs.resolve(c.outputs.portmap), dump(to_json(tree.ports)));

        std::map<CellKind, std::size_t> counts;
        for (const Cell& cell : tree.netlist.cells()) ++counts[cell.kind];
        out << "num_events " << c.gen.num_events << ", stages " << tree.ports.stages.size() << ", nets "
            << tree.netlist.nets().size() << ", cells " << tree.netlist.cells().size() << '\n';
        for (const auto& [kind, n] : counts) out << "  " << std::left << std::setw(14) << to_string(kind) << n << '\n';
        return static_cast<int>(kOk);
    });
}

int cmd_simulate(const fs::path& config, const Overrides& ov, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig c = load_run_config(config, ov);
        const AerTree tree = build_aer_tree(c.gen);
        SimOptions opts;
        if (!c.vcd) opts.record_mask = monitor_mask(tree.netlist, tree.ports);
        const RunResult run = run_workload(tree, c.workload, c.seed, c.until_ps, opts);
        const ProtocolReport rep = check_all(run.trace, tree.netlist, tree.ports, run.state);

        ojson viol;
        viol["config"] = to_json(c);
        viol["report"] = to_json(rep, tree.netlist);
        write_file(c.outputs.resolve(c.outputs.violations), dump(viol));

        ojson metrics;
        metrics["config"] = to_json(c);
        try {
            const MetricsReport m = compute_metrics(rep.tokens, run.trace, c.energy, c.gen.num_events, &tree.ports);
            metrics["metrics"] = to_json(m);
        } catch (const Error& e) {
            metrics["metrics"] = nullptr;
            metrics["error"] = e.what();
        }
        write_file(c.outputs.resolve(c.outputs.metrics), dump(metrics));

        std::ostringstream csv;
        write_latency_csv(csv, rep.tokens);
        write_file(c.outputs.resolve(c.outputs.latency_csv), csv.str());
        if (c.vcd) write_file(c.outputs.resolve(c.outputs.vcd), export_vcd(run.trace, tree.netlist));

        const std::size_t total = rep.violations.size() + rep.timing.size();
        out << "tokens " << rep.tokens.size() << ", transitions " << run.trace.transition_count << ", violations "
            << total << '\n';
        for (const auto& [key, n] : viol["report"]["counts"].items())
            if (n.get<std::size_t>() > 0) out << "  " << key << ' ' << n.get<std::size_t>() << '\n';
        return static_cast<int>(total == 0 ? kOk : kViolations);
    });
}

int cmd_close_timing(const fs::path& config, const Overrides& ov, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig c = load_run_config(config, ov);
        const ClosureReport r = run_closure(c.gen, c.max_iterations, c.closure);
        ojson doc;
        doc["config"] = to_json(c);
        doc["closure"] = to_json(r);
        write_file(c.outputs.resolve(c.outputs.closure_report), dump(doc));
        write_file(c.outputs.resolve(c.outputs.params_patch), dump({{"gen", params_patch(r)}}));
        out << (r.converged ? "converged" : "not converged") << " after " << r.iterations << " iteration(s), buffers [";
        for (std::size_t i = 0; i < r.final_buffers.size(); ++i) out << (i ? ", " : "") << r.final_buffers[i];
        out << "]\n";
        return static_cast<int>(r.converged ? kOk : kViolations);
    });
}

int cmd_report(const fs::path& metrics, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const nlohmann::json doc = read_json_file(metrics, "metrics file");
        const nlohmann::json* m = &doc;
        if (doc.contains("metrics")) m = &doc["metrics"];
        if (!m->is_object()) throw Error("metrics file has no metrics object");
        for (const auto& [key, value] : m->items()) out << std::left << std::setw(28) << key << value.dump() << '\n';
        return static_cast<int>(kOk);
    });
}

}  // namespace aer::cli
