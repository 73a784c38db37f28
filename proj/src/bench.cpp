#include "dsp/bench.hpp"

#include <chrono>
#include <iomanip>
#include <map>
#include <sstream>

namespace dsp {

std::vector<BenchSuite> bench_suites(const std::string& which) {
    static const std::vector<BenchSuite> all = {
        {"plan", "plan.dsp", "plan", {"W=30.0", "D=28.0", "Stories=3", "CarArea=12.5"}},
        {"nqueens", "nqueens.dsp", "nqueens", {"N=8"}},
        {"ack", "ack.dsp", "ack", {"M=3", "N=3"}},
        {"tarai", "tarai.dsp", "tarai", {"X=10", "Y=5", "Z=0"}},
        {"ack_nocut", "ack_nocut.dsp", "ack_nocut", {"M=3", "N=3"}},
        {"tarai_nocut", "tarai_nocut.dsp", "tarai_nocut", {"X=10", "Y=5", "Z=0"}},
    };
    if (which == "all") return all;
    for (const auto& s : all)
        if (s.name == which) return {s};
    return {};
}

std::vector<Value> parse_inputs(const ModuleDecl& decl,
                                const std::vector<std::string>& pairs) {
    std::map<std::string, Value> by_name;
    for (const auto& p : pairs) {
        auto eq = p.find('=');
        if (eq == std::string::npos)
            throw ParseError("input must be name=value, got '" + p + "'", {});
        std::string name = p.substr(0, eq);
        if (by_name.count(name))
            throw ParseError("input '" + name + "' given twice", {});
        by_name.emplace(name, evaluate_literal(p.substr(eq + 1)));
    }
    std::vector<Value> ins;
    ins.reserve(decl.inputs.size());
    for (const auto& param : decl.inputs) {
        auto it = by_name.find(param.name);
        if (it == by_name.end())
            throw ParseError("missing input '" + param.name + "' for module '" +
                                 decl.name + "'",
                             {});
        ins.push_back(it->second);
        by_name.erase(it);
    }
    if (!by_name.empty())
        throw ParseError("unknown input '" + by_name.begin()->first + "' for module '" +
                             decl.name + "'",
                         {});
    return ins;
}

namespace {

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

}  // namespace

std::vector<BenchRow> run_bench(const std::vector<BenchSuite>& suites,
                                const std::string& corpus_dir, int trials,
                                std::vector<std::string>& errors) {
    std::vector<BenchRow> rows;
    for (const auto& suite : suites) {
        std::string path = corpus_dir + "/" + suite.file;
        CompiledFile cf = compile_path(path);
        if (!cf.ok) {
            for (const auto& d : cf.diags)
                if (d.severity == Severity::Error)
                    errors.push_back(render(d, cf.filename));
            continue;
        }
        const ScheduledModule* sm = cf.find_scheduled(suite.module);
        if (!sm) {
            errors.push_back(path + ": no module named '" + suite.module + "'");
            continue;
        }
        std::vector<Value> ins;
        try {
            ins = parse_inputs(sm->analyzed.decl, suite.inputs);
        } catch (const CompileError& e) {
            errors.push_back(suite.name + ": " + e.what());
            continue;
        }

        BenchRow vm_row{suite.name, "vm", 0, 0.0, {}};
        double total = 0.0;
        for (int t = 0; t < trials; ++t) {
            rt::Vm vm;
            double t0 = now_ms();
            std::size_t n =
                drain_vm(cf, suite.module, ins, [](const Solution&) { return true; }, vm);
            total += now_ms() - t0;
            vm_row.solutions = n;
            vm_row.stats = vm.stats();
        }
        vm_row.mean_ms = total / trials;
        rows.push_back(vm_row);

        BenchRow or_row{suite.name, "oracle", 0, 0.0, {}};
        total = 0.0;
        run_with_big_stack([&] {
            for (int t = 0; t < trials; ++t) {
                double t0 = now_ms();
                std::size_t n = drain_oracle(cf, suite.module, ins,
                                             [](const Solution&) { return true; });
                total += now_ms() - t0;
                or_row.solutions = n;
            }
        });
        or_row.mean_ms = total / trials;
        rows.push_back(or_row);

        if (vm_row.solutions != or_row.solutions)
            errors.push_back(suite.name + ": engines disagree on solution count (vm " +
                             std::to_string(vm_row.solutions) + ", oracle " +
                             std::to_string(or_row.solutions) + ")");
    }
    return rows;
}

std::string format_bench_table(const std::vector<BenchRow>& rows) {
    std::ostringstream out;
    out << std::left << std::setw(14) << "program" << std::setw(8) << "engine"
        << std::right << std::setw(10) << "solutions" << std::setw(12) << "mean ms"
        << std::setw(12) << "cp pushed" << std::setw(10) << "cp peak" << std::setw(12)
        << "steps" << "\n";
    for (const auto& r : rows) {
        out << std::left << std::setw(14) << r.program << std::setw(8) << r.engine
            << std::right << std::setw(10) << r.solutions << std::setw(12) << std::fixed
            << std::setprecision(3) << r.mean_ms;
        if (r.engine == "vm") {
            out << std::setw(12) << r.stats.cp_pushed << std::setw(10) << r.stats.cp_peak
                << std::setw(12) << r.stats.exec_steps;
        } else {
            out << std::setw(12) << "-" << std::setw(10) << "-" << std::setw(12) << "-";
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace dsp
