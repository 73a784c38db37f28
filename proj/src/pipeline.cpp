#include "dsp/pipeline.hpp"

#include <fstream>
#include <sstream>

namespace dsp {

CompiledFile compile_source(const std::string& text, const std::string& filename) {
    CompiledFile cf;
    cf.filename = filename;
    try {
        cf.decls = parse_source(text);
    } catch (const CompileError& e) {
        cf.diags.push_back({Severity::Error, e.pos, e.what()});
        return cf;
    }

    cf.registry = build_registry(cf.decls, cf.diags);
    bool all_ok = !has_errors(cf.diags);
    for (const auto& decl : cf.decls) {
        AnalyzeResult res = analyze(decl, cf.registry);
        for (auto& d : res.diags) cf.diags.push_back(std::move(d));
        if (res.ok() && all_ok) {
            cf.scheduled.push_back(schedule(std::move(*res.module)));
        } else {
            all_ok = false;
        }
    }
    if (!all_ok || has_errors(cf.diags)) return cf;

    std::vector<ModuleGraph> graphs;
    graphs.reserve(cf.scheduled.size());
    for (const auto& sm : cf.scheduled) graphs.push_back(lower(sm));
    try {
        cf.program = link(std::move(graphs));
    } catch (const LinkError& e) {
        cf.diags.push_back({Severity::Error, {}, e.what()});
        return cf;
    }
    cf.ok = true;
    return cf;
}

CompiledFile compile_path(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        CompiledFile cf;
        cf.filename = path;
        cf.diags.push_back({Severity::Error, {}, "cannot open file '" + path + "'"});
        return cf;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return compile_source(buf.str(), path);
}

std::size_t drain_vm(const CompiledFile& cf, const std::string& module,
                     const std::vector<Value>& ins, const SolutionSink& sink,
                     rt::Vm& vm) {
    const ModuleGraph* g = cf.program.find(module);
    if (!g) throw LinkError({module});

    std::vector<rt::VarCell> storage(g->n_outputs);
    std::vector<rt::CellPtr> outs;
    outs.reserve(g->n_outputs);
    for (auto& c : storage) outs.push_back(&c);

    rt::ExecPtr goal = make_module_call(cf.program, module, ins, outs, rt::success());
    std::size_t count = 0;
    for (bool found = vm.call(std::move(goal)); found; found = vm.redo()) {
        Solution sol;
        for (std::size_t i = 0; i < g->n_outputs; ++i)
            sol.outputs.emplace_back(g->vars[g->n_inputs + i].name, storage[i].peek());
        sol.violations = vm.take_violations();
        ++count;
        if (!sink(sol)) break;
    }
    return count;
}

std::size_t drain_oracle(const CompiledFile& cf, const std::string& module,
                         const std::vector<Value>& ins, const SolutionSink& sink) {
    OracleProgram prog = oracle_program(cf.scheduled);
    std::size_t count = 0;
    oracle_solve(prog, module, ins, [&](const Solution& sol) {
        ++count;
        return sink(sol);
    });
    return count;
}

std::string dump_schedule(const CompiledFile& cf) {
    std::ostringstream out;
    for (const auto& sm : cf.scheduled) {
        out << "module " << sm.analyzed.decl.name << "\n";
        for (std::size_t m = 0; m < sm.methods.size(); ++m) {
            const auto& sched = sm.methods[m];
            const auto& classes = sm.analyzed.methods[m].classes;
            out << "  method " << (m + 1) << ":\n";
            out << "    order:";
            for (int s : sched.order)
                out << " " << s << ":" << stmt_class_name(classes[s]);
            out << "\n    units:";
            for (const auto& u : sched.units) {
                out << " [";
                for (std::size_t i = 0; i < u.stmts.size(); ++i) {
                    if (i) out << " ";
                    out << u.stmts[i];
                }
                out << "]";
            }
            out << "\n";
        }
    }
    return out.str();
}

}  // namespace dsp
