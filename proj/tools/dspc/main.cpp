// dspc: compiler, engines, and benchmark harness for the DSP language.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dsp/bench.hpp"
#include "dsp/emitter.hpp"
#include "dsp/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoSolution = 1;
constexpr int kExitError = 2;

void print_diags(const dsp::CompiledFile& cf) {
    for (const auto& d : cf.diags) std::cerr << dsp::render(d, cf.filename) << "\n";
}

int cmd_check(const std::string& file, bool dump_sched, bool dump_graph_flag) {
    dsp::CompiledFile cf = dsp::compile_path(file);
    print_diags(cf);
    if (!cf.ok) return kExitError;
    if (dump_sched) std::cout << dsp::dump_schedule(cf);
    if (dump_graph_flag) std::cout << dsp::dump_graph(cf.program);
    return kExitOk;
}

struct RunOptions {
    std::string file;
    std::string module;
    std::vector<std::string> inputs;
    std::string engine = "vm";
    std::string format = "text";
    bool all = false;
    bool count = false;
    long limit = -1;
    bool stats = false;
    bool check_overwrite = false;
};

int cmd_run(const RunOptions& opt) {
    dsp::CompiledFile cf = dsp::compile_path(opt.file);
    print_diags(cf);
    if (!cf.ok) return kExitError;

    std::string module = opt.module;
    if (module.empty()) {
        if (cf.scheduled.size() != 1) {
            std::cerr << opt.file << ": several modules here; pick one with -m\n";
            return kExitError;
        }
        module = cf.scheduled.front().analyzed.decl.name;
    }
    const dsp::ScheduledModule* sm = cf.find_scheduled(module);
    if (!sm) {
        std::cerr << opt.file << ": no module named '" << module << "'\n";
        return kExitError;
    }

    try {
        std::vector<dsp::Value> ins = dsp::parse_inputs(sm->analyzed.decl, opt.inputs);
        std::size_t shown = 0;
        bool any = false;
        auto sink = [&](const dsp::Solution& sol) {
            any = true;
            ++shown;
            if (!opt.count)
                std::cout << (opt.format == "jsonl" ? dsp::to_jsonl(sol)
                                                    : dsp::to_text(sol))
                          << "\n";
            return opt.limit < 0 || shown < static_cast<std::size_t>(opt.limit);
        };

        std::size_t total = 0;
        if (opt.engine == "oracle") {
            dsp::run_with_big_stack(
                [&] { total = dsp::drain_oracle(cf, module, ins, sink); });
            if (opt.stats) std::cerr << "stats: not tracked by the oracle engine\n";
        } else {
            dsp::rt::Vm vm;
            vm.enable_overwrite_check(opt.check_overwrite);
            total = dsp::drain_vm(cf, module, ins, sink, vm);
            if (opt.stats) {
                const auto& st = vm.stats();
                std::cerr << "stats: steps=" << st.exec_steps
                          << " cp_pushed=" << st.cp_pushed << " cp_peak=" << st.cp_peak
                          << " dcall_commits=" << st.dcall_commits << "\n";
            }
        }
        if (opt.count) std::cout << total << "\n";
        return any ? kExitOk : kExitNoSolution;
    } catch (const dsp::CompileError& e) {
        std::cerr << opt.file << ":" << dsp::to_string(e.pos) << ": error: " << e.what()
                  << "\n";
        return kExitError;
    } catch (const dsp::RuntimeFault& e) {
        std::cerr << "runtime fault: " << e.what() << "\n";
        return kExitError;
    }
}

int cmd_emit(const std::string& file, const std::string& outdir,
             const std::string& driver) {
    dsp::CompiledFile cf = dsp::compile_path(file);
    print_diags(cf);
    if (!cf.ok) return kExitError;
    try {
        dsp::EmitResult res = dsp::emit_program(cf, driver);
        std::filesystem::create_directories(outdir);
        auto write = [&](const std::string& name, const std::string& content) {
            std::ofstream out(outdir + "/" + name, std::ios::binary);
            out << content;
            std::cout << outdir << "/" << name << "\n";
        };
        for (const auto& f : res.files) write(f.name, f.content);
        write("manifest.json", res.manifest);
        return kExitOk;
    } catch (const dsp::CompileError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
}

int cmd_bench(const std::string& suite, const std::string& corpus, int trials) {
    std::vector<dsp::BenchSuite> suites = dsp::bench_suites(suite);
    if (suites.empty()) {
        std::cerr << "unknown suite '" << suite
                  << "' (plan, nqueens, ack, tarai, ack_nocut, tarai_nocut, all)\n";
        return kExitError;
    }
    std::vector<std::string> errors;
    std::vector<dsp::BenchRow> rows = dsp::run_bench(suites, corpus, trials, errors);
    std::cout << format_bench_table(rows);
    for (const auto& e : errors) std::cerr << "error: " << e << "\n";
    return errors.empty() ? kExitOk : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dspc: DSP language toolchain"};
    app.require_subcommand(1);

    // Reserved; sizing hints are taken automatically.
    (void)std::getenv("DSPC_HEAP_HINT");

    std::string file, outdir, driver, suite = "all", corpus = "corpus";
    bool dump_sched = false, dump_graph_flag = false;
    int trials = 10;
    RunOptions run;

    auto* check = app.add_subcommand("check", "Parse and analyze a file");
    check->add_option("file", file, "DSP source file")->required();
    check->add_flag("--dump-schedule", dump_sched,
                    "Print per-method statement order and units");
    check->add_flag("--dump-graph", dump_graph_flag, "Print compiled graph nodes");

    auto* runc = app.add_subcommand("run", "Run a module and stream its solutions");
    runc->add_option("file", run.file, "DSP source file")->required();
    runc->add_option("-m,--module", run.module, "Module to run");
    runc->add_option("-i,--input", run.inputs, "Module input as name=value");
    runc->add_option("--engine", run.engine, "Execution engine: vm or oracle")
        ->check(CLI::IsMember({"vm", "oracle"}));
    runc->add_option("--format", run.format, "Output format: text or jsonl")
        ->check(CLI::IsMember({"text", "jsonl"}));
    auto* all_flag = runc->add_flag("--all", run.all, "Drain every solution (default)");
    auto* limit_opt = runc->add_option("--limit", run.limit, "Stop after N solutions");
    auto* count_flag =
        runc->add_flag("--count", run.count, "Print only the number of solutions");
    all_flag->excludes(limit_opt)->excludes(count_flag);
    limit_opt->excludes(count_flag);
    runc->add_flag("--stats", run.stats, "Report engine counters on stderr");
    runc->add_flag("--check-overwrite", run.check_overwrite,
                   "Fault on reads of values written on abandoned paths");

    auto* emit = app.add_subcommand("emit", "Generate C++ sources for each module");
    emit->add_option("file", file, "DSP source file")->required();
    emit->add_option("-o,--out", outdir, "Output directory")->required();
    emit->add_option("--driver", driver, "Also emit a main.cpp draining this module");

    auto* bench =
        app.add_subcommand("bench", "Time the benchmark corpus on both engines");
    bench->add_option("suite", suite,
                      "plan, nqueens, ack, tarai, ack_nocut, tarai_nocut, or all");
    bench->add_option("--trials", trials, "Trials per program")
        ->check(CLI::PositiveNumber);
    bench->add_option("--corpus", corpus, "Corpus directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) return cmd_check(file, dump_sched, dump_graph_flag);
        if (runc->parsed()) return cmd_run(run);
        if (emit->parsed()) return cmd_emit(file, outdir, driver);
        if (bench->parsed()) return cmd_bench(suite, corpus, trials);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
