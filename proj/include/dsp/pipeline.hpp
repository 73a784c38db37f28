#pragma once

#include <string>
#include <vector>

#include "dsp/lowering.hpp"
#include "dsp/oracle.hpp"
#include "dsp/parser.hpp"

namespace dsp {

// Everything the front half of the toolchain produces for one file.
struct CompiledFile {
    std::string filename;
    std::vector<ModuleDecl> decls;
    Registry registry;
    std::vector<ScheduledModule> scheduled;
    LinkedProgram program;
    std::vector<Diagnostic> diags;
    bool ok = false;

    const ScheduledModule* find_scheduled(const std::string& name) const {
        for (const auto& sm : scheduled)
            if (sm.analyzed.decl.name == name) return &sm;
        return nullptr;
    }
};

// Lex, parse, analyze, schedule, lower, and link one source text. Lex and
// parse failures land in diags; `ok` implies program is usable.
CompiledFile compile_source(const std::string& text, const std::string& filename);
CompiledFile compile_path(const std::string& path);

// Drains solutions on the engine; returns the number streamed. The sink
// may stop enumeration early by returning false.
std::size_t drain_vm(const CompiledFile& cf, const std::string& module,
                     const std::vector<Value>& ins, const SolutionSink& sink,
                     rt::Vm& vm);
std::size_t drain_oracle(const CompiledFile& cf, const std::string& module,
                         const std::vector<Value>& ins, const SolutionSink& sink);

std::string dump_schedule(const CompiledFile& cf);

}  // namespace dsp
