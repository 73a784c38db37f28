#pragma once

#include <string>
#include <vector>

#include "dsp/bench.hpp"
#include "dsp/emitter.hpp"
#include "dsp/pipeline.hpp"

namespace testutil {

// Tests run with the repository root as working directory (set by ctest).
inline dsp::CompiledFile load_corpus(const std::string& file) {
    dsp::CompiledFile cf = dsp::compile_path("corpus/" + file);
    if (!cf.ok) {
        std::string msg = "failed to compile corpus/" + file;
        for (const auto& d : cf.diags) msg += "\n  " + dsp::render(d, cf.filename);
        throw std::runtime_error(msg);
    }
    return cf;
}

inline dsp::CompiledFile compile(const std::string& text) {
    return dsp::compile_source(text, "<test>");
}

inline std::vector<dsp::Solution> vm_solutions(const dsp::CompiledFile& cf,
                                               const std::string& module,
                                               const std::vector<dsp::Value>& ins,
                                               dsp::rt::Vm* vm_out = nullptr) {
    dsp::rt::Vm vm;
    std::vector<dsp::Solution> out;
    dsp::drain_vm(cf, module, ins, [&](const dsp::Solution& s) {
        out.push_back(s);
        return true;
    }, vm);
    if (vm_out) *vm_out = vm;
    return out;
}

inline std::vector<dsp::Solution> oracle_solutions(const dsp::CompiledFile& cf,
                                                   const std::string& module,
                                                   const std::vector<dsp::Value>& ins) {
    std::vector<dsp::Solution> out;
    dsp::run_with_big_stack([&] {
        dsp::drain_oracle(cf, module, ins, [&](const dsp::Solution& s) {
            out.push_back(s);
            return true;
        });
    });
    return out;
}

inline bool sequences_equal(const std::vector<dsp::Solution>& a,
                            const std::vector<dsp::Solution>& b, double rel = 1e-9) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!dsp::solutions_equal(a[i], b[i], rel)) return false;
    return true;
}

inline std::string diag_text(const dsp::CompiledFile& cf) {
    std::string out;
    for (const auto& d : cf.diags) out += dsp::render(d, cf.filename) + "\n";
    return out;
}

inline bool has_error_containing(const dsp::CompiledFile& cf, const std::string& what) {
    for (const auto& d : cf.diags)
        if (d.severity == dsp::Severity::Error &&
            d.message.find(what) != std::string::npos)
            return true;
    return false;
}

inline bool has_warning_containing(const dsp::CompiledFile& cf, const std::string& what) {
    for (const auto& d : cf.diags)
        if (d.severity == dsp::Severity::Warning &&
            d.message.find(what) != std::string::npos)
            return true;
    return false;
}

}  // namespace testutil
