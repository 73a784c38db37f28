#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "dsp/scheduler.hpp"
#include "dsp/value.hpp"

namespace dsp {

// Reference interpreter: recursive-descent nondeterministic evaluation
// over the scheduled statement lists. No continuation units, no choice
// points, no cells; disagreement with the engine means a real bug on one
// side.
struct OracleProgram {
    std::map<std::string, const ScheduledModule*> modules;
};

OracleProgram oracle_program(const std::vector<ScheduledModule>& mods);

// Returns false from the sink to stop enumeration early.
using SolutionSink = std::function<bool(const Solution&)>;

void oracle_solve(const OracleProgram& prog, const std::string& module,
                  const std::vector<Value>& ins, const SolutionSink& sink);

// Success continuations nest with the call tree, so deterministic
// programs that avoid dcall can need a very deep native stack; runs fn on
// a worker thread with `stack_bytes` of stack.
void run_with_big_stack(const std::function<void()>& fn,
                        std::size_t stack_bytes = std::size_t{1} << 30);

}  // namespace dsp
