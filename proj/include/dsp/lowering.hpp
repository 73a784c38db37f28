#pragma once

#include <map>
#include <string>
#include <vector>

#include "dsp/runtime.hpp"
#include "dsp/scheduler.hpp"

namespace dsp {

// Compiled expression: the AST shape with variable references resolved to
// frame slots.
struct LExpr {
    Expr::Kind kind{};
    std::int64_t int_val = 0;
    double real_val = 0.0;
    bool bool_val = false;
    int slot = -1;
    BinOp op{};
    BuiltinFn fn{};
    std::vector<LExpr> args;
};

struct CalleeRef {
    enum class Kind { User, BuiltinFor, BuiltinSelect };
    Kind kind = Kind::User;
    std::string name;
    int index = -1;  // into LinkedProgram::modules, set by link()
};

// One deterministic statement inside a continuation unit.
struct LStep {
    enum class Kind { Bind, Guard, Verify, Dcall, Find };
    Kind kind{};
    // Bind / Find target
    int out_slot = -1;
    DType out_dtype = DType::Any;
    // Bind rhs, or the Guard/Verify condition
    LExpr expr;
    // Verify reporting
    std::string cond_text;
    // Dcall / Find
    CalleeRef callee;
    std::vector<LExpr> ins;
    std::vector<int> out_slots;  // Dcall outputs
};

// How a unit hands over control after its deterministic prefix.
struct LTail {
    enum class Kind { Return, For, Select, Call };
    Kind kind = Kind::Return;
    std::vector<LExpr> args;  // For: 3 bounds; Select: 1 list; Call: inputs
    int out_slot = -1;
    DType out_dtype = DType::Any;
    CalleeRef callee;
    std::vector<int> out_slots;
};

// One graph node per continuation unit.
struct UnitNode {
    std::vector<LStep> steps;
    LTail tail;
};

struct MethodGraph {
    std::vector<UnitNode> units;
    std::string method_id;  // "<module>.<index>", 1-based
    // Bound-variable listing for verify snapshots: inputs, outputs, then
    // this method's locals in source definition order.
    std::vector<std::pair<std::string, int>> snapshot_slots;
};

struct VarInfo {
    std::string name;
    DType dtype = DType::Any;
};

// Compiled module: one frame layout (inputs, outputs, then per-method
// locals) and one node list per method.
struct ModuleGraph {
    std::string name;
    std::vector<VarInfo> vars;
    std::size_t n_inputs = 0;
    std::size_t n_outputs = 0;
    std::vector<MethodGraph> methods;
};

struct LinkedProgram {
    std::vector<ModuleGraph> modules;
    std::map<std::string, int> index;

    const ModuleGraph* find(const std::string& name) const {
        auto it = index.find(name);
        return it == index.end() ? nullptr : &modules[it->second];
    }
};

class LinkError : public std::runtime_error {
public:
    std::vector<std::string> missing;
    explicit LinkError(std::vector<std::string> names);
};

ModuleGraph lower(const ScheduledModule& sm);

// Binds call sites to callee graphs; builtin generators resolve to the
// runtime primitives. Throws LinkError listing every unresolved name.
LinkedProgram link(std::vector<ModuleGraph> graphs);

// Activation of a module (or builtin) as a goal: evaluates nothing itself;
// exec() builds the frame and enters method 1 with methods 2..n stacked as
// alternatives.
rt::ExecPtr make_module_call(const LinkedProgram& prog, const std::string& module,
                             std::vector<Value> ins, std::vector<rt::CellPtr> outs,
                             rt::ExecPtr cont);
rt::ExecPtr make_module_call(const LinkedProgram& prog, const CalleeRef& callee,
                             std::vector<Value> ins, std::vector<rt::CellPtr> outs,
                             rt::ExecPtr cont);

std::string dump_graph(const LinkedProgram& prog);

}  // namespace dsp
