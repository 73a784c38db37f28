#include "dsp/lowering.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace dsp {

LinkError::LinkError(std::vector<std::string> names)
    : std::runtime_error([&names] {
          std::string msg = "unresolved module(s):";
          for (const auto& n : names) msg += " " + n;
          return msg;
      }()),
      missing(std::move(names)) {}

namespace {

// ---------------------------------------------------------------------
// Compilation: AST -> slot-resolved graph

class ModuleLowerer {
public:
    explicit ModuleLowerer(const ScheduledModule& sm) : sm_(sm) {}

    ModuleGraph run() {
        const ModuleDecl& decl = sm_.analyzed.decl;
        graph_.name = decl.name;
        graph_.n_inputs = decl.inputs.size();
        graph_.n_outputs = decl.outputs.size();
        for (const auto& p : decl.inputs) graph_.vars.push_back({p.name, p.dtype});
        for (const auto& p : decl.outputs) graph_.vars.push_back({p.name, p.dtype});

        for (std::size_t m = 0; m < decl.methods.size(); ++m)
            graph_.methods.push_back(lower_method(static_cast<int>(m)));
        return std::move(graph_);
    }

private:
    const ScheduledModule& sm_;
    ModuleGraph graph_;
    std::map<std::string, int> slots_;  // current method's view

    int slot_of(const std::string& name, Position pos) const {
        auto it = slots_.find(name);
        if (it == slots_.end())
            throw CompileError("internal: no slot for variable '" + name + "'", pos);
        return it->second;
    }

    MethodGraph lower_method(int m) {
        const MethodDecl& method = sm_.analyzed.decl.methods[m];
        const MethodAnalysis& analysis = sm_.analyzed.methods[m];
        const ScheduledMethod& sched = sm_.methods[m];

        // Inputs and outputs share module-level slots; this method's locals
        // get fresh ones.
        slots_.clear();
        for (std::size_t i = 0; i < graph_.n_inputs + graph_.n_outputs; ++i)
            slots_[graph_.vars[i].name] = static_cast<int>(i);
        for (const auto& name : analysis.snapshot_order) {
            if (slots_.count(name)) continue;
            const SymbolInfo& info = analysis.symbols.at(name);
            slots_[name] = static_cast<int>(graph_.vars.size());
            graph_.vars.push_back({name, info.dtype});
        }

        MethodGraph mg;
        mg.method_id = graph_.name + "." + std::to_string(m + 1);
        for (const auto& name : analysis.snapshot_order)
            mg.snapshot_slots.emplace_back(name, slots_.at(name));

        for (const auto& cu : sched.units) {
            UnitNode node;
            for (int s : cu.stmts) {
                if (cu.trailing_generator && s == *cu.trailing_generator) {
                    node.tail = lower_tail(method.statements[s]);
                } else {
                    node.steps.push_back(lower_step(method.statements[s]));
                }
            }
            mg.units.push_back(std::move(node));
        }
        if (mg.units.empty()) mg.units.push_back(UnitNode{});  // empty method body
        return mg;
    }

    LExpr compile(const Expr& e) const {
        LExpr out;
        out.kind = e.kind;
        switch (e.kind) {
            case Expr::Kind::IntLit: out.int_val = e.int_val; break;
            case Expr::Kind::RealLit: out.real_val = e.real_val; break;
            case Expr::Kind::BoolLit: out.bool_val = e.bool_val; break;
            case Expr::Kind::Var: out.slot = slot_of(e.name, e.pos); break;
            case Expr::Kind::Unary:
            case Expr::Kind::Binary:
            case Expr::Kind::Fn:
            case Expr::Kind::ListLit:
                out.op = e.op;
                out.fn = e.fn;
                for (const auto& a : e.args) out.args.push_back(compile(*a));
                break;
        }
        return out;
    }

    std::vector<LExpr> compile_all(const std::vector<ExprPtr>& es) const {
        std::vector<LExpr> out;
        out.reserve(es.size());
        for (const auto& e : es) out.push_back(compile(*e));
        return out;
    }

    DType slot_dtype(int slot) const { return graph_.vars[slot].dtype; }

    LStep lower_step(const Stmt& s) {
        LStep step;
        switch (s.kind) {
            case Stmt::Kind::Bind: {
                step.kind = LStep::Kind::Bind;
                step.out_slot = slot_of(s.target, s.pos);
                step.out_dtype = slot_dtype(step.out_slot);
                step.expr = compile(*s.expr);
                break;
            }
            case Stmt::Kind::When:
            case Stmt::Kind::Test:
                step.kind = LStep::Kind::Guard;
                step.expr = compile(*s.expr);
                break;
            case Stmt::Kind::Verify:
                step.kind = LStep::Kind::Verify;
                step.expr = compile(*s.expr);
                step.cond_text = expr_to_string(*s.expr);
                break;
            case Stmt::Kind::Dcall: {
                step.kind = LStep::Kind::Dcall;
                step.callee.name = s.callee;
                step.ins = compile_all(s.call_ins);
                for (const auto& name : s.call_outs)
                    step.out_slots.push_back(slot_of(name, s.pos));
                break;
            }
            case Stmt::Kind::Find: {
                step.kind = LStep::Kind::Find;
                step.callee.name = s.callee;
                step.ins = compile_all(s.call_ins);
                step.out_slot = slot_of(s.call_outs[0], s.pos);
                step.out_dtype = DType::List;
                break;
            }
            case Stmt::Kind::Call:
                throw CompileError("internal: call inside a deterministic prefix", s.pos);
        }
        return step;
    }

    LTail lower_tail(const Stmt& s) {
        LTail tail;
        switch (s.kind) {
            case Stmt::Kind::Bind:
                tail.out_slot = slot_of(s.target, s.pos);
                tail.out_dtype = slot_dtype(tail.out_slot);
                tail.args = compile_all(s.gen_args);
                tail.kind = s.rhs_kind == Stmt::BindRhs::For ? LTail::Kind::For
                                                             : LTail::Kind::Select;
                break;
            case Stmt::Kind::Call: {
                tail.kind = LTail::Kind::Call;
                tail.callee.name = s.callee;
                tail.args = compile_all(s.call_ins);
                for (const auto& name : s.call_outs)
                    tail.out_slots.push_back(slot_of(name, s.pos));
                break;
            }
            default:
                throw CompileError("internal: statement cannot trail a unit", s.pos);
        }
        return tail;
    }
};

// ---------------------------------------------------------------------
// Execution: activations over the linked graph

// Activation record: one slot of storage per variable. Output slots point
// into the caller's storage; the continuation chain keeps the caller's
// frame alive for as long as anything can still write through them.
struct Frame {
    const LinkedProgram* prog;
    const ModuleGraph* graph;
    std::vector<rt::VarCell> own;
    std::vector<rt::CellPtr> cells;
    rt::ExecPtr cont;
};
using FramePtr = std::shared_ptr<Frame>;

Value eval_lexpr(const LExpr& e, rt::Vm& vm, const Frame& f) {
    switch (e.kind) {
        case Expr::Kind::IntLit: return Value::integer(e.int_val);
        case Expr::Kind::RealLit: return Value::real(e.real_val);
        case Expr::Kind::BoolLit: return Value::boolean(e.bool_val);
        case Expr::Kind::Var: return vm.read(*f.cells[e.slot]);
        case Expr::Kind::ListLit: {
            Value::List elems;
            elems.reserve(e.args.size());
            for (const auto& a : e.args) elems.push_back(eval_lexpr(a, vm, f));
            return Value::list(std::move(elems));
        }
        case Expr::Kind::Unary: return ops::neg(eval_lexpr(e.args[0], vm, f));
        case Expr::Kind::Binary: {
            Value l = eval_lexpr(e.args[0], vm, f);
            Value r = eval_lexpr(e.args[1], vm, f);
            if (is_comparison(e.op)) return ops::compare(e.op, l, r);
            switch (e.op) {
                case BinOp::Add: return ops::add(l, r);
                case BinOp::Sub: return ops::sub(l, r);
                case BinOp::Mul: return ops::mul(l, r);
                case BinOp::Div: return ops::div(l, r);
                case BinOp::Pow: return ops::pow(l, r);
                default: break;
            }
            throw RuntimeFault(FaultKind::Internal, "bad binary op");
        }
        case Expr::Kind::Fn: {
            switch (e.fn) {
                case BuiltinFn::Sqrt: return ops::fn_sqrt(eval_lexpr(e.args[0], vm, f));
                case BuiltinFn::Abs: return ops::fn_abs(eval_lexpr(e.args[0], vm, f));
                case BuiltinFn::Min:
                    return ops::fn_min(eval_lexpr(e.args[0], vm, f),
                                       eval_lexpr(e.args[1], vm, f));
                case BuiltinFn::Max:
                    return ops::fn_max(eval_lexpr(e.args[0], vm, f),
                                       eval_lexpr(e.args[1], vm, f));
            }
            throw RuntimeFault(FaultKind::Internal, "bad builtin fn");
        }
    }
    throw RuntimeFault(FaultKind::Internal, "bad expression kind");
}

std::vector<Value> eval_inputs(const std::vector<LExpr>& ins, rt::Vm& vm,
                               const Frame& f) {
    std::vector<Value> vals;
    vals.reserve(ins.size());
    for (const auto& e : ins) vals.push_back(eval_lexpr(e, vm, f));
    return vals;
}

rt::ExecPtr enter_callee(const LinkedProgram& prog, const CalleeRef& callee,
                         std::vector<Value> ins, std::vector<rt::CellPtr> outs,
                         rt::ExecPtr cont);

struct UnitRun final : rt::Executable, std::enable_shared_from_this<UnitRun> {
    FramePtr f;
    int method;
    int unit;
    std::size_t step;

    UnitRun(FramePtr fr, int m, int u, std::size_t s)
        : f(std::move(fr)), method(m), unit(u), step(s) {}

    rt::ExecPtr next_unit_node() const {
        const auto& units = f->graph->methods[method].units;
        if (unit + 1 < static_cast<int>(units.size()))
            return std::make_shared<UnitRun>(f, method, unit + 1, 0);
        return f->cont;
    }

    VerifyViolation make_violation(const LStep& st, rt::Vm&) const {
        VerifyViolation v;
        v.condition = st.cond_text;
        v.method = f->graph->methods[method].method_id;
        for (const auto& [name, slot] : f->graph->methods[method].snapshot_slots)
            if (f->cells[slot]->bound()) v.bindings.emplace_back(name, f->cells[slot]->peek());
        return v;
    }

    rt::ExecPtr exec(rt::Vm& vm) override {
        const UnitNode& node = f->graph->methods[method].units[unit];
        for (std::size_t i = step; i < node.steps.size(); ++i) {
            const LStep& st = node.steps[i];
            switch (st.kind) {
                case LStep::Kind::Bind:
                    vm.write(f->cells[st.out_slot],
                             ops::coerce(eval_lexpr(st.expr, vm, *f), st.out_dtype));
                    break;
                case LStep::Kind::Guard:
                    if (!ops::truth(eval_lexpr(st.expr, vm, *f))) return rt::failure();
                    break;
                case LStep::Kind::Verify:
                    if (!ops::truth(eval_lexpr(st.expr, vm, *f)))
                        vm.log_violation(make_violation(st, vm));
                    break;
                case LStep::Kind::Find: {
                    std::vector<Value> ins = eval_inputs(st.ins, vm, *f);
                    Value collected = run_find(vm, st, std::move(ins));
                    vm.write(f->cells[st.out_slot], std::move(collected));
                    break;
                }
                case LStep::Kind::Dcall: {
                    std::vector<Value> ins = eval_inputs(st.ins, vm, *f);
                    std::vector<rt::CellPtr> outs;
                    outs.reserve(st.out_slots.size());
                    for (int slot : st.out_slots) outs.push_back(f->cells[slot]);
                    rt::ExecPtr resume = std::make_shared<UnitRun>(f, method, unit, i + 1);
                    rt::ExecPtr commit = rt::make_commit(vm.depth(), std::move(resume));
                    return enter_callee(*f->prog, st.callee, std::move(ins),
                                        std::move(outs), std::move(commit));
                }
            }
        }
        return run_tail(vm, node.tail);
    }

    Value run_find(rt::Vm& vm, const LStep& st, std::vector<Value> ins) const {
        std::size_t n_outs = 1;
        if (st.callee.kind == CalleeRef::Kind::User)
            n_outs = f->prog->modules[st.callee.index].n_outputs;
        const LinkedProgram& prog = *f->prog;
        const CalleeRef& callee = st.callee;
        return rt::find_all(vm, n_outs,
                            [&](const std::vector<rt::CellPtr>& outs, rt::ExecPtr k) {
                                return enter_callee(prog, callee, ins, outs, std::move(k));
                            });
    }

    rt::ExecPtr run_tail(rt::Vm& vm, const LTail& tail) {
        switch (tail.kind) {
            case LTail::Kind::Return:
                return f->cont;
            case LTail::Kind::For: {
                Value b = ops::coerce(eval_lexpr(tail.args[0], vm, *f), tail.out_dtype);
                Value e = ops::coerce(eval_lexpr(tail.args[1], vm, *f), tail.out_dtype);
                Value s = ops::coerce(eval_lexpr(tail.args[2], vm, *f), tail.out_dtype);
                return rt::make_for(b, e, s, f->cells[tail.out_slot], next_unit_node());
            }
            case LTail::Kind::Select: {
                Value list = eval_lexpr(tail.args[0], vm, *f);
                return rt::make_select(list, f->cells[tail.out_slot], next_unit_node(),
                                       tail.out_dtype);
            }
            case LTail::Kind::Call: {
                std::vector<Value> ins = eval_inputs(tail.args, vm, *f);
                std::vector<rt::CellPtr> outs;
                outs.reserve(tail.out_slots.size());
                for (int slot : tail.out_slots) outs.push_back(f->cells[slot]);
                return enter_callee(*f->prog, tail.callee, std::move(ins), std::move(outs),
                                    next_unit_node());
            }
        }
        throw RuntimeFault(FaultKind::Internal, "bad unit tail");
    }
};

// Alternative methods of an activation, tried in source order. Each
// non-final method leaves one choice point pointing at the next.
struct MethodAlt final : rt::Executable {
    FramePtr f;
    int method;

    MethodAlt(FramePtr fr, int m) : f(std::move(fr)), method(m) {}

    rt::ExecPtr exec(rt::Vm& vm) override {
        if (method + 1 < static_cast<int>(f->graph->methods.size()))
            vm.push_choice(std::make_shared<MethodAlt>(f, method + 1));
        return std::make_shared<UnitRun>(f, method, 0, 0);
    }
};

// Entry goal for one module activation.
struct ModuleCall final : rt::Executable {
    const LinkedProgram* prog;
    int module;
    std::vector<Value> ins;
    std::vector<rt::CellPtr> outs;
    rt::ExecPtr cont;

    ModuleCall(const LinkedProgram* p, int m, std::vector<Value> i,
               std::vector<rt::CellPtr> o, rt::ExecPtr k)
        : prog(p), module(m), ins(std::move(i)), outs(std::move(o)), cont(std::move(k)) {}

    rt::ExecPtr exec(rt::Vm& vm) override {
        const ModuleGraph& g = prog->modules[module];
        if (ins.size() != g.n_inputs || outs.size() != g.n_outputs)
            throw RuntimeFault(FaultKind::Internal,
                               "arity mismatch activating module '" + g.name + "'");
        auto f = std::make_shared<Frame>();
        f->prog = prog;
        f->graph = &g;
        f->cont = cont;
        f->own.resize(g.vars.size());
        f->cells.resize(g.vars.size());
        for (std::size_t i = 0; i < g.vars.size(); ++i) {
            if (i >= g.n_inputs && i < g.n_inputs + g.n_outputs) {
                f->cells[i] = outs[i - g.n_inputs];  // caller's storage
            } else {
                f->cells[i] = &f->own[i];
            }
        }
        for (std::size_t i = 0; i < ins.size(); ++i)
            vm.write(f->cells[i], ops::coerce(ins[i], g.vars[i].dtype));

        if (g.methods.size() > 1)
            vm.push_choice(std::make_shared<MethodAlt>(f, 1));
        return std::make_shared<UnitRun>(f, 0, 0, 0);
    }
};

rt::ExecPtr enter_callee(const LinkedProgram& prog, const CalleeRef& callee,
                         std::vector<Value> ins, std::vector<rt::CellPtr> outs,
                         rt::ExecPtr cont) {
    switch (callee.kind) {
        case CalleeRef::Kind::BuiltinFor: {
            if (ins.size() != 3 || outs.size() != 1)
                throw RuntimeFault(FaultKind::Internal, "for() takes 3 inputs, 1 output");
            Value b = ops::coerce(ins[0], DType::Real);
            Value e = ops::coerce(ins[1], DType::Real);
            Value s = ops::coerce(ins[2], DType::Real);
            return rt::make_for(b, e, s, outs[0], std::move(cont));
        }
        case CalleeRef::Kind::BuiltinSelect:
            if (ins.size() != 1 || outs.size() != 1)
                throw RuntimeFault(FaultKind::Internal, "select() takes 1 input, 1 output");
            return rt::make_select(ins[0], outs[0], std::move(cont));
        case CalleeRef::Kind::User:
            return std::make_shared<ModuleCall>(&prog, callee.index, std::move(ins),
                                                std::move(outs), std::move(cont));
    }
    throw RuntimeFault(FaultKind::Internal, "bad callee kind");
}

void collect_callees(LinkedProgram& prog, ModuleGraph& g,
                     std::set<std::string>& missing) {
    auto resolve = [&](CalleeRef& c) {
        auto it = prog.index.find(c.name);
        if (it != prog.index.end()) {
            c.kind = CalleeRef::Kind::User;
            c.index = it->second;
            return;
        }
        if (c.name == "for") {
            c.kind = CalleeRef::Kind::BuiltinFor;
            return;
        }
        if (c.name == "select") {
            c.kind = CalleeRef::Kind::BuiltinSelect;
            return;
        }
        missing.insert(c.name);
    };
    for (auto& m : g.methods) {
        for (auto& u : m.units) {
            for (auto& st : u.steps)
                if (st.kind == LStep::Kind::Dcall || st.kind == LStep::Kind::Find)
                    resolve(st.callee);
            if (u.tail.kind == LTail::Kind::Call) resolve(u.tail.callee);
        }
    }
}

}  // namespace

ModuleGraph lower(const ScheduledModule& sm) { return ModuleLowerer(sm).run(); }

LinkedProgram link(std::vector<ModuleGraph> graphs) {
    LinkedProgram prog;
    prog.modules = std::move(graphs);
    for (std::size_t i = 0; i < prog.modules.size(); ++i)
        prog.index[prog.modules[i].name] = static_cast<int>(i);
    std::set<std::string> missing;
    for (auto& g : prog.modules) collect_callees(prog, g, missing);
    if (!missing.empty())
        throw LinkError(std::vector<std::string>(missing.begin(), missing.end()));
    return prog;
}

rt::ExecPtr make_module_call(const LinkedProgram& prog, const std::string& module,
                             std::vector<Value> ins, std::vector<rt::CellPtr> outs,
                             rt::ExecPtr cont) {
    auto it = prog.index.find(module);
    if (it == prog.index.end()) throw LinkError({module});
    return std::make_shared<ModuleCall>(&prog, it->second, std::move(ins),
                                        std::move(outs), std::move(cont));
}

rt::ExecPtr make_module_call(const LinkedProgram& prog, const CalleeRef& callee,
                             std::vector<Value> ins, std::vector<rt::CellPtr> outs,
                             rt::ExecPtr cont) {
    return enter_callee(prog, callee, std::move(ins), std::move(outs), std::move(cont));
}

namespace {

std::string lexpr_brief(const LExpr& e);

std::string callee_brief(const CalleeRef& c) {
    switch (c.kind) {
        case CalleeRef::Kind::BuiltinFor: return "builtin:for";
        case CalleeRef::Kind::BuiltinSelect: return "builtin:select";
        case CalleeRef::Kind::User: return c.name;
    }
    return "?";
}

std::string lexpr_brief(const LExpr& e) {
    switch (e.kind) {
        case Expr::Kind::IntLit: return std::to_string(e.int_val);
        case Expr::Kind::RealLit: {
            std::ostringstream os;
            os << e.real_val;
            return os.str();
        }
        case Expr::Kind::BoolLit: return e.bool_val ? "true" : "false";
        case Expr::Kind::Var: return "s" + std::to_string(e.slot);
        case Expr::Kind::ListLit: {
            std::string s = "[";
            for (std::size_t i = 0; i < e.args.size(); ++i) {
                if (i) s += ",";
                s += lexpr_brief(e.args[i]);
            }
            return s + "]";
        }
        case Expr::Kind::Unary: return "-" + lexpr_brief(e.args[0]);
        case Expr::Kind::Binary:
            return "(" + lexpr_brief(e.args[0]) + " " + binop_symbol(e.op) + " " +
                   lexpr_brief(e.args[1]) + ")";
        case Expr::Kind::Fn: {
            std::string s = std::string(builtin_fn_name(e.fn)) + "(";
            for (std::size_t i = 0; i < e.args.size(); ++i) {
                if (i) s += ", ";
                s += lexpr_brief(e.args[i]);
            }
            return s + ")";
        }
    }
    return "?";
}

}  // namespace

std::string dump_graph(const LinkedProgram& prog) {
    std::ostringstream out;
    for (const auto& g : prog.modules) {
        out << "module " << g.name << "\n";
        out << "  cells:";
        for (std::size_t i = 0; i < g.vars.size(); ++i) {
            out << " " << i << ":" << g.vars[i].name << ":" << dtype_name(g.vars[i].dtype);
            if (i < g.n_inputs)
                out << "(in)";
            else if (i < g.n_inputs + g.n_outputs)
                out << "(out)";
        }
        out << "\n";
        for (std::size_t m = 0; m < g.methods.size(); ++m) {
            out << "  method " << (m + 1) << ": " << g.methods[m].units.size()
                << " node(s)\n";
            const auto& units = g.methods[m].units;
            for (std::size_t u = 0; u < units.size(); ++u) {
                out << "    node " << (u + 1) << ": steps=[";
                for (std::size_t s = 0; s < units[u].steps.size(); ++s) {
                    const LStep& st = units[u].steps[s];
                    if (s) out << ", ";
                    switch (st.kind) {
                        case LStep::Kind::Bind:
                            out << "bind s" << st.out_slot << " = " << lexpr_brief(st.expr);
                            break;
                        case LStep::Kind::Guard:
                            out << "guard " << lexpr_brief(st.expr);
                            break;
                        case LStep::Kind::Verify:
                            out << "verify " << lexpr_brief(st.expr);
                            break;
                        case LStep::Kind::Dcall:
                            out << "dcall " << callee_brief(st.callee);
                            break;
                        case LStep::Kind::Find:
                            out << "find " << callee_brief(st.callee) << " -> s"
                                << st.out_slot;
                            break;
                    }
                }
                out << "], tail=";
                const LTail& t = units[u].tail;
                switch (t.kind) {
                    case LTail::Kind::Return: out << "return"; break;
                    case LTail::Kind::For: out << "for -> s" << t.out_slot; break;
                    case LTail::Kind::Select: out << "select -> s" << t.out_slot; break;
                    case LTail::Kind::Call: out << "call " << callee_brief(t.callee); break;
                }
                if (t.kind != LTail::Kind::Return || u + 1 < units.size())
                    out << (u + 1 < units.size() ? " -> node " + std::to_string(u + 2)
                                                 : " -> caller");
                else
                    out << " -> caller";
                out << "\n";
            }
        }
    }
    return out.str();
}

}  // namespace dsp
