#include "dsp/analyzer.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace dsp {

const char* stmt_class_name(StmtClass c) {
    switch (c) {
        case StmtClass::Generator: return "generator";
        case StmtClass::Calculator: return "calculator";
        case StmtClass::Tester: return "tester";
    }
    return "?";
}

StmtClass classify(const Stmt& s) {
    switch (s.kind) {
        case Stmt::Kind::Bind:
            return s.rhs_kind == Stmt::BindRhs::Expr ? StmtClass::Calculator
                                                     : StmtClass::Generator;
        case Stmt::Kind::Call:
            return StmtClass::Generator;
        case Stmt::Kind::Dcall:
        case Stmt::Kind::Find:
            return StmtClass::Calculator;
        case Stmt::Kind::When:
        case Stmt::Kind::Test:
        case Stmt::Kind::Verify:
            return StmtClass::Tester;
    }
    return StmtClass::Calculator;
}

Registry build_registry(const std::vector<ModuleDecl>& mods,
                        std::vector<Diagnostic>& diags) {
    Registry reg;
    for (const auto& m : mods) {
        if (!reg.emplace(m.name, m).second)
            diags.push_back({Severity::Error, m.pos,
                             "module '" + m.name + "' is defined more than once"});
    }
    return reg;
}

std::optional<CalleeSignature> callee_signature(const std::string& name,
                                                const Registry& registry) {
    auto it = registry.find(name);
    if (it != registry.end()) {
        CalleeSignature sig;
        for (const auto& p : it->second.inputs) sig.inputs.push_back(p.dtype);
        for (const auto& p : it->second.outputs) sig.outputs.push_back(p.dtype);
        return sig;
    }
    // Builtin generators are callable like modules.
    if (name == "for")
        return CalleeSignature{{DType::Real, DType::Real, DType::Real}, {DType::Real}};
    if (name == "select") return CalleeSignature{{DType::List}, {DType::Any}};
    return std::nullopt;
}

namespace {

class MethodChecker {
public:
    MethodChecker(const ModuleDecl& mod, int method_index, const Registry& registry,
                  std::vector<Diagnostic>& diags)
        : mod_(mod),
          method_(mod.methods[method_index]),
          method_index_(method_index),
          registry_(registry),
          diags_(diags) {}

    MethodAnalysis run() {
        const auto n = method_.statements.size();
        out_.classes.resize(n);
        out_.readers.resize(n);
        out_.deps.resize(n);
        out_.is_verify.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            out_.classes[i] = classify(method_.statements[i]);
            out_.is_verify[i] = method_.statements[i].kind == Stmt::Kind::Verify;
        }

        collect_definitions();
        resolve_reads_and_types();
        check_outputs_defined();
        check_cycles();
        warn_unused();
        build_snapshot_order();
        return std::move(out_);
    }

private:
    const ModuleDecl& mod_;
    const MethodDecl& method_;
    int method_index_;
    const Registry& registry_;
    std::vector<Diagnostic>& diags_;
    MethodAnalysis out_;
    std::set<std::string> read_anywhere_;

    void error(Position pos, std::string msg) {
        diags_.push_back({Severity::Error, pos, std::move(msg)});
    }
    void warning(Position pos, std::string msg) {
        diags_.push_back({Severity::Warning, pos, std::move(msg)});
    }
    std::string where() const {
        return "method " + std::to_string(method_index_ + 1) + " of module '" +
               mod_.name + "'";
    }

    void define(const std::string& name, DType dtype, int stmt, Position pos) {
        auto it = out_.symbols.find(name);
        if (it != out_.symbols.end()) {
            const SymbolInfo& prev = it->second;
            if (prev.origin == SymbolInfo::Origin::Input) {
                error(pos, "double assignment: '" + name + "' is an input of module '" +
                               mod_.name + "' and cannot be rebound");
                return;
            }
            if (prev.def_stmt >= 0) {
                error(pos, "double assignment: '" + name + "' is already bound by statement " +
                               std::to_string(prev.def_stmt + 1) + " in " + where());
                return;
            }
            // Declared output receiving its definition.
            if (!assignable(dtype, prev.dtype)) {
                error(pos, "type mismatch: output '" + name + "' is declared " +
                               dtype_name(prev.dtype) + " but is bound to a " +
                               dtype_name(dtype) + " here");
            }
            it->second.def_stmt = stmt;
            return;
        }
        SymbolInfo info;
        info.origin = SymbolInfo::Origin::Local;
        info.dtype = dtype;
        info.def_stmt = stmt;
        out_.symbols.emplace(name, info);
    }

    void collect_definitions() {
        for (const auto& p : mod_.inputs)
            out_.symbols[p.name] = {SymbolInfo::Origin::Input, p.dtype, -1};
        for (const auto& p : mod_.outputs)
            out_.symbols[p.name] = {SymbolInfo::Origin::Output, p.dtype, -1};

        for (std::size_t i = 0; i < method_.statements.size(); ++i) {
            const Stmt& s = method_.statements[i];
            switch (s.kind) {
                case Stmt::Kind::Bind:
                    define(s.target, s.dtype, static_cast<int>(i), s.pos);
                    break;
                case Stmt::Kind::Call:
                case Stmt::Kind::Dcall: {
                    auto sig = callee_signature(s.callee, registry_);
                    if (!sig) {
                        error(s.pos, "unknown module '" + s.callee + "'");
                        for (const auto& name : s.call_outs)
                            define(name, DType::Any, static_cast<int>(i), s.pos);
                        break;
                    }
                    if (sig->inputs.size() != s.call_ins.size() ||
                        sig->outputs.size() != s.call_outs.size()) {
                        error(s.pos, "arity mismatch calling '" + s.callee + "': expected " +
                                         std::to_string(sig->inputs.size()) + " input(s) and " +
                                         std::to_string(sig->outputs.size()) + " output(s), got " +
                                         std::to_string(s.call_ins.size()) + " and " +
                                         std::to_string(s.call_outs.size()));
                    }
                    for (std::size_t k = 0; k < s.call_outs.size(); ++k) {
                        DType t = k < sig->outputs.size() ? sig->outputs[k] : DType::Any;
                        define(s.call_outs[k], t, static_cast<int>(i), s.pos);
                    }
                    break;
                }
                case Stmt::Kind::Find: {
                    auto sig = callee_signature(s.callee, registry_);
                    if (!sig) {
                        error(s.pos, "unknown module '" + s.callee + "'");
                    } else if (sig->inputs.size() != s.call_ins.size()) {
                        error(s.pos, "arity mismatch calling '" + s.callee + "': expected " +
                                         std::to_string(sig->inputs.size()) + " input(s), got " +
                                         std::to_string(s.call_ins.size()));
                    }
                    define(s.call_outs[0], DType::List, static_cast<int>(i), s.pos);
                    break;
                }
                default:
                    break;
            }
        }
    }

    void add_dep(int reader, const std::string& name, Position pos) {
        auto it = out_.symbols.find(name);
        if (it == out_.symbols.end()) {
            error(pos, "unknown variable '" + name + "' in " + where());
            return;
        }
        read_anywhere_.insert(name);
        int def = it->second.def_stmt;
        if (def < 0) return;  // input: no statement edge
        auto& rs = out_.readers[def];
        if (std::find(rs.begin(), rs.end(), reader) == rs.end()) rs.push_back(reader);
        auto& ds = out_.deps[reader];
        if (std::find(ds.begin(), ds.end(), def) == ds.end()) ds.push_back(def);
    }

    DType var_type(const std::string& name) const {
        auto it = out_.symbols.find(name);
        return it == out_.symbols.end() ? DType::Any : it->second.dtype;
    }

    static bool numeric_like(DType t) {
        return t == DType::Int || t == DType::Real || t == DType::Any;
    }

    DType type_of(const Expr& e, int reader) {
        switch (e.kind) {
            case Expr::Kind::IntLit: return DType::Int;
            case Expr::Kind::RealLit: return DType::Real;
            case Expr::Kind::BoolLit: return DType::Bool;
            case Expr::Kind::ListLit: {
                for (const auto& a : e.args) type_of(*a, reader);
                return DType::List;
            }
            case Expr::Kind::Var:
                add_dep(reader, e.name, e.pos);
                return var_type(e.name);
            case Expr::Kind::Unary: {
                DType t = type_of(*e.args[0], reader);
                if (!numeric_like(t)) {
                    error(e.pos, std::string("type mismatch: unary '-' needs a numeric operand, got ") +
                                     dtype_name(t));
                    return DType::Any;
                }
                return t;
            }
            case Expr::Kind::Binary: {
                DType l = type_of(*e.args[0], reader);
                DType r = type_of(*e.args[1], reader);
                if (is_comparison(e.op)) return comparison_type(e, l, r);
                if (!numeric_like(l) || !numeric_like(r)) {
                    error(e.pos, std::string("type mismatch: '") + binop_symbol(e.op) +
                                     "' needs numeric operands, got " + dtype_name(l) +
                                     " and " + dtype_name(r));
                    return DType::Any;
                }
                if (e.op == BinOp::Div || e.op == BinOp::Pow) return DType::Real;
                if (l == DType::Any || r == DType::Any) return DType::Any;
                return (l == DType::Real || r == DType::Real) ? DType::Real : DType::Int;
            }
            case Expr::Kind::Fn: {
                std::vector<DType> ts;
                for (const auto& a : e.args) ts.push_back(type_of(*a, reader));
                for (DType t : ts) {
                    if (!numeric_like(t)) {
                        error(e.pos, std::string("type mismatch: ") + builtin_fn_name(e.fn) +
                                         " needs numeric arguments, got " + dtype_name(t));
                        return DType::Any;
                    }
                }
                switch (e.fn) {
                    case BuiltinFn::Sqrt: return DType::Real;
                    case BuiltinFn::Abs: return ts[0];
                    case BuiltinFn::Min:
                    case BuiltinFn::Max:
                        if (ts[0] == DType::Any || ts[1] == DType::Any) return DType::Any;
                        return (ts[0] == DType::Real || ts[1] == DType::Real) ? DType::Real
                                                                              : DType::Int;
                }
                return DType::Any;
            }
        }
        return DType::Any;
    }

    DType comparison_type(const Expr& e, DType l, DType r) {
        if (e.op == BinOp::Eq || e.op == BinOp::Ne) {
            bool ok = (numeric_like(l) && numeric_like(r)) ||
                      (l == DType::Bool && (r == DType::Bool || r == DType::Any)) ||
                      (r == DType::Bool && l == DType::Any) ||
                      (l == DType::List && (r == DType::List || r == DType::Any)) ||
                      (r == DType::List && l == DType::Any);
            if (!ok) {
                error(e.pos, std::string("type mismatch: '") + binop_symbol(e.op) +
                                 "' cannot compare " + dtype_name(l) + " with " +
                                 dtype_name(r));
            }
            if (e.op == BinOp::Eq && l == DType::Real && r == DType::Real)
                warning(e.pos,
                        "'=' compares two real expressions exactly; consider a tolerance test");
            return DType::Bool;
        }
        if (!numeric_like(l) || !numeric_like(r)) {
            error(e.pos, std::string("type mismatch: '") + binop_symbol(e.op) +
                             "' needs numeric operands, got " + dtype_name(l) + " and " +
                             dtype_name(r));
        }
        return DType::Bool;
    }

    void check_condition(const Stmt& s, int i) {
        DType t = type_of(*s.expr, i);
        if (t != DType::Bool && t != DType::Any)
            error(s.pos, std::string("type mismatch: condition must be bool, got ") +
                             dtype_name(t));
    }

    void resolve_reads_and_types() {
        for (std::size_t i = 0; i < method_.statements.size(); ++i) {
            const Stmt& s = method_.statements[i];
            int idx = static_cast<int>(i);
            switch (s.kind) {
                case Stmt::Kind::Bind:
                    if (s.rhs_kind == Stmt::BindRhs::Expr) {
                        DType t = type_of(*s.expr, idx);
                        if (!assignable(t, s.dtype))
                            error(s.pos, "type mismatch: cannot bind a " +
                                             std::string(dtype_name(t)) + " expression to '" +
                                             s.target + " : " + dtype_name(s.dtype) + "'");
                    } else if (s.rhs_kind == Stmt::BindRhs::For) {
                        bool any_real = false;
                        for (const auto& a : s.gen_args) {
                            DType t = type_of(*a, idx);
                            if (!numeric_like(t))
                                error(a->pos, std::string("type mismatch: for() bounds must be numeric, got ") +
                                                  dtype_name(t));
                            if (t == DType::Real) any_real = true;
                        }
                        if (s.dtype == DType::Bool || s.dtype == DType::List)
                            error(s.pos, "type mismatch: for() yields numeric values");
                        else if (s.dtype == DType::Int && any_real)
                            error(s.pos, "type mismatch: for() over real bounds cannot bind an int variable");
                    } else {  // Select
                        DType t = type_of(*s.gen_args[0], idx);
                        if (t != DType::List && t != DType::Any)
                            error(s.pos, std::string("type mismatch: select() needs a list, got ") +
                                             dtype_name(t));
                    }
                    break;
                case Stmt::Kind::When:
                case Stmt::Kind::Test:
                case Stmt::Kind::Verify:
                    check_condition(s, idx);
                    break;
                case Stmt::Kind::Call:
                case Stmt::Kind::Dcall:
                case Stmt::Kind::Find: {
                    auto sig = callee_signature(s.callee, registry_);
                    for (std::size_t k = 0; k < s.call_ins.size(); ++k) {
                        DType t = type_of(*s.call_ins[k], idx);
                        if (sig && k < sig->inputs.size() && !assignable(t, sig->inputs[k]))
                            error(s.call_ins[k]->pos,
                                  "type mismatch: input " + std::to_string(k + 1) + " of '" +
                                      s.callee + "' expects " + dtype_name(sig->inputs[k]) +
                                      ", got " + dtype_name(t));
                    }
                    break;
                }
            }
        }
    }

    void check_outputs_defined() {
        for (const auto& p : mod_.outputs) {
            const auto& info = out_.symbols.at(p.name);
            if (info.def_stmt < 0)
                error(method_.pos, "output '" + p.name + "' is never bound in " + where());
        }
    }

    void check_cycles() {
        const std::size_t n = method_.statements.size();
        std::vector<int> indeg(n, 0);
        for (std::size_t i = 0; i < n; ++i)
            for (int r : out_.readers[i]) ++indeg[r];
        std::vector<int> queue;
        for (std::size_t i = 0; i < n; ++i)
            if (indeg[i] == 0) queue.push_back(static_cast<int>(i));
        std::size_t done = 0;
        while (!queue.empty()) {
            int v = queue.back();
            queue.pop_back();
            ++done;
            for (int r : out_.readers[v])
                if (--indeg[r] == 0) queue.push_back(r);
        }
        if (done == n) return;

        // Walk the leftover nodes to present one concrete cycle.
        std::vector<int> cycle = find_cycle(indeg);
        std::string stmts;
        for (std::size_t i = 0; i < cycle.size(); ++i) {
            if (i) stmts += ", ";
            stmts += std::to_string(cycle[i] + 1);
        }
        error(method_.pos,
              "cyclic dependency between statements [" + stmts + "] in " + where());
    }

    std::vector<int> find_cycle(const std::vector<int>& indeg) const {
        const std::size_t n = method_.statements.size();
        std::vector<int> state(n, 0);  // 0 unseen, 1 on stack, 2 done
        std::vector<int> stack;
        std::vector<int> cycle;
        std::function<bool(int)> dfs = [&](int v) {
            state[v] = 1;
            stack.push_back(v);
            for (int r : out_.readers[v]) {
                if (indeg[r] == 0) continue;
                if (state[r] == 1) {
                    auto it = std::find(stack.begin(), stack.end(), r);
                    cycle.assign(it, stack.end());
                    return true;
                }
                if (state[r] == 0 && dfs(r)) return true;
            }
            state[v] = 2;
            stack.pop_back();
            return false;
        };
        for (std::size_t i = 0; i < n; ++i)
            if (indeg[i] > 0 && state[i] == 0 && dfs(static_cast<int>(i))) break;
        std::sort(cycle.begin(), cycle.end());
        return cycle;
    }

    void warn_unused() {
        for (const auto& [name, info] : out_.symbols) {
            if (info.origin != SymbolInfo::Origin::Local) continue;
            if (!read_anywhere_.count(name))
                warning(method_.statements.empty() ? method_.pos
                                                   : method_.statements[info.def_stmt].pos,
                        "variable '" + name + "' is bound but never used in " + where());
        }
    }

    void build_snapshot_order() {
        for (const auto& p : mod_.inputs) out_.snapshot_order.push_back(p.name);
        for (const auto& p : mod_.outputs) out_.snapshot_order.push_back(p.name);
        // Locals in source definition order.
        std::vector<std::pair<int, std::string>> locals;
        for (const auto& [name, info] : out_.symbols)
            if (info.origin == SymbolInfo::Origin::Local)
                locals.emplace_back(info.def_stmt, name);
        std::sort(locals.begin(), locals.end());
        for (auto& [_, name] : locals) out_.snapshot_order.push_back(name);
    }
};

}  // namespace

AnalyzeResult analyze(const ModuleDecl& m, const Registry& registry) {
    AnalyzeResult result;
    AnalyzedModule am;
    am.decl = m;
    for (std::size_t i = 0; i < m.methods.size(); ++i) {
        MethodChecker checker(m, static_cast<int>(i), registry, result.diags);
        am.methods.push_back(checker.run());
    }
    if (!has_errors(result.diags)) result.module = std::move(am);
    return result;
}

}  // namespace dsp
