#include "dsp/oracle.hpp"

#include <pthread.h>

#include <algorithm>
#include <cmath>
#include <exception>

namespace dsp {

OracleProgram oracle_program(const std::vector<ScheduledModule>& mods) {
    OracleProgram prog;
    for (const auto& m : mods) prog.modules[m.analyzed.decl.name] = &m;
    return prog;
}

namespace {

constexpr double kForEps = 1e-9;

using Env = std::map<std::string, Value>;
using Cont = std::function<bool()>;
using CallSink = std::function<bool(const std::vector<Value>&)>;

class Interp {
public:
    explicit Interp(const OracleProgram& prog) : prog_(prog) {}

    std::vector<VerifyViolation> take_violations() {
        auto out = std::move(violations_);
        violations_.clear();
        return out;
    }

    // Enumerates callee solutions; k gets the output vector per solution
    // and returns false to stop.
    bool solve_call(const std::string& callee, const std::vector<Value>& ins,
                    const CallSink& k) {
        auto it = prog_.modules.find(callee);
        if (it != prog_.modules.end()) return solve_module(*it->second, ins, k);
        if (callee == "for") return builtin_for(ins, k);
        if (callee == "select") return builtin_select(ins, k);
        throw RuntimeFault(FaultKind::Internal, "unresolved module '" + callee + "'");
    }

private:
    const OracleProgram& prog_;
    std::vector<VerifyViolation> violations_;

    static Value lookup(const Env& env, const std::string& name, Position) {
        auto it = env.find(name);
        if (it == env.end())
            throw RuntimeFault(FaultKind::EmptyCellRead,
                               "read of an unbound variable '" + name + "'");
        return it->second;
    }

    Value eval(const Expr& e, const Env& env) const {
        switch (e.kind) {
            case Expr::Kind::IntLit: return Value::integer(e.int_val);
            case Expr::Kind::RealLit: return Value::real(e.real_val);
            case Expr::Kind::BoolLit: return Value::boolean(e.bool_val);
            case Expr::Kind::Var: return lookup(env, e.name, e.pos);
            case Expr::Kind::ListLit: {
                Value::List elems;
                for (const auto& a : e.args) elems.push_back(eval(*a, env));
                return Value::list(std::move(elems));
            }
            case Expr::Kind::Unary: return ops::neg(eval(*e.args[0], env));
            case Expr::Kind::Binary: {
                Value l = eval(*e.args[0], env);
                Value r = eval(*e.args[1], env);
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
            case Expr::Kind::Fn:
                switch (e.fn) {
                    case BuiltinFn::Sqrt: return ops::fn_sqrt(eval(*e.args[0], env));
                    case BuiltinFn::Abs: return ops::fn_abs(eval(*e.args[0], env));
                    case BuiltinFn::Min:
                        return ops::fn_min(eval(*e.args[0], env), eval(*e.args[1], env));
                    case BuiltinFn::Max:
                        return ops::fn_max(eval(*e.args[0], env), eval(*e.args[1], env));
                }
                throw RuntimeFault(FaultKind::Internal, "bad builtin fn");
        }
        throw RuntimeFault(FaultKind::Internal, "bad expression kind");
    }

    std::vector<Value> eval_all(const std::vector<ExprPtr>& es, const Env& env) const {
        std::vector<Value> out;
        out.reserve(es.size());
        for (const auto& e : es) out.push_back(eval(*e, env));
        return out;
    }

    bool builtin_for(const std::vector<Value>& ins, const CallSink& k) const {
        if (ins.size() != 3)
            throw RuntimeFault(FaultKind::Internal, "for() takes 3 inputs");
        double b = ops::coerce(ins[0], DType::Real).as_real();
        double e = ops::coerce(ins[1], DType::Real).as_real();
        double s = ops::coerce(ins[2], DType::Real).as_real();
        if (s <= 0.0)
            throw RuntimeFault(FaultKind::NonPositiveStep, "for() step must be positive");
        double bound = e + kForEps * std::max(1.0, std::fabs(e));
        for (double v = b; v <= bound; v += s)
            if (!k({Value::real(v)})) return false;
        return true;
    }

    bool builtin_select(const std::vector<Value>& ins, const CallSink& k) const {
        if (ins.size() != 1)
            throw RuntimeFault(FaultKind::Internal, "select() takes 1 input");
        for (const auto& e : ins[0].as_list())
            if (!k({e})) return false;
        return true;
    }

    bool solve_module(const ScheduledModule& sm, const std::vector<Value>& ins,
                      const CallSink& k) {
        const ModuleDecl& decl = sm.analyzed.decl;
        if (ins.size() != decl.inputs.size())
            throw RuntimeFault(FaultKind::Internal,
                               "arity mismatch activating module '" + decl.name + "'");
        for (std::size_t m = 0; m < decl.methods.size(); ++m) {
            Env env;
            for (std::size_t i = 0; i < ins.size(); ++i)
                env[decl.inputs[i].name] = ops::coerce(ins[i], decl.inputs[i].dtype);
            bool keep_going = solve_stmts(sm, static_cast<int>(m), 0, env, [&] {
                std::vector<Value> outs;
                outs.reserve(decl.outputs.size());
                for (const auto& p : decl.outputs)
                    outs.push_back(lookup(env, p.name, p.pos));
                return k(outs);
            });
            if (!keep_going) return false;
        }
        return true;
    }

    bool solve_stmts(const ScheduledModule& sm, int method, std::size_t pos, Env& env,
                     const Cont& k) {
        const auto& order = sm.methods[method].order;
        if (pos == order.size()) return k();
        const Stmt& s = sm.analyzed.decl.methods[method].statements[order[pos]];
        const MethodAnalysis& analysis = sm.analyzed.methods[method];
        auto next = [&] { return solve_stmts(sm, method, pos + 1, env, k); };
        auto declared = [&](const std::string& name) {
            return analysis.symbols.at(name).dtype;
        };

        switch (s.kind) {
            case Stmt::Kind::Bind:
                switch (s.rhs_kind) {
                    case Stmt::BindRhs::Expr:
                        env[s.target] = ops::coerce(eval(*s.expr, env), declared(s.target));
                        return next();
                    case Stmt::BindRhs::For: {
                        DType t = declared(s.target);
                        Value b = ops::coerce(eval(*s.gen_args[0], env), t);
                        Value e = ops::coerce(eval(*s.gen_args[1], env), t);
                        Value st = ops::coerce(eval(*s.gen_args[2], env), t);
                        if (b.is_int() && e.is_int() && st.is_int()) {
                            if (st.as_int() <= 0)
                                throw RuntimeFault(FaultKind::NonPositiveStep,
                                                   "for() step must be positive");
                            for (std::int64_t v = b.as_int(); v <= e.as_int();
                                 v += st.as_int()) {
                                env[s.target] = Value::integer(v);
                                if (!next()) return false;
                            }
                            return true;
                        }
                        if (st.as_real() <= 0.0)
                            throw RuntimeFault(FaultKind::NonPositiveStep,
                                               "for() step must be positive");
                        double end = e.as_real();
                        double bound = end + kForEps * std::max(1.0, std::fabs(end));
                        for (double v = b.as_real(); v <= bound; v += st.as_real()) {
                            env[s.target] = Value::real(v);
                            if (!next()) return false;
                        }
                        return true;
                    }
                    case Stmt::BindRhs::Select: {
                        Value list = eval(*s.gen_args[0], env);
                        DType t = declared(s.target);
                        for (const auto& elem : list.as_list()) {
                            env[s.target] = ops::coerce(elem, t);
                            if (!next()) return false;
                        }
                        return true;
                    }
                }
                return true;
            case Stmt::Kind::When:
            case Stmt::Kind::Test:
                return ops::truth(eval(*s.expr, env)) ? next() : true;
            case Stmt::Kind::Verify: {
                if (!ops::truth(eval(*s.expr, env))) {
                    VerifyViolation v;
                    v.condition = expr_to_string(*s.expr);
                    v.method = sm.analyzed.decl.name + "." + std::to_string(method + 1);
                    for (const auto& name : analysis.snapshot_order) {
                        auto it = env.find(name);
                        if (it != env.end()) v.bindings.emplace_back(name, it->second);
                    }
                    violations_.push_back(std::move(v));
                }
                return next();
            }
            case Stmt::Kind::Call: {
                std::vector<Value> ins = eval_all(s.call_ins, env);
                return solve_call(s.callee, ins, [&](const std::vector<Value>& outs) {
                    for (std::size_t i = 0; i < s.call_outs.size(); ++i)
                        env[s.call_outs[i]] =
                            ops::coerce(outs[i], declared(s.call_outs[i]));
                    return next();
                });
            }
            case Stmt::Kind::Dcall: {
                std::vector<Value> ins = eval_all(s.call_ins, env);
                bool found = false;
                std::vector<Value> first;
                solve_call(s.callee, ins, [&](const std::vector<Value>& outs) {
                    found = true;
                    first = outs;
                    return false;  // first solution only
                });
                if (!found) return true;
                for (std::size_t i = 0; i < s.call_outs.size(); ++i)
                    env[s.call_outs[i]] = ops::coerce(first[i], declared(s.call_outs[i]));
                return next();
            }
            case Stmt::Kind::Find: {
                std::vector<Value> ins = eval_all(s.call_ins, env);
                Value::List collected;
                solve_call(s.callee, ins, [&](const std::vector<Value>& outs) {
                    if (outs.size() == 1) {
                        collected.push_back(outs[0]);
                    } else {
                        collected.push_back(Value::list(outs));
                    }
                    return true;
                });
                env[s.call_outs[0]] = Value::list(std::move(collected));
                return next();
            }
        }
        return true;
    }
};

}  // namespace

void oracle_solve(const OracleProgram& prog, const std::string& module,
                  const std::vector<Value>& ins, const SolutionSink& sink) {
    auto it = prog.modules.find(module);
    if (it == prog.modules.end())
        throw RuntimeFault(FaultKind::Internal, "unknown module '" + module + "'");
    const ModuleDecl& decl = it->second->analyzed.decl;

    Interp interp(prog);
    interp.solve_call(module, ins, [&](const std::vector<Value>& outs) {
        Solution sol;
        for (std::size_t i = 0; i < decl.outputs.size(); ++i)
            sol.outputs.emplace_back(decl.outputs[i].name, outs[i]);
        sol.violations = interp.take_violations();
        return sink(sol);
    });
}

void run_with_big_stack(const std::function<void()>& fn, std::size_t stack_bytes) {
    struct Ctx {
        const std::function<void()>* fn;
        std::exception_ptr err;
    } ctx{&fn, nullptr};

    pthread_attr_t attr;
    if (pthread_attr_init(&attr) != 0 ||
        pthread_attr_setstacksize(&attr, stack_bytes) != 0) {
        fn();
        return;
    }
    auto trampoline = [](void* p) -> void* {
        auto* c = static_cast<Ctx*>(p);
        try {
            (*c->fn)();
        } catch (...) {
            c->err = std::current_exception();
        }
        return nullptr;
    };
    pthread_t tid;
    if (pthread_create(&tid, &attr, trampoline, &ctx) != 0) {
        pthread_attr_destroy(&attr);
        fn();
        return;
    }
    pthread_join(tid, nullptr);
    pthread_attr_destroy(&attr);
    if (ctx.err) std::rethrow_exception(ctx.err);
}

}  // namespace dsp
