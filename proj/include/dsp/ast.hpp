#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dsp/diag.hpp"

namespace dsp {

enum class DType { Real, Int, Bool, List, Any };

const char* dtype_name(DType t);

// True when a value of `from` may flow into a slot declared `to`.
// Int promotes to Real; Any is the escape hatch for values whose type
// only the producing module knows (select called as a module).
inline bool assignable(DType from, DType to) {
    if (from == to) return true;
    if (from == DType::Int && to == DType::Real) return true;
    if (from == DType::Any || to == DType::Any) return true;
    return false;
}

enum class BinOp { Add, Sub, Mul, Div, Pow, Le, Ge, Lt, Gt, Eq, Ne };
enum class UnOp { Neg };
enum class BuiltinFn { Sqrt, Abs, Min, Max };

const char* binop_symbol(BinOp op);
const char* builtin_fn_name(BuiltinFn f);
bool is_comparison(BinOp op);

struct Expr;
using ExprPtr = std::shared_ptr<Expr>;

// Expression tree. Nodes are immutable after parsing.
struct Expr {
    enum class Kind { IntLit, RealLit, BoolLit, ListLit, Var, Unary, Binary, Fn };
    Kind kind;
    Position pos;

    std::int64_t int_val = 0;
    double real_val = 0.0;
    bool bool_val = false;
    std::string name;  // Var
    BinOp op{};
    BuiltinFn fn{};
    std::vector<ExprPtr> args;  // Unary: 1, Binary: 2, Fn/ListLit: n
};

ExprPtr make_int(std::int64_t v, Position p);
ExprPtr make_real(double v, Position p);
ExprPtr make_bool(bool v, Position p);
ExprPtr make_var(std::string name, Position p);
ExprPtr make_unary(ExprPtr arg, Position p);
ExprPtr make_binary(BinOp op, ExprPtr l, ExprPtr r, Position p);
ExprPtr make_fn(BuiltinFn f, std::vector<ExprPtr> args, Position p);
ExprPtr make_list(std::vector<ExprPtr> elems, Position p);

// Canonical source text of an expression (used for diagnostics and for
// verify reports). Parenthesizes only where precedence demands.
std::string expr_to_string(const Expr& e);

struct Stmt {
    enum class Kind { Bind, When, Test, Verify, Call, Dcall, Find };
    enum class BindRhs { Expr, For, Select };

    Kind kind{};
    Position pos;

    // Bind
    std::string target;
    DType dtype = DType::Real;
    BindRhs rhs_kind = BindRhs::Expr;
    std::vector<ExprPtr> gen_args;  // for: {from, to, step}; select: {list}

    // Bind rhs expression, or the condition of When/Test/Verify.
    ExprPtr expr;

    // Call/Dcall/Find
    std::string callee;
    std::vector<ExprPtr> call_ins;
    std::vector<std::string> call_outs;  // Find uses a single output list name
};

std::string stmt_to_string(const Stmt& s);

struct ParamDecl {
    std::string name;
    DType dtype = DType::Real;
    Position pos;
};

struct MethodDecl {
    std::vector<Stmt> statements;  // textual order, exactly as parsed
    Position pos;
};

struct ModuleDecl {
    std::string name;
    std::vector<ParamDecl> inputs;
    std::vector<ParamDecl> outputs;
    std::vector<MethodDecl> methods;
    Position pos;
};

// Canonical pretty-printer; reparsing its output yields a structurally
// identical module.
std::string module_to_string(const ModuleDecl& m);

}  // namespace dsp
