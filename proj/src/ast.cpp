#include "dsp/ast.hpp"

#include <charconv>
#include <sstream>

namespace dsp {

const char* dtype_name(DType t) {
    switch (t) {
        case DType::Real: return "real";
        case DType::Int: return "int";
        case DType::Bool: return "bool";
        case DType::List: return "list";
        case DType::Any: return "any";
    }
    return "?";
}

const char* binop_symbol(BinOp op) {
    switch (op) {
        case BinOp::Add: return "+";
        case BinOp::Sub: return "-";
        case BinOp::Mul: return "*";
        case BinOp::Div: return "/";
        case BinOp::Pow: return "^";
        case BinOp::Le: return "=<";
        case BinOp::Ge: return ">=";
        case BinOp::Lt: return "<";
        case BinOp::Gt: return ">";
        case BinOp::Eq: return "=";
        case BinOp::Ne: return "\\=";
    }
    return "?";
}

const char* builtin_fn_name(BuiltinFn f) {
    switch (f) {
        case BuiltinFn::Sqrt: return "sqrt";
        case BuiltinFn::Abs: return "abs";
        case BuiltinFn::Min: return "min";
        case BuiltinFn::Max: return "max";
    }
    return "?";
}

bool is_comparison(BinOp op) {
    switch (op) {
        case BinOp::Le:
        case BinOp::Ge:
        case BinOp::Lt:
        case BinOp::Gt:
        case BinOp::Eq:
        case BinOp::Ne:
            return true;
        default:
            return false;
    }
}

ExprPtr make_int(std::int64_t v, Position p) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::IntLit;
    e->int_val = v;
    e->pos = p;
    return e;
}

ExprPtr make_real(double v, Position p) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::RealLit;
    e->real_val = v;
    e->pos = p;
    return e;
}

ExprPtr make_bool(bool v, Position p) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::BoolLit;
    e->bool_val = v;
    e->pos = p;
    return e;
}

ExprPtr make_var(std::string name, Position p) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Var;
    e->name = std::move(name);
    e->pos = p;
    return e;
}

ExprPtr make_unary(ExprPtr arg, Position p) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Unary;
    e->args.push_back(std::move(arg));
    e->pos = p;
    return e;
}

ExprPtr make_binary(BinOp op, ExprPtr l, ExprPtr r, Position p) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Binary;
    e->op = op;
    e->args.push_back(std::move(l));
    e->args.push_back(std::move(r));
    e->pos = p;
    return e;
}

ExprPtr make_fn(BuiltinFn f, std::vector<ExprPtr> args, Position p) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Fn;
    e->fn = f;
    e->args = std::move(args);
    e->pos = p;
    return e;
}

ExprPtr make_list(std::vector<ExprPtr> elems, Position p) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::ListLit;
    e->args = std::move(elems);
    e->pos = p;
    return e;
}

namespace {

// Precedence levels, highest binds tightest.
int prec(BinOp op) {
    switch (op) {
        case BinOp::Pow: return 5;
        case BinOp::Mul:
        case BinOp::Div: return 3;
        case BinOp::Add:
        case BinOp::Sub: return 2;
        default: return 1;  // comparisons
    }
}
constexpr int kUnaryPrec = 4;

std::string real_text(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, res.ptr);
    // Keep reals visibly real so reparsing preserves the literal's type.
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
        s += ".0";
    return s;
}

void print_expr(std::ostringstream& out, const Expr& e, int parent_prec) {
    switch (e.kind) {
        case Expr::Kind::IntLit:
            out << e.int_val;
            return;
        case Expr::Kind::RealLit:
            out << real_text(e.real_val);
            return;
        case Expr::Kind::BoolLit:
            out << (e.bool_val ? "true" : "false");
            return;
        case Expr::Kind::Var:
            out << e.name;
            return;
        case Expr::Kind::ListLit: {
            out << "[";
            for (std::size_t i = 0; i < e.args.size(); ++i) {
                if (i) out << ", ";
                print_expr(out, *e.args[i], 0);
            }
            out << "]";
            return;
        }
        case Expr::Kind::Unary: {
            bool paren = kUnaryPrec < parent_prec;
            if (paren) out << "(";
            out << "-";
            print_expr(out, *e.args[0], kUnaryPrec + 1);
            if (paren) out << ")";
            return;
        }
        case Expr::Kind::Binary: {
            int p = prec(e.op);
            bool paren = p < parent_prec;
            if (paren) out << "(";
            // '^' is right-associative; the others associate left.
            int lp = e.op == BinOp::Pow ? p + 1 : p;
            int rp = e.op == BinOp::Pow ? p : p + 1;
            print_expr(out, *e.args[0], lp);
            out << " " << binop_symbol(e.op) << " ";
            print_expr(out, *e.args[1], rp);
            if (paren) out << ")";
            return;
        }
        case Expr::Kind::Fn: {
            out << builtin_fn_name(e.fn) << "(";
            for (std::size_t i = 0; i < e.args.size(); ++i) {
                if (i) out << ", ";
                print_expr(out, *e.args[i], 0);
            }
            out << ")";
            return;
        }
    }
}

void print_args(std::ostringstream& out, const std::vector<ExprPtr>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out << ", ";
        print_expr(out, *args[i], 0);
    }
}

}  // namespace

std::string expr_to_string(const Expr& e) {
    std::ostringstream out;
    print_expr(out, e, 0);
    return out.str();
}

std::string stmt_to_string(const Stmt& s) {
    std::ostringstream out;
    switch (s.kind) {
        case Stmt::Kind::Bind:
            out << s.target << " : " << dtype_name(s.dtype) << " = ";
            if (s.rhs_kind == Stmt::BindRhs::For) {
                out << "for(";
                print_args(out, s.gen_args);
                out << ")";
            } else if (s.rhs_kind == Stmt::BindRhs::Select) {
                out << "select(";
                print_args(out, s.gen_args);
                out << ")";
            } else {
                print_expr(out, *s.expr, 0);
            }
            break;
        case Stmt::Kind::When:
            out << "when(" << expr_to_string(*s.expr) << ")";
            break;
        case Stmt::Kind::Test:
            out << "test(" << expr_to_string(*s.expr) << ")";
            break;
        case Stmt::Kind::Verify:
            out << "verify(" << expr_to_string(*s.expr) << ")";
            break;
        case Stmt::Kind::Call:
        case Stmt::Kind::Dcall: {
            out << (s.kind == Stmt::Kind::Call ? "call(" : "dcall(") << s.callee
                << ", {";
            print_args(out, s.call_ins);
            out << "}, {";
            for (std::size_t i = 0; i < s.call_outs.size(); ++i) {
                if (i) out << ", ";
                out << s.call_outs[i];
            }
            out << "})";
            break;
        }
        case Stmt::Kind::Find: {
            out << "find(" << s.callee << ", {";
            print_args(out, s.call_ins);
            out << "}, " << s.call_outs[0] << ")";
            break;
        }
    }
    out << ";";
    return out.str();
}

std::string module_to_string(const ModuleDecl& m) {
    std::ostringstream out;
    auto params = [&](const std::vector<ParamDecl>& ps) {
        out << "{";
        for (std::size_t i = 0; i < ps.size(); ++i) {
            if (i) out << ", ";
            out << ps[i].name << " : " << dtype_name(ps[i].dtype);
        }
        out << "}";
    };
    out << m.name << "(";
    params(m.inputs);
    out << ", ";
    params(m.outputs);
    out << ")\n";
    for (const auto& method : m.methods) {
        out << "  method\n";
        for (const auto& st : method.statements)
            out << "    " << stmt_to_string(st) << "\n";
        out << "  end method;\n";
    }
    out << "end module;\n";
    return out.str();
}

}  // namespace dsp
