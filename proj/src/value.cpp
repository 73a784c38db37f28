#include "dsp/value.hpp"

#include <cmath>

#include "dsp/parser.hpp"
#include "json.hpp"

namespace dsp {

std::int64_t Value::as_int() const {
    if (!is_int()) throw RuntimeFault(FaultKind::DTypeFault, "expected int, got " + std::string(dtype_name(dtype())));
    return std::get<std::int64_t>(v_);
}

bool Value::as_bool() const {
    if (!is_bool()) throw RuntimeFault(FaultKind::DTypeFault, "expected bool, got " + std::string(dtype_name(dtype())));
    return std::get<bool>(v_);
}

const Value::List& Value::as_list() const {
    if (!is_list()) throw RuntimeFault(FaultKind::DTypeFault, "expected list, got " + std::string(dtype_name(dtype())));
    return *std::get<std::shared_ptr<const List>>(v_);
}

double Value::as_real() const {
    if (is_real()) return std::get<double>(v_);
    if (is_int()) return static_cast<double>(std::get<std::int64_t>(v_));
    throw RuntimeFault(FaultKind::DTypeFault, "expected a numeric value, got " + std::string(dtype_name(dtype())));
}

bool operator==(const Value& a, const Value& b) {
    if (a.v_.index() != b.v_.index()) return false;
    if (a.is_list()) {
        const auto& la = a.as_list();
        const auto& lb = b.as_list();
        if (la.size() != lb.size()) return false;
        for (std::size_t i = 0; i < la.size(); ++i)
            if (!(la[i] == lb[i])) return false;
        return true;
    }
    return a.v_ == b.v_;
}

std::string Value::to_string() const { return value_to_json(*this); }

namespace ops {

namespace {

[[noreturn]] void numeric_fault(const char* op, const Value& a, const Value& b) {
    throw RuntimeFault(FaultKind::DTypeFault,
                       std::string("'") + op + "' needs numeric operands, got " +
                           dtype_name(a.dtype()) + " and " + dtype_name(b.dtype()));
}

bool both_int(const Value& a, const Value& b) { return a.is_int() && b.is_int(); }

double check_finite(double r, const char* op) {
    if (!std::isfinite(r))
        throw RuntimeFault(FaultKind::DomainFault,
                           std::string("'") + op + "' produced a non-finite result");
    return r;
}

// Structural equality with int-to-real promotion on mixed numerics.
bool values_eq(const Value& a, const Value& b) {
    if (a.is_numeric() && b.is_numeric()) {
        if (both_int(a, b)) return a.as_int() == b.as_int();
        return a.as_real() == b.as_real();
    }
    if (a.is_bool() && b.is_bool()) return a.as_bool() == b.as_bool();
    if (a.is_list() && b.is_list()) {
        const auto& la = a.as_list();
        const auto& lb = b.as_list();
        if (la.size() != lb.size()) return false;
        for (std::size_t i = 0; i < la.size(); ++i)
            if (!values_eq(la[i], lb[i])) return false;
        return true;
    }
    throw RuntimeFault(FaultKind::DTypeFault,
                       std::string("'=' cannot compare ") + dtype_name(a.dtype()) +
                           " with " + dtype_name(b.dtype()));
}

}  // namespace

Value add(const Value& a, const Value& b) {
    if (!a.is_numeric() || !b.is_numeric()) numeric_fault("+", a, b);
    if (both_int(a, b)) return Value::integer(a.as_int() + b.as_int());
    return Value::real(a.as_real() + b.as_real());
}

Value sub(const Value& a, const Value& b) {
    if (!a.is_numeric() || !b.is_numeric()) numeric_fault("-", a, b);
    if (both_int(a, b)) return Value::integer(a.as_int() - b.as_int());
    return Value::real(a.as_real() - b.as_real());
}

Value mul(const Value& a, const Value& b) {
    if (!a.is_numeric() || !b.is_numeric()) numeric_fault("*", a, b);
    if (both_int(a, b)) return Value::integer(a.as_int() * b.as_int());
    return Value::real(a.as_real() * b.as_real());
}

Value div(const Value& a, const Value& b) {
    if (!a.is_numeric() || !b.is_numeric()) numeric_fault("/", a, b);
    double d = b.as_real();
    if (d == 0.0)
        throw RuntimeFault(FaultKind::DivisionByZero, "division by zero");
    return Value::real(a.as_real() / d);
}

Value pow(const Value& a, const Value& b) {
    if (!a.is_numeric() || !b.is_numeric()) numeric_fault("^", a, b);
    double r = std::pow(a.as_real(), b.as_real());
    if (std::isnan(r))
        throw RuntimeFault(FaultKind::DomainFault, "'^' out of domain");
    return Value::real(check_finite(r, "^"));
}

Value neg(const Value& a) {
    if (a.is_int()) return Value::integer(-a.as_int());
    if (a.is_real()) return Value::real(-a.as_real());
    throw RuntimeFault(FaultKind::DTypeFault,
                       std::string("unary '-' needs a numeric operand, got ") +
                           dtype_name(a.dtype()));
}

Value fn_sqrt(const Value& a) {
    if (!a.is_numeric())
        throw RuntimeFault(FaultKind::DTypeFault, "sqrt needs a numeric argument");
    double x = a.as_real();
    if (x < 0.0)
        throw RuntimeFault(FaultKind::DomainFault, "sqrt of a negative number");
    return Value::real(std::sqrt(x));
}

Value fn_abs(const Value& a) {
    if (a.is_int()) return Value::integer(a.as_int() < 0 ? -a.as_int() : a.as_int());
    if (a.is_real()) return Value::real(std::fabs(a.as_real()));
    throw RuntimeFault(FaultKind::DTypeFault, "abs needs a numeric argument");
}

Value fn_min(const Value& a, const Value& b) {
    if (!a.is_numeric() || !b.is_numeric()) numeric_fault("min", a, b);
    if (both_int(a, b))
        return Value::integer(a.as_int() < b.as_int() ? a.as_int() : b.as_int());
    return Value::real(a.as_real() < b.as_real() ? a.as_real() : b.as_real());
}

Value fn_max(const Value& a, const Value& b) {
    if (!a.is_numeric() || !b.is_numeric()) numeric_fault("max", a, b);
    if (both_int(a, b))
        return Value::integer(a.as_int() > b.as_int() ? a.as_int() : b.as_int());
    return Value::real(a.as_real() > b.as_real() ? a.as_real() : b.as_real());
}

Value compare(BinOp op, const Value& a, const Value& b) {
    switch (op) {
        case BinOp::Eq: return Value::boolean(values_eq(a, b));
        case BinOp::Ne: return Value::boolean(!values_eq(a, b));
        default: break;
    }
    if (!a.is_numeric() || !b.is_numeric()) numeric_fault(binop_symbol(op), a, b);
    bool r = false;
    if (both_int(a, b)) {
        auto x = a.as_int(), y = b.as_int();
        switch (op) {
            case BinOp::Le: r = x <= y; break;
            case BinOp::Ge: r = x >= y; break;
            case BinOp::Lt: r = x < y; break;
            case BinOp::Gt: r = x > y; break;
            default: throw RuntimeFault(FaultKind::Internal, "bad comparison op");
        }
    } else {
        double x = a.as_real(), y = b.as_real();
        switch (op) {
            case BinOp::Le: r = x <= y; break;
            case BinOp::Ge: r = x >= y; break;
            case BinOp::Lt: r = x < y; break;
            case BinOp::Gt: r = x > y; break;
            default: throw RuntimeFault(FaultKind::Internal, "bad comparison op");
        }
    }
    return Value::boolean(r);
}

bool truth(const Value& v) {
    if (!v.is_bool())
        throw RuntimeFault(FaultKind::DTypeFault,
                           std::string("condition is not a bool, got ") +
                               dtype_name(v.dtype()));
    return v.as_bool();
}

Value coerce(const Value& v, DType to) {
    if (to == DType::Any) return v;
    if (v.dtype() == to) return v;
    if (v.is_int() && to == DType::Real) return Value::real(static_cast<double>(v.as_int()));
    throw RuntimeFault(FaultKind::DTypeFault,
                       std::string("cannot store a ") + dtype_name(v.dtype()) +
                           " into a " + dtype_name(to) + " variable");
}

}  // namespace ops

namespace {

nlohmann::ordered_json value_json(const Value& v) {
    if (v.is_int()) return v.as_int();
    if (v.is_real()) return v.as_real();
    if (v.is_bool()) return v.as_bool();
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& e : v.as_list()) arr.push_back(value_json(e));
    return arr;
}

nlohmann::ordered_json violation_json(const VerifyViolation& v) {
    nlohmann::ordered_json j;
    j["condition"] = v.condition;
    j["method"] = v.method;
    nlohmann::ordered_json binds = nlohmann::ordered_json::object();
    for (const auto& [name, val] : v.bindings) binds[name] = value_json(val);
    j["bindings"] = binds;
    return j;
}

}  // namespace

std::string value_to_json(const Value& v) { return value_json(v).dump(); }

std::string to_jsonl(const Solution& s) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json outs = nlohmann::ordered_json::object();
    for (const auto& [name, val] : s.outputs) outs[name] = value_json(val);
    j["outputs"] = outs;
    nlohmann::ordered_json viols = nlohmann::ordered_json::array();
    for (const auto& v : s.violations) viols.push_back(violation_json(v));
    j["violations"] = viols;
    return j.dump();
}

std::string to_text(const Solution& s) {
    std::string out;
    for (std::size_t i = 0; i < s.outputs.size(); ++i) {
        if (i) out += ", ";
        out += s.outputs[i].first + "=" + value_to_json(s.outputs[i].second);
    }
    for (const auto& v : s.violations)
        out += "  [verify failed: " + v.condition + "]";
    return out;
}

Value evaluate_literal(const std::string& text) {
    ExprPtr e = parse_literal_expr(text);
    // Only literal shapes are allowed here; evaluate the tiny closed set.
    std::function<Value(const Expr&)> eval = [&](const Expr& x) -> Value {
        switch (x.kind) {
            case Expr::Kind::IntLit: return Value::integer(x.int_val);
            case Expr::Kind::RealLit: return Value::real(x.real_val);
            case Expr::Kind::BoolLit: return Value::boolean(x.bool_val);
            case Expr::Kind::Unary: return ops::neg(eval(*x.args[0]));
            case Expr::Kind::ListLit: {
                Value::List elems;
                for (const auto& a : x.args) elems.push_back(eval(*a));
                return Value::list(std::move(elems));
            }
            default:
                throw ParseError("not a literal value", x.pos);
        }
    };
    return eval(*e);
}

bool approx_equal(const Value& a, const Value& b, double rel) {
    if (a.is_real() || b.is_real()) {
        if (!a.is_numeric() || !b.is_numeric()) return false;
        double x = a.as_real(), y = b.as_real();
        if (x == y) return true;
        double scale = std::max({1.0, std::fabs(x), std::fabs(y)});
        return std::fabs(x - y) <= rel * scale;
    }
    if (a.is_list() && b.is_list()) {
        const auto& la = a.as_list();
        const auto& lb = b.as_list();
        if (la.size() != lb.size()) return false;
        for (std::size_t i = 0; i < la.size(); ++i)
            if (!approx_equal(la[i], lb[i], rel)) return false;
        return true;
    }
    return a == b;
}

bool solutions_equal(const Solution& a, const Solution& b, double rel) {
    if (a.outputs.size() != b.outputs.size()) return false;
    for (std::size_t i = 0; i < a.outputs.size(); ++i) {
        if (a.outputs[i].first != b.outputs[i].first) return false;
        if (!approx_equal(a.outputs[i].second, b.outputs[i].second, rel)) return false;
    }
    if (a.violations.size() != b.violations.size()) return false;
    for (std::size_t i = 0; i < a.violations.size(); ++i) {
        const auto& va = a.violations[i];
        const auto& vb = b.violations[i];
        if (va.condition != vb.condition || va.method != vb.method) return false;
        if (va.bindings.size() != vb.bindings.size()) return false;
        for (std::size_t k = 0; k < va.bindings.size(); ++k) {
            if (va.bindings[k].first != vb.bindings[k].first) return false;
            if (!approx_equal(va.bindings[k].second, vb.bindings[k].second, rel))
                return false;
        }
    }
    return true;
}

}  // namespace dsp
