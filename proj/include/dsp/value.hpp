#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "dsp/ast.hpp"
#include "dsp/diag.hpp"

namespace dsp {

// Runtime value: real, int, bool, or an immutable list.
class Value {
public:
    using List = std::vector<Value>;

    Value() : v_(std::int64_t{0}) {}

    static Value integer(std::int64_t i) { return Value(i); }
    static Value real(double d) { return Value(d); }
    static Value boolean(bool b) { return Value(b); }
    static Value list(List elems) {
        return Value(std::make_shared<const List>(std::move(elems)));
    }

    bool is_int() const { return std::holds_alternative<std::int64_t>(v_); }
    bool is_real() const { return std::holds_alternative<double>(v_); }
    bool is_bool() const { return std::holds_alternative<bool>(v_); }
    bool is_list() const {
        return std::holds_alternative<std::shared_ptr<const List>>(v_);
    }
    bool is_numeric() const { return is_int() || is_real(); }

    DType dtype() const {
        if (is_int()) return DType::Int;
        if (is_real()) return DType::Real;
        if (is_bool()) return DType::Bool;
        return DType::List;
    }

    std::int64_t as_int() const;
    bool as_bool() const;
    const List& as_list() const;
    // Numeric read with int-to-real promotion.
    double as_real() const;

    // Strict structural equality (tag included); 1 and 1.0 differ here.
    friend bool operator==(const Value& a, const Value& b);
    friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }

    std::string to_string() const;

private:
    explicit Value(std::int64_t i) : v_(i) {}
    explicit Value(double d) : v_(d) {}
    explicit Value(bool b) : v_(b) {}
    explicit Value(std::shared_ptr<const List> l) : v_(std::move(l)) {}

    std::variant<std::int64_t, double, bool, std::shared_ptr<const List>> v_;
};

// Arithmetic and comparison semantics shared by every execution path.
// Int op int stays int except '/' and '^', which always produce real;
// any real operand promotes the whole operation to real.
namespace ops {

Value add(const Value& a, const Value& b);
Value sub(const Value& a, const Value& b);
Value mul(const Value& a, const Value& b);
Value div(const Value& a, const Value& b);
Value pow(const Value& a, const Value& b);
Value neg(const Value& a);

Value fn_sqrt(const Value& a);
Value fn_abs(const Value& a);
Value fn_min(const Value& a, const Value& b);
Value fn_max(const Value& a, const Value& b);

// Language-level comparison; Eq/Ne accept bools and lists as well.
Value compare(BinOp op, const Value& a, const Value& b);

// Reads a condition result, faulting if it is not a bool.
bool truth(const Value& v);

// Coerces a value into a declared slot type (int promotes to real).
// Faults on any other mismatch.
Value coerce(const Value& v, DType to);

}  // namespace ops

// One result of draining a module: outputs in declared order, plus the
// verify violations charged to this solution.
struct VerifyViolation {
    std::string condition;
    std::string method;  // "<module>.<method index>", 1-based
    std::vector<std::pair<std::string, Value>> bindings;
};

struct Solution {
    std::vector<std::pair<std::string, Value>> outputs;
    std::vector<VerifyViolation> violations;
};

// Serialization used by the CLI and by emitted drivers; one JSON record
// per line with keys "outputs" and "violations".
std::string to_jsonl(const Solution& s);
std::string to_text(const Solution& s);
std::string value_to_json(const Value& v);

// Parses a `name=value` command-line literal into a Value.
Value evaluate_literal(const std::string& text);

// Test/driver helper: exact for ints/bools, tolerant for reals.
bool approx_equal(const Value& a, const Value& b, double rel);
bool solutions_equal(const Solution& a, const Solution& b, double rel);

}  // namespace dsp
