#include "dsp/emitter.hpp"

#include <charconv>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

namespace dsp {

namespace {

const std::unordered_set<std::string> kCppKeywords = {
    "alignas", "alignof", "and", "and_eq", "asm", "auto", "bitand", "bitor",
    "bool", "break", "case", "catch", "char", "char8_t", "char16_t", "char32_t",
    "class", "compl", "concept", "const", "consteval", "constexpr", "constinit",
    "const_cast", "continue", "co_await", "co_return", "co_yield", "decltype",
    "default", "delete", "do", "double", "dynamic_cast", "else", "enum",
    "explicit", "export", "extern", "false", "float", "for", "friend", "goto",
    "if", "inline", "int", "long", "mutable", "namespace", "new", "noexcept",
    "not", "not_eq", "nullptr", "operator", "or", "or_eq", "private",
    "protected", "public", "register", "reinterpret_cast", "requires", "return",
    "short", "signed", "sizeof", "static", "static_assert", "static_cast",
    "struct", "switch", "template", "this", "thread_local", "throw", "true",
    "try", "typedef", "typeid", "typename", "union", "unsigned", "using",
    "virtual", "void", "volatile", "wchar_t", "while", "main",
};

std::string cpp_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '\\' || c == '"') out += '\\';
        out += c;
    }
    return out;
}

std::string real_literal(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

const char* dtype_enum(DType t) {
    switch (t) {
        case DType::Real: return "dsp::DType::Real";
        case DType::Int: return "dsp::DType::Int";
        case DType::Bool: return "dsp::DType::Bool";
        case DType::List: return "dsp::DType::List";
        case DType::Any: return "dsp::DType::Any";
    }
    return "dsp::DType::Any";
}

const char* binop_enum(BinOp op) {
    switch (op) {
        case BinOp::Add: return "dsp::BinOp::Add";
        case BinOp::Sub: return "dsp::BinOp::Sub";
        case BinOp::Mul: return "dsp::BinOp::Mul";
        case BinOp::Div: return "dsp::BinOp::Div";
        case BinOp::Pow: return "dsp::BinOp::Pow";
        case BinOp::Le: return "dsp::BinOp::Le";
        case BinOp::Ge: return "dsp::BinOp::Ge";
        case BinOp::Lt: return "dsp::BinOp::Lt";
        case BinOp::Gt: return "dsp::BinOp::Gt";
        case BinOp::Eq: return "dsp::BinOp::Eq";
        case BinOp::Ne: return "dsp::BinOp::Ne";
    }
    return "?";
}

// Assigns collision-free C++ class names: the module name verbatim, with a
// dsp_ prefix when it collides with a C++ keyword or an earlier class.
std::map<std::string, std::string> assign_class_names(const CompiledFile& cf) {
    std::map<std::string, std::string> names;
    std::set<std::string> taken;
    for (const auto& sm : cf.scheduled) {
        const std::string& mod = sm.analyzed.decl.name;
        std::string cls = mod;
        while (kCppKeywords.count(cls) || taken.count(cls)) cls = "dsp_" + cls;
        taken.insert(cls);
        names[mod] = cls;
    }
    return names;
}

// Where a variable lives in the generated class nest.
struct VarPlace {
    enum class Kind { InputField, ModuleCell, MethodCell } kind;
    std::string member;  // v_<name>
};

class Emitter {
public:
    explicit Emitter(const CompiledFile& cf)
        : cf_(cf), class_names_(assign_class_names(cf)) {}

    EmitResult run(const std::string& driver_module) {
        EmitResult out;
        out.files.push_back({"dsp_program.hpp", support_header()});
        for (const auto& sm : cf_.scheduled)
            out.files.push_back(
                {class_names_.at(sm.analyzed.decl.name) + ".hpp", module_header(sm)});
        if (!driver_module.empty())
            out.files.push_back({"main.cpp", driver(driver_module)});
        out.manifest = manifest(driver_module);
        return out;
    }

private:
    const CompiledFile& cf_;
    std::map<std::string, std::string> class_names_;

    // Per-method emission context.
    const ScheduledModule* sm_ = nullptr;
    int method_ = 0;
    std::map<std::string, VarPlace> places_;

    static std::string member_name(const std::string& var) { return "v_" + var; }

    std::string factory_name(const std::string& mod) const {
        return "make_" + class_names_.at(mod);
    }

    std::string factory_signature(const ModuleDecl& decl) const {
        std::ostringstream out;
        out << "std::shared_ptr<dsp::rt::Executable> " << factory_name(decl.name) << "(";
        for (const auto& p : decl.inputs) out << "dsp::Value " << member_name(p.name) << ", ";
        for (const auto& p : decl.outputs)
            out << "dsp::rt::CellPtr " << member_name(p.name) << ", ";
        out << "dsp::rt::ExecPtr cont)";
        return out.str();
    }

    std::string support_header() const {
        std::ostringstream out;
        out << "// Generated by dspc emit; do not edit.\n";
        out << "#pragma once\n\n";
        out << "#include \"dsp/runtime.hpp\"\n\n";
        out << "namespace dspgen {\n\n";
        for (const auto& sm : cf_.scheduled)
            out << factory_signature(sm.analyzed.decl) << ";\n";
        out << "\n}  // namespace dspgen\n";
        return out.str();
    }

    // ------------------------------------------------------------------
    // Expressions

    std::string var_ref(const std::string& name) const {
        const VarPlace& p = places_.at(name);
        switch (p.kind) {
            case VarPlace::Kind::InputField:
                return "m->" + p.member;
            case VarPlace::Kind::ModuleCell:
                return "vm.read(*m->" + p.member + ")";
            case VarPlace::Kind::MethodCell:
                return "vm.read(*" + p.member + ")";
        }
        return "?";
    }

    // Always yields a raw CellPtr expression; method locals are owning
    // CellRef fields, module outputs already raw.
    std::string cell_ref(const std::string& name) const {
        const VarPlace& p = places_.at(name);
        switch (p.kind) {
            case VarPlace::Kind::ModuleCell:
                return "m->" + p.member;
            case VarPlace::Kind::MethodCell:
                return p.member + ".get()";
            case VarPlace::Kind::InputField:
                break;
        }
        throw CompileError("internal: input used as an output cell", {});
    }

    std::string gen_expr(const Expr& e) const {
        switch (e.kind) {
            case Expr::Kind::IntLit:
                return "dsp::Value::integer(" + std::to_string(e.int_val) + ")";
            case Expr::Kind::RealLit:
                return "dsp::Value::real(" + real_literal(e.real_val) + ")";
            case Expr::Kind::BoolLit:
                return std::string("dsp::Value::boolean(") + (e.bool_val ? "true" : "false") +
                       ")";
            case Expr::Kind::Var:
                return var_ref(e.name);
            case Expr::Kind::ListLit: {
                std::string out = "dsp::Value::list(dsp::Value::List{";
                for (std::size_t i = 0; i < e.args.size(); ++i) {
                    if (i) out += ", ";
                    out += gen_expr(*e.args[i]);
                }
                return out + "})";
            }
            case Expr::Kind::Unary:
                return "dsp::ops::neg(" + gen_expr(*e.args[0]) + ")";
            case Expr::Kind::Binary: {
                std::string l = gen_expr(*e.args[0]);
                std::string r = gen_expr(*e.args[1]);
                if (is_comparison(e.op))
                    return std::string("dsp::ops::compare(") + binop_enum(e.op) + ", " + l +
                           ", " + r + ")";
                switch (e.op) {
                    case BinOp::Add: return "dsp::ops::add(" + l + ", " + r + ")";
                    case BinOp::Sub: return "dsp::ops::sub(" + l + ", " + r + ")";
                    case BinOp::Mul: return "dsp::ops::mul(" + l + ", " + r + ")";
                    case BinOp::Div: return "dsp::ops::div(" + l + ", " + r + ")";
                    case BinOp::Pow: return "dsp::ops::pow(" + l + ", " + r + ")";
                    default: break;
                }
                return "?";
            }
            case Expr::Kind::Fn: {
                switch (e.fn) {
                    case BuiltinFn::Sqrt:
                        return "dsp::ops::fn_sqrt(" + gen_expr(*e.args[0]) + ")";
                    case BuiltinFn::Abs:
                        return "dsp::ops::fn_abs(" + gen_expr(*e.args[0]) + ")";
                    case BuiltinFn::Min:
                        return "dsp::ops::fn_min(" + gen_expr(*e.args[0]) + ", " +
                               gen_expr(*e.args[1]) + ")";
                    case BuiltinFn::Max:
                        return "dsp::ops::fn_max(" + gen_expr(*e.args[0]) + ", " +
                               gen_expr(*e.args[1]) + ")";
                }
                return "?";
            }
        }
        return "?";
    }

    // ------------------------------------------------------------------
    // Statements

    DType declared_dtype(const std::string& var) const {
        return sm_->analyzed.methods[method_].symbols.at(var).dtype;
    }

    std::string coerced(const Expr& e, DType to) const {
        return "dsp::ops::coerce(" + gen_expr(e) + ", " + dtype_enum(to) + ")";
    }

    // Constructs a callee goal; builtin generators map onto the runtime
    // primitives, like the interpreter backend does.
    std::string callee_goal(const Stmt& s, const std::vector<std::string>& out_cells,
                            const std::string& cont) const {
        bool user = cf_.registry.count(s.callee) > 0;
        std::ostringstream out;
        if (user) {
            out << factory_name(s.callee) << "(";
            for (const auto& in : s.call_ins) out << gen_expr(*in) << ", ";
            for (const auto& cell : out_cells) out << cell << ", ";
            out << cont << ")";
            return out.str();
        }
        if (s.callee == "for") {
            out << "dsp::rt::make_for(" << coerced(*s.call_ins[0], DType::Real) << ", "
                << coerced(*s.call_ins[1], DType::Real) << ", "
                << coerced(*s.call_ins[2], DType::Real) << ", " << out_cells[0]
                << ", " << cont << ")";
            return out.str();
        }
        out << "dsp::rt::make_select(" << gen_expr(*s.call_ins[0]) << ", " << out_cells[0]
            << ", " << cont << ")";
        return out.str();
    }

    std::size_t callee_out_count(const std::string& callee) const {
        auto sig = callee_signature(callee, cf_.registry);
        return sig ? sig->outputs.size() : 1;
    }

    std::string find_goal(const Stmt& s) const {
        bool user = cf_.registry.count(s.callee) > 0;
        std::ostringstream out;
        if (user) {
            out << factory_name(s.callee) << "(";
            for (const auto& in : s.call_ins) out << gen_expr(*in) << ", ";
            std::size_t n = callee_out_count(s.callee);
            for (std::size_t i = 0; i < n; ++i) out << "fouts[" << i << "], ";
            out << "std::move(k))";
        } else if (s.callee == "for") {
            out << "dsp::rt::make_for(" << coerced(*s.call_ins[0], DType::Real) << ", "
                << coerced(*s.call_ins[1], DType::Real) << ", "
                << coerced(*s.call_ins[2], DType::Real) << ", fouts[0], std::move(k))";
        } else {
            out << "dsp::rt::make_select(" << gen_expr(*s.call_ins[0])
                << ", fouts[0], std::move(k))";
        }
        return out.str();
    }

    void emit_bind(std::ostringstream& out, const std::string& ind, const Stmt& s) const {
        out << ind << "vm.write(" << cell_ref(s.target) << ", "
            << coerced(*s.expr, declared_dtype(s.target)) << ");\n";
    }

    void emit_guard(std::ostringstream& out, const std::string& ind, const Stmt& s) const {
        out << ind << "if (!dsp::ops::truth(" << gen_expr(*s.expr)
            << ")) return dsp::rt::failure();\n";
    }

    void emit_verify(std::ostringstream& out, const std::string& ind, const Stmt& s) const {
        const auto& analysis = sm_->analyzed.methods[method_];
        out << ind << "if (!dsp::ops::truth(" << gen_expr(*s.expr) << ")) {\n";
        out << ind << "    dsp::VerifyViolation viol;\n";
        out << ind << "    viol.condition = \"" << cpp_escape(expr_to_string(*s.expr))
            << "\";\n";
        out << ind << "    viol.method = \"" << sm_->analyzed.decl.name << "."
            << (method_ + 1) << "\";\n";
        for (const auto& name : analysis.snapshot_order) {
            const VarPlace& p = places_.at(name);
            if (p.kind == VarPlace::Kind::InputField) {
                out << ind << "    viol.bindings.emplace_back(\"" << name << "\", m->"
                    << p.member << ");\n";
            } else {
                std::string cell = cell_ref(name);
                out << ind << "    if (" << cell << "->bound()) viol.bindings.emplace_back(\""
                    << name << "\", " << cell << "->peek());\n";
            }
        }
        out << ind << "    vm.log_violation(std::move(viol));\n";
        out << ind << "}\n";
    }

    void emit_find(std::ostringstream& out, const std::string& ind, const Stmt& s) const {
        std::size_t n_outs = callee_out_count(s.callee);
        out << ind << "vm.write(" << cell_ref(s.call_outs[0])
            << ", dsp::rt::find_all(vm, " << n_outs << ",\n"
            << ind
            << "    [&](const std::vector<dsp::rt::CellPtr>& fouts, dsp::rt::ExecPtr k) {\n"
            << ind << "        return " << find_goal(s) << ";\n"
            << ind << "    }));\n";
    }

    // ------------------------------------------------------------------
    // Module layout

    void bind_places(const ScheduledModule& sm, int m) {
        const ModuleDecl& decl = sm.analyzed.decl;
        places_.clear();
        for (const auto& p : decl.inputs)
            places_[p.name] = {VarPlace::Kind::InputField, member_name(p.name)};
        for (const auto& p : decl.outputs)
            places_[p.name] = {VarPlace::Kind::ModuleCell, member_name(p.name)};
        for (const auto& [name, info] : sm.analyzed.methods[m].symbols)
            if (info.origin == SymbolInfo::Origin::Local)
                places_[name] = {VarPlace::Kind::MethodCell, member_name(name)};
    }

    // One continuation unit may be cut into parts by dcall statements:
    // each part after a dcall becomes its own resume class.
    struct UnitPart {
        std::string fn_name;     // cu2, cu2_r3, ...
        std::string class_name;  // Method_1_cu2; empty when merged into exec
        std::vector<int> stmts;
        bool ends_with_dcall = false;
        int unit_index = 0;
    };

    std::vector<UnitPart> split_units(const ScheduledMethod& sched,
                                      const std::vector<Stmt>& stmts, int m) const {
        std::vector<UnitPart> parts;
        for (std::size_t u = 0; u < sched.units.size(); ++u) {
            const ContinuationUnit& cu = sched.units[u];
            std::string base = "cu" + std::to_string(u + 1);
            UnitPart part;
            part.fn_name = base;
            part.class_name = u == 0 ? ""  // first unit merges into the method entry
                                     : "Method_" + std::to_string(m + 1) + "_" + base;
            part.unit_index = static_cast<int>(u);
            for (std::size_t k = 0; k < cu.stmts.size(); ++k) {
                int s = cu.stmts[k];
                if (cu.trailing_generator && s == *cu.trailing_generator) continue;
                part.stmts.push_back(s);
                if (stmts[s].kind == Stmt::Kind::Dcall) {
                    part.ends_with_dcall = true;
                    parts.push_back(part);
                    part = UnitPart{};
                    part.fn_name = base + "_r" + std::to_string(k + 1);
                    part.class_name = "Method_" + std::to_string(m + 1) + "_" + base + "_r" +
                                      std::to_string(k + 1);
                    part.unit_index = static_cast<int>(u);
                }
            }
            parts.push_back(part);
        }
        return parts;
    }

    std::string module_header(const ScheduledModule& sm) {
        sm_ = &sm;
        const ModuleDecl& decl = sm.analyzed.decl;
        const std::string& cls = class_names_.at(decl.name);
        std::ostringstream out;
        out << "// Generated by dspc emit; do not edit.\n";
        out << "#pragma once\n\n";
        out << "#include <memory>\n#include <utility>\n#include <vector>\n\n";
        out << "#include \"dsp_program.hpp\"\n\n";
        out << "namespace dspgen {\n\n";
        out << "class " << cls << " final\n";
        out << "    : public dsp::rt::Executable,\n";
        out << "      public std::enable_shared_from_this<" << cls << "> {\n";
        out << "public:\n";
        for (const auto& p : decl.inputs)
            out << "    dsp::Value " << member_name(p.name) << ";\n";
        for (const auto& p : decl.outputs)
            out << "    dsp::rt::CellPtr " << member_name(p.name) << ";\n";
        out << "    dsp::rt::ExecPtr cont;\n\n";

        // Inputs are plain values, outputs caller-owned cells; inputs are
        // coerced into their declared types on construction, mirroring
        // activation in the interpreter backend.
        out << "    " << cls << "(";
        bool first = true;
        for (const auto& p : decl.inputs) {
            if (!first) out << ", ";
            first = false;
            out << "dsp::Value " << member_name(p.name) << "_";
        }
        for (const auto& p : decl.outputs) {
            if (!first) out << ", ";
            first = false;
            out << "dsp::rt::CellPtr " << member_name(p.name) << "_";
        }
        if (!first) out << ", ";
        out << "dsp::rt::ExecPtr cont_)\n        : ";
        first = true;
        for (const auto& p : decl.inputs) {
            if (!first) out << ",\n          ";
            first = false;
            out << member_name(p.name) << "(dsp::ops::coerce(std::move(" << member_name(p.name)
                << "_), " << dtype_enum(p.dtype) << "))";
        }
        for (const auto& p : decl.outputs) {
            if (!first) out << ",\n          ";
            first = false;
            out << member_name(p.name) << "(" << member_name(p.name) << "_)";
        }
        if (!first) out << ",\n          ";
        out << "cont(std::move(cont_)) {}\n\n";

        // Entry: run method 1 with methods 2..n as stacked alternatives.
        out << "    dsp::rt::ExecPtr exec(dsp::rt::Vm& vm) override {\n";
        out << "        auto self = shared_from_this();\n";
        if (decl.methods.size() > 1)
            out << "        vm.push_choice(std::make_shared<Method_2_alt>(self));\n";
        out << "        return std::make_shared<Method_1>(self)->exec(vm);\n";
        out << "    }\n";

        for (std::size_t m = 0; m < decl.methods.size(); ++m) out << method_class(sm, m);

        for (std::size_t m = 1; m < decl.methods.size(); ++m) {
            out << "\n    class Method_" << (m + 1)
                << "_alt final : public dsp::rt::Executable {\n";
            out << "    public:\n";
            out << "        std::shared_ptr<" << cls << "> m;\n";
            out << "        explicit Method_" << (m + 1) << "_alt(std::shared_ptr<" << cls
                << "> m_) : m(std::move(m_)) {}\n";
            out << "        dsp::rt::ExecPtr exec(dsp::rt::Vm& vm) override {\n";
            if (m + 1 < decl.methods.size())
                out << "            vm.push_choice(std::make_shared<Method_" << (m + 2)
                    << "_alt>(m));\n";
            out << "            return std::make_shared<Method_" << (m + 1)
                << ">(m)->exec(vm);\n";
            out << "        }\n    };\n";
        }

        out << "};\n\n";
        out << "inline " << factory_signature(decl) << " {\n    return std::make_shared<"
            << cls << ">(";
        first = true;
        for (const auto& p : decl.inputs) {
            if (!first) out << ", ";
            first = false;
            out << "std::move(" << member_name(p.name) << ")";
        }
        for (const auto& p : decl.outputs) {
            if (!first) out << ", ";
            first = false;
            out << member_name(p.name);
        }
        if (!first) out << ", ";
        out << "std::move(cont));\n}\n\n";
        out << "}  // namespace dspgen\n";
        return out.str();
    }

    std::string method_class(const ScheduledModule& sm, std::size_t m) {
        method_ = static_cast<int>(m);
        bind_places(sm, method_);

        const ModuleDecl& decl = sm.analyzed.decl;
        const std::string& cls = class_names_.at(decl.name);
        const MethodDecl& method = decl.methods[m];
        const MethodAnalysis& analysis = sm.analyzed.methods[m];
        const ScheduledMethod& sched = sm.methods[m];
        std::string mname = "Method_" + std::to_string(m + 1);

        std::vector<UnitPart> parts = split_units(sched, method.statements, static_cast<int>(m));

        std::ostringstream out;
        out << "\n    class " << mname << " final\n";
        out << "        : public dsp::rt::Executable,\n";
        out << "          public std::enable_shared_from_this<" << mname << "> {\n";
        out << "    public:\n";
        out << "        std::shared_ptr<" << cls << "> m;\n";
        for (const auto& name : analysis.snapshot_order) {
            if (analysis.symbols.at(name).origin == SymbolInfo::Origin::Local)
                out << "        dsp::rt::CellRef " << member_name(name)
                    << " = dsp::rt::make_cell();\n";
        }
        out << "\n        explicit " << mname << "(std::shared_ptr<" << cls
            << "> m_) : m(std::move(m_)) {}\n\n";
        out << "        dsp::rt::ExecPtr exec(dsp::rt::Vm& vm) override { return cu1(vm); }\n";

        for (const auto& part : parts) {
            if (part.class_name.empty()) continue;
            out << "\n        class " << part.class_name
                << " final : public dsp::rt::Executable {\n";
            out << "        public:\n";
            out << "            std::shared_ptr<" << mname << "> mm;\n";
            out << "            explicit " << part.class_name << "(std::shared_ptr<" << mname
                << "> mm_) : mm(std::move(mm_)) {}\n";
            out << "            dsp::rt::ExecPtr exec(dsp::rt::Vm& vm) override { return mm->"
                << part.fn_name << "(vm); }\n";
            out << "        };\n";
        }

        for (std::size_t p = 0; p < parts.size(); ++p) out << unit_body(sm, m, parts, p);

        out << "    };\n";
        return out.str();
    }

    std::string unit_body(const ScheduledModule& sm, std::size_t m,
                          const std::vector<UnitPart>& parts, std::size_t pi) {
        const MethodDecl& method = sm.analyzed.decl.methods[m];
        const ScheduledMethod& sched = sm.methods[m];
        const UnitPart& part = parts[pi];
        const std::string ind = "            ";

        std::ostringstream out;
        out << "\n        dsp::rt::ExecPtr " << part.fn_name << "(dsp::rt::Vm& vm) {\n";
        for (std::size_t k = 0; k < part.stmts.size(); ++k) {
            const Stmt& s = method.statements[part.stmts[k]];
            switch (s.kind) {
                case Stmt::Kind::Bind: emit_bind(out, ind, s); break;
                case Stmt::Kind::When:
                case Stmt::Kind::Test: emit_guard(out, ind, s); break;
                case Stmt::Kind::Verify: emit_verify(out, ind, s); break;
                case Stmt::Kind::Find: emit_find(out, ind, s); break;
                case Stmt::Kind::Dcall: {
                    const UnitPart& next = parts[pi + 1];
                    std::vector<std::string> out_cells;
                    for (const auto& name : s.call_outs) out_cells.push_back(cell_ref(name));
                    out << ind << "return "
                        << callee_goal(s, out_cells,
                                       "dsp::rt::make_commit(vm.depth(), std::make_shared<" +
                                           next.class_name + ">(shared_from_this()))")
                        << ";\n";
                    out << "        }\n";
                    return out.str();
                }
                case Stmt::Kind::Call:
                    break;  // call only trails a unit
            }
        }

        const ContinuationUnit& cu = sched.units[part.unit_index];
        std::string next_goal =
            static_cast<std::size_t>(part.unit_index) + 1 < sched.units.size()
                ? "std::make_shared<Method_" + std::to_string(m + 1) + "_cu" +
                      std::to_string(part.unit_index + 2) + ">(shared_from_this())"
                : "m->cont";
        if (!cu.trailing_generator) {
            out << ind << "return " << next_goal << ";\n";
        } else {
            const Stmt& g = method.statements[*cu.trailing_generator];
            if (g.kind == Stmt::Kind::Bind && g.rhs_kind == Stmt::BindRhs::For) {
                DType t = declared_dtype(g.target);
                out << ind << "return dsp::rt::make_for(" << coerced(*g.gen_args[0], t) << ", "
                    << coerced(*g.gen_args[1], t) << ", " << coerced(*g.gen_args[2], t) << ", "
                    << cell_ref(g.target) << ", " << next_goal << ");\n";
            } else if (g.kind == Stmt::Kind::Bind && g.rhs_kind == Stmt::BindRhs::Select) {
                out << ind << "return dsp::rt::make_select(" << gen_expr(*g.gen_args[0]) << ", "
                    << cell_ref(g.target) << ", " << next_goal << ", "
                    << dtype_enum(declared_dtype(g.target)) << ");\n";
            } else {
                std::vector<std::string> out_cells;
                for (const auto& name : g.call_outs) out_cells.push_back(cell_ref(name));
                out << ind << "return " << callee_goal(g, out_cells, next_goal) << ";\n";
            }
        }
        out << "        }\n";
        return out.str();
    }

    // ------------------------------------------------------------------
    // Driver and manifest

    std::string driver(const std::string& module) const {
        const ScheduledModule* sm = cf_.find_scheduled(module);
        const ModuleDecl& decl = sm->analyzed.decl;
        std::ostringstream out;
        out << "// Generated by dspc emit; do not edit.\n";
        out << "#include <cstdlib>\n#include <iostream>\n#include <map>\n#include <string>\n\n";
        for (const auto& other : cf_.scheduled)
            out << "#include \"" << class_names_.at(other.analyzed.decl.name) << ".hpp\"\n";
        out << "\nint main(int argc, char** argv) {\n";
        out << "    std::map<std::string, dsp::Value> args;\n";
        out << "    long limit = -1;\n";
        out << "    for (int i = 1; i < argc; ++i) {\n";
        out << "        std::string a = argv[i];\n";
        out << "        if (a == \"--limit\" && i + 1 < argc) {\n";
        out << "            limit = std::atol(argv[++i]);\n";
        out << "            continue;\n";
        out << "        }\n";
        out << "        auto eq = a.find('=');\n";
        out << "        if (eq == std::string::npos) {\n";
        out << "            std::cerr << \"usage: name=value ... [--limit N]\\n\";\n";
        out << "            return 2;\n";
        out << "        }\n";
        out << "        args[a.substr(0, eq)] = dsp::evaluate_literal(a.substr(eq + 1));\n";
        out << "    }\n";
        out << "    try {\n";
        for (const auto& p : decl.inputs) {
            out << "        if (!args.count(\"" << p.name << "\")) {\n";
            out << "            std::cerr << \"missing input " << p.name << "\\n\";\n";
            out << "            return 2;\n";
            out << "        }\n";
        }
        for (const auto& p : decl.outputs)
            out << "        auto " << member_name(p.name) << " = dsp::rt::make_cell();\n";
        out << "        dsp::rt::Vm vm;\n";
        out << "        auto goal = dspgen::" << factory_name(module) << "(";
        for (const auto& p : decl.inputs) out << "args.at(\"" << p.name << "\"), ";
        for (const auto& p : decl.outputs) out << member_name(p.name) << ".get(), ";
        out << "dsp::rt::success());\n";
        out << "        long n = 0;\n";
        out << "        bool any = false;\n";
        out << "        for (bool s = vm.call(goal); s; s = vm.redo()) {\n";
        out << "            any = true;\n";
        out << "            dsp::Solution sol;\n";
        for (const auto& p : decl.outputs)
            out << "            sol.outputs.emplace_back(\"" << p.name << "\", "
                << member_name(p.name) << "->peek());\n";
        out << "            sol.violations = vm.take_violations();\n";
        out << "            std::cout << dsp::to_jsonl(sol) << \"\\n\";\n";
        out << "            if (limit >= 0 && ++n >= limit) break;\n";
        out << "        }\n";
        out << "        return any ? 0 : 1;\n";
        out << "    } catch (const std::exception& e) {\n";
        out << "        std::cerr << e.what() << \"\\n\";\n";
        out << "        return 2;\n";
        out << "    }\n";
        out << "}\n";
        return out.str();
    }

    std::string manifest(const std::string& driver_module) const {
        nlohmann::ordered_json j;
        j["language"] = "c++20";
        j["namespace"] = "dspgen";
        nlohmann::ordered_json mods = nlohmann::ordered_json::array();
        for (const auto& sm : cf_.scheduled) {
            const ModuleDecl& decl = sm.analyzed.decl;
            nlohmann::ordered_json mj;
            mj["name"] = decl.name;
            mj["class"] = class_names_.at(decl.name);
            mj["header"] = class_names_.at(decl.name) + ".hpp";
            auto params = [](const std::vector<ParamDecl>& ps) {
                nlohmann::ordered_json arr = nlohmann::ordered_json::array();
                for (const auto& p : ps) {
                    nlohmann::ordered_json e;
                    e["name"] = p.name;
                    e["type"] = dtype_name(p.dtype);
                    arr.push_back(e);
                }
                return arr;
            };
            mj["inputs"] = params(decl.inputs);
            mj["outputs"] = params(decl.outputs);
            mods.push_back(mj);
        }
        j["modules"] = mods;
        j["support"] = {"dsp_program.hpp"};
        if (!driver_module.empty()) {
            j["driver"] = "main.cpp";
            j["driver_module"] = driver_module;
        }
        nlohmann::ordered_json rt;
        rt["library"] = "dsp_core";
        rt["headers"] = {"dsp/runtime.hpp", "dsp/value.hpp"};
        rt["standard"] = "c++20";
        j["runtime"] = rt;
        return j.dump(2) + "\n";
    }
};

}  // namespace

EmitResult emit_program(const CompiledFile& cf, const std::string& driver_module) {
    if (!cf.ok) throw CompileError("cannot emit: compilation failed", {});
    if (!driver_module.empty() && !cf.find_scheduled(driver_module))
        throw CompileError("cannot emit driver: no module named '" + driver_module + "'", {});
    return Emitter(cf).run(driver_module);
}

}  // namespace dsp
