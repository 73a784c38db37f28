#include "dsp/parser.hpp"

#include <set>
#include <unordered_set>

namespace dsp {

namespace {

const std::unordered_set<std::string> kReserved = {
    "end", "method", "module", "real", "int", "bool", "list", "true", "false",
};

// Recursive descent over the token stream. Statement keywords (when, test,
// verify, call, dcall, find) and the generator names (for, select) stay
// contextual: they act as keywords only when followed by '('.
class Parser {
public:
    Parser(const std::vector<Token>& toks, std::size_t cursor)
        : toks_(toks), i_(cursor) {}

    std::size_t cursor() const { return i_; }

    ModuleDecl module() {
        ModuleDecl m;
        Token name = expect(Tok::Ident, "module name");
        reject_reserved(name);
        m.name = name.text;
        m.pos = name.pos;
        expect(Tok::LParen, "'(' after module name");
        m.inputs = params();
        expect(Tok::Comma, "',' between input and output parameter lists");
        m.outputs = params();
        expect(Tok::RParen, "')' after module signature");
        check_distinct_params(m);
        while (at_ident("method")) m.methods.push_back(method());
        if (m.methods.empty())
            throw ParseError("module '" + m.name + "' has no methods", peek().pos);
        expect_ident("end", "'end' closing module '" + m.name + "'");
        if (at_ident("module")) advance();
        expect(Tok::Semi, "';' after 'end'");
        return m;
    }

private:
    const std::vector<Token>& toks_;
    std::size_t i_;

    const Token& peek(std::size_t ahead = 0) const {
        std::size_t k = i_ + ahead;
        if (k >= toks_.size()) k = toks_.size() - 1;  // Eof token
        return toks_[k];
    }
    const Token& advance() { return toks_[i_ >= toks_.size() - 1 ? i_ : i_++]; }

    bool at(Tok k) const { return peek().kind == k; }
    bool at_ident(const std::string& word, std::size_t ahead = 0) const {
        return peek(ahead).kind == Tok::Ident && peek(ahead).text == word;
    }

    [[noreturn]] void fail(const std::string& expected) const {
        const Token& t = peek();
        std::string found = t.kind == Tok::Eof
                                ? std::string(token_name(Tok::Eof))
                                : "'" + t.text + "'";
        throw ParseError("expected " + expected + ", found " + found, t.pos);
    }

    Token expect(Tok k, const std::string& what) {
        if (!at(k)) fail(what);
        return advance();
    }
    Token expect_ident(const std::string& word, const std::string& what) {
        if (!at_ident(word)) fail(what);
        return advance();
    }

    void reject_reserved(const Token& name) {
        if (kReserved.count(name.text))
            throw ParseError("'" + name.text + "' is a reserved word", name.pos);
    }

    void check_distinct_params(const ModuleDecl& m) {
        std::set<std::string> seen;
        auto visit = [&](const ParamDecl& p) {
            if (!seen.insert(p.name).second)
                throw ParseError("duplicate parameter name '" + p.name +
                                     "' in signature of module '" + m.name + "'",
                                 p.pos);
        };
        for (const auto& p : m.inputs) visit(p);
        for (const auto& p : m.outputs) visit(p);
    }

    std::vector<ParamDecl> params() {
        expect(Tok::LBrace, "'{' opening a parameter list");
        std::vector<ParamDecl> ps;
        if (!at(Tok::RBrace)) {
            for (;;) {
                ParamDecl p;
                Token name = expect(Tok::Ident, "parameter name");
                reject_reserved(name);
                p.name = name.text;
                p.pos = name.pos;
                expect(Tok::Colon, "':' after parameter name");
                p.dtype = dtype();
                ps.push_back(std::move(p));
                if (!at(Tok::Comma)) break;
                advance();
            }
        }
        expect(Tok::RBrace, "'}' closing a parameter list");
        return ps;
    }

    DType dtype() {
        Token t = expect(Tok::Ident, "type name (real, int, bool, or list)");
        if (t.text == "real") return DType::Real;
        if (t.text == "int") return DType::Int;
        if (t.text == "bool") return DType::Bool;
        if (t.text == "list") return DType::List;
        throw ParseError("unknown type '" + t.text + "'", t.pos);
    }

    MethodDecl method() {
        MethodDecl m;
        m.pos = expect_ident("method", "'method'").pos;
        while (!at_ident("end")) {
            if (at(Tok::Eof)) fail("a statement or 'end method;'");
            m.statements.push_back(stmt());
        }
        advance();  // end
        expect_ident("method", "'method' after 'end'");
        expect(Tok::Semi, "';' after 'end method'");
        return m;
    }

    bool at_keyword_call(const char* word) const {
        return at_ident(word) && peek(1).kind == Tok::LParen;
    }

    Stmt stmt() {
        Stmt s;
        s.pos = peek().pos;
        if (at_keyword_call("when") || at_keyword_call("test") ||
            at_keyword_call("verify")) {
            std::string word = advance().text;
            s.kind = word == "when"   ? Stmt::Kind::When
                     : word == "test" ? Stmt::Kind::Test
                                      : Stmt::Kind::Verify;
            expect(Tok::LParen, "'('");
            s.expr = expr();
            expect(Tok::RParen, "')' closing condition");
            expect(Tok::Semi, "';'");
            return s;
        }
        if (at_keyword_call("call") || at_keyword_call("dcall")) {
            s.kind = advance().text == "call" ? Stmt::Kind::Call : Stmt::Kind::Dcall;
            expect(Tok::LParen, "'('");
            Token callee = expect(Tok::Ident, "callee module name");
            s.callee = callee.text;
            expect(Tok::Comma, "',' after callee name");
            s.call_ins = expr_vector();
            expect(Tok::Comma, "',' before output list");
            s.call_outs = name_vector();
            expect(Tok::RParen, "')'");
            expect(Tok::Semi, "';'");
            return s;
        }
        if (at_keyword_call("find")) {
            advance();
            s.kind = Stmt::Kind::Find;
            expect(Tok::LParen, "'('");
            Token callee = expect(Tok::Ident, "callee module name");
            s.callee = callee.text;
            expect(Tok::Comma, "',' after callee name");
            s.call_ins = expr_vector();
            expect(Tok::Comma, "',' before output list name");
            Token out = expect(Tok::Ident, "output list variable");
            reject_reserved(out);
            s.call_outs.push_back(out.text);
            expect(Tok::RParen, "')'");
            expect(Tok::Semi, "';'");
            return s;
        }
        // Binding: NAME : type = rhs ;
        Token target = expect(Tok::Ident, "a statement");
        reject_reserved(target);
        s.kind = Stmt::Kind::Bind;
        s.target = target.text;
        expect(Tok::Colon, "':' after variable name");
        s.dtype = dtype();
        expect(Tok::Eq, "'=' in binding");
        if (at_keyword_call("for")) {
            advance();
            s.rhs_kind = Stmt::BindRhs::For;
            expect(Tok::LParen, "'('");
            s.gen_args.push_back(expr());
            expect(Tok::Comma, "',' after lower bound");
            s.gen_args.push_back(expr());
            expect(Tok::Comma, "',' after upper bound");
            s.gen_args.push_back(expr());
            expect(Tok::RParen, "')'");
        } else if (at_keyword_call("select")) {
            advance();
            s.rhs_kind = Stmt::BindRhs::Select;
            expect(Tok::LParen, "'('");
            s.gen_args.push_back(expr());
            expect(Tok::RParen, "')'");
        } else {
            s.rhs_kind = Stmt::BindRhs::Expr;
            s.expr = expr();
        }
        expect(Tok::Semi, "';'");
        return s;
    }

    // `{e1, e2, ...}` — inputs of a call site.
    std::vector<ExprPtr> expr_vector() {
        expect(Tok::LBrace, "'{' opening input vector");
        std::vector<ExprPtr> es;
        if (!at(Tok::RBrace)) {
            for (;;) {
                es.push_back(expr());
                if (!at(Tok::Comma)) break;
                advance();
            }
        }
        expect(Tok::RBrace, "'}' closing input vector");
        return es;
    }

    // `{V1, V2, ...}` — output variables of a call site.
    std::vector<std::string> name_vector() {
        expect(Tok::LBrace, "'{' opening output vector");
        std::vector<std::string> ns;
        if (!at(Tok::RBrace)) {
            for (;;) {
                Token t = expect(Tok::Ident, "output variable name");
                reject_reserved(t);
                ns.push_back(t.text);
                if (!at(Tok::Comma)) break;
                advance();
            }
        }
        expect(Tok::RBrace, "'}' closing output vector");
        return ns;
    }

public:
    // expr := additive (compop additive)?   — comparisons do not chain
    ExprPtr expr() {
        ExprPtr lhs = additive();
        BinOp op;
        if (comparison_op(op)) {
            Position p = advance().pos;
            ExprPtr rhs = additive();
            return make_binary(op, std::move(lhs), std::move(rhs), p);
        }
        return lhs;
    }

private:
    bool comparison_op(BinOp& op) const {
        switch (peek().kind) {
            case Tok::Le: op = BinOp::Le; return true;
            case Tok::Ge: op = BinOp::Ge; return true;
            case Tok::Lt: op = BinOp::Lt; return true;
            case Tok::Gt: op = BinOp::Gt; return true;
            case Tok::Eq: op = BinOp::Eq; return true;
            case Tok::Ne: op = BinOp::Ne; return true;
            default: return false;
        }
    }

    ExprPtr additive() {
        ExprPtr lhs = multiplicative();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            BinOp op = at(Tok::Plus) ? BinOp::Add : BinOp::Sub;
            Position p = advance().pos;
            lhs = make_binary(op, std::move(lhs), multiplicative(), p);
        }
        return lhs;
    }

    ExprPtr multiplicative() {
        ExprPtr lhs = unary();
        while (at(Tok::Star) || at(Tok::Slash)) {
            BinOp op = at(Tok::Star) ? BinOp::Mul : BinOp::Div;
            Position p = advance().pos;
            lhs = make_binary(op, std::move(lhs), unary(), p);
        }
        return lhs;
    }

    ExprPtr unary() {
        if (at(Tok::Minus)) {
            Position p = advance().pos;
            return make_unary(unary(), p);
        }
        return power();
    }

    // '^' binds tighter than unary minus and associates right; its
    // exponent may itself start with a sign.
    ExprPtr power() {
        ExprPtr base = primary();
        if (at(Tok::Caret)) {
            Position p = advance().pos;
            return make_binary(BinOp::Pow, std::move(base), unary(), p);
        }
        return base;
    }

    ExprPtr primary() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::IntLit: {
                advance();
                return make_int(t.int_val, t.pos);
            }
            case Tok::RealLit: {
                advance();
                return make_real(t.real_val, t.pos);
            }
            case Tok::LParen: {
                advance();
                ExprPtr e = expr();
                expect(Tok::RParen, "')'");
                return e;
            }
            case Tok::LBracket: {
                Position p = advance().pos;
                std::vector<ExprPtr> elems;
                if (!at(Tok::RBracket)) {
                    for (;;) {
                        elems.push_back(expr());
                        if (!at(Tok::Comma)) break;
                        advance();
                    }
                }
                expect(Tok::RBracket, "']' closing list literal");
                return make_list(std::move(elems), p);
            }
            case Tok::Ident: {
                if (t.text == "true" || t.text == "false") {
                    advance();
                    return make_bool(t.text == "true", t.pos);
                }
                if (peek(1).kind == Tok::LParen) return fn_call();
                if (kReserved.count(t.text)) fail("an expression");
                advance();
                return make_var(t.text, t.pos);
            }
            default:
                fail("an expression");
        }
    }

    ExprPtr fn_call() {
        Token name = advance();
        BuiltinFn fn;
        std::size_t arity;
        if (name.text == "sqrt") {
            fn = BuiltinFn::Sqrt;
            arity = 1;
        } else if (name.text == "abs") {
            fn = BuiltinFn::Abs;
            arity = 1;
        } else if (name.text == "min") {
            fn = BuiltinFn::Min;
            arity = 2;
        } else if (name.text == "max") {
            fn = BuiltinFn::Max;
            arity = 2;
        } else {
            throw ParseError("unknown function '" + name.text +
                                 "' (modules are invoked with call, dcall, or find)",
                             name.pos);
        }
        expect(Tok::LParen, "'('");
        std::vector<ExprPtr> args;
        if (!at(Tok::RParen)) {
            for (;;) {
                args.push_back(expr());
                if (!at(Tok::Comma)) break;
                advance();
            }
        }
        expect(Tok::RParen, "')'");
        if (args.size() != arity)
            throw ParseError("function '" + name.text + "' takes " +
                                 std::to_string(arity) + " argument(s), got " +
                                 std::to_string(args.size()),
                             name.pos);
        return make_fn(fn, std::move(args), name.pos);
    }
};

}  // namespace

ModuleDecl parse_module(const std::vector<Token>& tokens, std::size_t& cursor) {
    Parser p(tokens, cursor);
    ModuleDecl m = p.module();
    cursor = p.cursor();
    return m;
}

std::vector<ModuleDecl> parse_file(const std::vector<Token>& tokens) {
    std::vector<ModuleDecl> mods;
    std::size_t cursor = 0;
    while (cursor < tokens.size() && tokens[cursor].kind != Tok::Eof)
        mods.push_back(parse_module(tokens, cursor));
    if (mods.empty())
        throw ParseError("no modules in input", tokens.empty() ? Position{} : tokens.back().pos);
    return mods;
}

std::vector<ModuleDecl> parse_source(const std::string& source) {
    return parse_file(tokenize(source));
}

ExprPtr parse_literal_expr(const std::string& text) {
    auto toks = tokenize(text);
    Parser p(toks, 0);
    ExprPtr e = p.expr();
    if (toks[p.cursor()].kind != Tok::Eof)
        throw ParseError("trailing characters after literal", toks[p.cursor()].pos);
    return e;
}

}  // namespace dsp
