#include <fstream>
#include <sstream>

#include "doctest.h"
#include "dsp/parser.hpp"
#include "helpers.hpp"

using namespace dsp;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const char* kQuarterSource = R"(
pointInQuarterCircle({R : real},
                     {X : real, Y : real})
  method
    X : real = for(0.0, R, 1.0);
    Y : real = for(0.0, R, 1.0);
    D : real = sqrt(X^2 + Y^2);
    test(D =< R);
  end method;
end module;
)";

const char* kForSource = R"(
for({B : real, E : real, S : real}, {N : real})
  method
    when(B =< E);
    N : real = B;
  end method;
  method
    when(B+S =< E);
    B1 : real = B+S;
    call(for, {B1, E, S}, {N});
  end method;
end;
)";

}  // namespace

TEST_CASE("tokenize a generator binding, dropping the comment") {
    auto toks = tokenize("X : real = for(0.0, R, 1.0); --(c)");
    std::vector<Tok> kinds;
    for (const auto& t : toks) kinds.push_back(t.kind);
    CHECK(kinds == std::vector<Tok>{Tok::Ident, Tok::Colon, Tok::Ident, Tok::Eq,
                                    Tok::Ident, Tok::LParen, Tok::RealLit, Tok::Comma,
                                    Tok::Ident, Tok::Comma, Tok::RealLit, Tok::RParen,
                                    Tok::Semi, Tok::Eof});
    CHECK(toks[0].text == "X");
    CHECK(toks[6].real_val == 0.0);
    CHECK(toks[6].pos.col == 16);
}

TEST_CASE("tokenize empty input") {
    auto toks = tokenize("");
    REQUIRE(toks.size() == 1);
    CHECK(toks[0].kind == Tok::Eof);
}

TEST_CASE("malformed number is a lex error with a position") {
    CHECK_THROWS_AS(tokenize("0..5"), LexError);
    try {
        tokenize("X : real =\n 0..5;");
    } catch (const LexError& e) {
        CHECK(e.pos.line == 2);
        CHECK(e.pos.col == 2);
    }
}

TEST_CASE("comparison tokens") {
    auto toks = tokenize("=< >= < > = \\=");
    CHECK(toks[0].kind == Tok::Le);
    CHECK(toks[1].kind == Tok::Ge);
    CHECK(toks[2].kind == Tok::Lt);
    CHECK(toks[3].kind == Tok::Gt);
    CHECK(toks[4].kind == Tok::Eq);
    CHECK(toks[5].kind == Tok::Ne);
}

TEST_CASE("parse the quarter circle module") {
    auto mods = parse_source(kQuarterSource);
    REQUIRE(mods.size() == 1);
    const ModuleDecl& m = mods[0];
    CHECK(m.name == "pointInQuarterCircle");
    REQUIRE(m.inputs.size() == 1);
    CHECK(m.inputs[0].name == "R");
    CHECK(m.inputs[0].dtype == DType::Real);
    REQUIRE(m.outputs.size() == 2);
    CHECK(m.outputs[0].name == "X");
    CHECK(m.outputs[1].name == "Y");
    REQUIRE(m.methods.size() == 1);
    REQUIRE(m.methods[0].statements.size() == 4);
    const auto& st = m.methods[0].statements;
    CHECK(st[0].kind == Stmt::Kind::Bind);
    CHECK(st[0].rhs_kind == Stmt::BindRhs::For);
    CHECK(st[1].target == "Y");
    CHECK(st[2].rhs_kind == Stmt::BindRhs::Expr);
    CHECK(st[3].kind == Stmt::Kind::Test);
}

TEST_CASE("parse the recursive for module") {
    auto mods = parse_source(kForSource);
    REQUIRE(mods.size() == 1);
    const ModuleDecl& m = mods[0];
    CHECK(m.name == "for");
    CHECK(m.inputs.size() == 3);
    CHECK(m.outputs.size() == 1);
    REQUIRE(m.methods.size() == 2);
    const auto& m2 = m.methods[1].statements;
    REQUIRE(m2.size() == 3);
    CHECK(m2[0].kind == Stmt::Kind::When);
    CHECK(m2[2].kind == Stmt::Kind::Call);
    CHECK(m2[2].callee == "for");
    CHECK(m2[2].call_ins.size() == 3);
    CHECK(m2[2].call_outs == std::vector<std::string>{"N"});
}

TEST_CASE("a module needs at least one method") {
    CHECK_THROWS_AS(parse_source("m({A : real}, {B : real}) end module;"), ParseError);
}

TEST_CASE("statement order is preserved exactly as written") {
    const char* shuffled = R"(
m({R : real}, {X : real, Y : real})
  method
    test(D =< R);
    D : real = sqrt(X^2 + Y^2);
    Y : real = for(0.0, R, 1.0);
    X : real = for(0.0, R, 1.0);
  end method;
end;
)";
    auto mods = parse_source(shuffled);
    const auto& st = mods[0].methods[0].statements;
    CHECK(st[0].kind == Stmt::Kind::Test);
    CHECK(st[1].target == "D");
    CHECK(st[2].target == "Y");
    CHECK(st[3].target == "X");
}

TEST_CASE("precedence: ^ over unary minus over * over + over comparisons") {
    auto e = parse_literal_expr("-2^2");
    CHECK(expr_to_string(*e) == "-2 ^ 2");  // -(2^2)
    CHECK(e->kind == Expr::Kind::Unary);

    auto mods = parse_source(
        "m({X : real, Y : real}, {D : real})\n"
        "  method\n"
        "    D : real = sqrt(X^2 + Y^2);\n"
        "  end method;\nend;\n");
    const Expr& rhs = *mods[0].methods[0].statements[0].expr;
    REQUIRE(rhs.kind == Expr::Kind::Fn);
    const Expr& sum = *rhs.args[0];
    REQUIRE(sum.kind == Expr::Kind::Binary);
    CHECK(sum.op == BinOp::Add);  // (X^2) + (Y^2)
    CHECK(sum.args[0]->op == BinOp::Pow);
    CHECK(sum.args[1]->op == BinOp::Pow);
}

TEST_CASE("power is right-associative") {
    auto e = parse_literal_expr("2^3^2");
    REQUIRE(e->op == BinOp::Pow);
    CHECK(e->args[0]->kind == Expr::Kind::IntLit);
    CHECK(e->args[1]->op == BinOp::Pow);
}

TEST_CASE("comparisons do not chain") {
    CHECK_THROWS_AS(parse_source("m({A : real}, {B : bool})\n  method\n"
                                 "    B : bool = 1 < A < 2;\n  end method;\nend;"),
                    ParseError);
}

TEST_CASE("both module terminators are accepted") {
    CHECK_NOTHROW(parse_source("m({A : real}, {B : real})\n  method\n    B : real = A;\n"
                               "  end method;\nend module;"));
    CHECK_NOTHROW(parse_source("m({A : real}, {B : real})\n  method\n    B : real = A;\n"
                               "  end method;\nend;"));
}

TEST_CASE("duplicate parameter names are rejected") {
    CHECK_THROWS_AS(parse_source("m({A : real}, {A : real})\n  method\n  end method;\nend;"),
                    ParseError);
}

TEST_CASE("parse errors carry the offending position") {
    try {
        parse_source("m({A : real}, {B : real})\n  method\n    B : real = ;\n"
                     "  end method;\nend;");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.pos.line == 3);
        CHECK(std::string(e.what()).find("expected") != std::string::npos);
    }
}

TEST_CASE("select accepts a list literal or a list variable") {
    auto mods = parse_source(
        "m({L : list}, {X : int, Y : int})\n"
        "  method\n"
        "    X : int = select([1, 2, 3]);\n"
        "    Y : int = select(L);\n"
        "  end method;\nend;\n");
    const auto& st = mods[0].methods[0].statements;
    CHECK(st[0].rhs_kind == Stmt::BindRhs::Select);
    CHECK(st[0].gen_args[0]->kind == Expr::Kind::ListLit);
    CHECK(st[1].gen_args[0]->kind == Expr::Kind::Var);
}

TEST_CASE("pretty-print round trip of every corpus file") {
    for (const char* file : {"quarter.dsp", "for.dsp", "nqueens.dsp", "plan.dsp",
                             "ack.dsp", "ack_nocut.dsp", "tarai.dsp", "tarai_nocut.dsp"}) {
        auto mods = parse_source(read_file(std::string("corpus/") + file));
        for (const auto& m : mods) {
            std::string printed = module_to_string(m);
            auto reparsed = parse_source(printed);
            REQUIRE(reparsed.size() == 1);
            CHECK(module_to_string(reparsed[0]) == printed);
        }
    }
}

TEST_CASE("lex and parse errors stay within the source span") {
    const std::string bad[] = {
        "m({A : real}, {B : real}) method B : real = @; end method; end;",
        "m({A : real}, {B : real}) method B : ; end method; end;",
        "m(",
        "0..5",
    };
    for (const auto& src : bad) {
        int lines = 1;
        for (char c : src)
            if (c == '\n') ++lines;
        try {
            parse_source(src);
            FAIL("expected an error for: ", src);
        } catch (const CompileError& e) {
            CHECK(e.pos.line >= 1);
            CHECK(e.pos.line <= lines);
            CHECK(e.pos.col >= 1);
        }
    }
}
