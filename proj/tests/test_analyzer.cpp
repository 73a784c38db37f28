#include <algorithm>

#include "doctest.h"
#include "dsp/analyzer.hpp"
#include "dsp/parser.hpp"
#include "helpers.hpp"

using namespace dsp;

namespace {

AnalyzeResult analyze_first(const std::string& src) {
    auto mods = parse_source(src);
    std::vector<Diagnostic> diags;
    Registry reg = build_registry(mods, diags);
    return analyze(mods[0], reg);
}

bool has_edge(const MethodAnalysis& ma, int from, int to) {
    const auto& rs = ma.readers[from];
    return std::find(rs.begin(), rs.end(), to) != rs.end();
}

std::size_t edge_count(const MethodAnalysis& ma) {
    std::size_t n = 0;
    for (const auto& rs : ma.readers) n += rs.size();
    return n;
}

}  // namespace

TEST_CASE("classification follows the generate-and-test table") {
    auto mods = parse_source(R"(
m({R : real, L : list}, {X : real})
  method
    X : real = for(0.0, R, 1.0);
    A : real = select(L);
    B : real = A + X;
    when(B >= 0.0);
    test(B =< R);
    verify(B \= 1.0);
    call(m, {B, L}, {C});
    dcall(m, {B, L}, {D});
    find(m, {B, L}, E);
  end method;
end;
)");
    const auto& st = mods[0].methods[0].statements;
    CHECK(classify(st[0]) == StmtClass::Generator);   // for
    CHECK(classify(st[1]) == StmtClass::Generator);   // select
    CHECK(classify(st[2]) == StmtClass::Calculator);  // expression bind
    CHECK(classify(st[3]) == StmtClass::Tester);      // when
    CHECK(classify(st[4]) == StmtClass::Tester);      // test
    CHECK(classify(st[5]) == StmtClass::Tester);      // verify
    CHECK(classify(st[6]) == StmtClass::Generator);   // call
    CHECK(classify(st[7]) == StmtClass::Calculator);  // dcall
    CHECK(classify(st[8]) == StmtClass::Calculator);  // find
}

TEST_CASE("quarter circle dependency graph matches the data flow") {
    auto cf = testutil::load_corpus("quarter.dsp");
    const MethodAnalysis& ma = cf.scheduled[0].analyzed.methods[0];
    // (c)->(e), (d)->(e), (e)->(f); nothing else. (c),(d) read only R.
    CHECK(has_edge(ma, 0, 2));
    CHECK(has_edge(ma, 1, 2));
    CHECK(has_edge(ma, 2, 3));
    CHECK(edge_count(ma) == 3);
    CHECK(ma.deps[0].empty());
    CHECK(ma.deps[1].empty());
}

TEST_CASE("for module: method 2 has exactly the (d)->(e) edge") {
    auto cf = testutil::load_corpus("for.dsp");
    const MethodAnalysis& ma = cf.scheduled[0].analyzed.methods[1];
    CHECK(ma.classes[0] == StmtClass::Tester);      // when reads B,S,E
    CHECK(ma.classes[1] == StmtClass::Calculator);  // B1 = B+S
    CHECK(ma.classes[2] == StmtClass::Generator);   // call
    CHECK(has_edge(ma, 1, 2));
    CHECK(edge_count(ma) == 1);
}

TEST_CASE("a dependency cycle is rejected with the statements named") {
    auto res = analyze_first(
        "m({R : real}, {X : real})\n  method\n"
        "    A : real = B;\n    B : real = A;\n    X : real = A;\n"
        "  end method;\nend;\n");
    CHECK(!res.ok());
    bool found = false;
    for (const auto& d : res.diags)
        if (d.message.find("cyclic dependency") != std::string::npos &&
            d.message.find("[1, 2]") != std::string::npos)
            found = true;
    CHECK(found);
}

TEST_CASE("self-reference is a cycle") {
    auto res = analyze_first(
        "m({R : real}, {X : real})\n  method\n    X : real = X + 1.0;\n"
        "  end method;\nend;\n");
    CHECK(!res.ok());
}

TEST_CASE("reading an undefined variable is an error") {
    auto res = analyze_first(
        "m({R : real}, {X : real})\n  method\n    X : real = R + Q;\n"
        "  end method;\nend;\n");
    CHECK(!res.ok());
    bool found = false;
    for (const auto& d : res.diags)
        if (d.message.find("unknown variable 'Q'") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("double assignment and input rebinding are errors") {
    auto res = analyze_first(
        "m({R : real}, {X : real})\n  method\n"
        "    X : real = R;\n    X : real = R + 1.0;\n  end method;\nend;\n");
    CHECK(!res.ok());

    auto res2 = analyze_first(
        "m({R : real}, {X : real})\n  method\n"
        "    R : real = 1.0;\n    X : real = R;\n  end method;\nend;\n");
    CHECK(!res2.ok());
}

TEST_CASE("unknown callee module") {
    auto res = analyze_first(
        "m({R : real}, {X : real})\n  method\n"
        "    call(nothere, {R}, {X});\n  end method;\nend;\n");
    CHECK(!res.ok());
    bool found = false;
    for (const auto& d : res.diags)
        if (d.message.find("unknown module 'nothere'") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("arity mismatches at call sites") {
    auto res = analyze_first(
        "m({R : real}, {X : real})\n  method\n"
        "    call(for, {0.0, R}, {X});\n  end method;\nend;\n");
    CHECK(!res.ok());

    auto res2 = analyze_first(
        "m({R : real}, {X : real})\n  method\n"
        "    call(for, {0.0, R, 1.0}, {X, Y});\n  end method;\nend;\n");
    CHECK(!res2.ok());
}

TEST_CASE("type mismatches") {
    // bool condition required
    CHECK(!analyze_first("m({R : real}, {X : real})\n  method\n"
                         "    test(R + 1.0);\n    X : real = R;\n  end method;\nend;\n")
               .ok());
    // list where number expected
    CHECK(!analyze_first("m({L : list}, {X : real})\n  method\n"
                         "    X : real = L + 1.0;\n  end method;\nend;\n")
               .ok());
    // real expression bound to int
    CHECK(!analyze_first("m({R : real}, {X : int})\n  method\n"
                         "    X : int = R;\n  end method;\nend;\n")
               .ok());
    // int expression bound to real is fine (promotion)
    CHECK(analyze_first("m({N : int}, {X : real})\n  method\n"
                        "    X : real = N + 1;\n  end method;\nend;\n")
              .ok());
    // select needs a list
    CHECK(!analyze_first("m({R : real}, {X : real})\n  method\n"
                         "    X : real = select(R);\n  end method;\nend;\n")
               .ok());
    // for over real bounds cannot bind an int
    CHECK(!analyze_first("m({R : real}, {X : int})\n  method\n"
                         "    X : int = for(0.0, R, 1.0);\n  end method;\nend;\n")
               .ok());
}

TEST_CASE("every method must bind every output") {
    auto res = analyze_first(
        "m({R : real}, {X : real, Y : real})\n  method\n"
        "    X : real = R;\n  end method;\nend;\n");
    CHECK(!res.ok());
    bool found = false;
    for (const auto& d : res.diags)
        if (d.message.find("output 'Y' is never bound") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("call outputs must be fresh variables") {
    auto res = analyze_first(
        "m({R : real}, {X : real})\n  method\n"
        "    X : real = R;\n    call(for, {0.0, R, 1.0}, {X});\n  end method;\nend;\n");
    CHECK(!res.ok());
}

TEST_CASE("unused local variables warn, inputs do not") {
    auto mods = parse_source(
        "m({R : real, S : real}, {X : real})\n  method\n"
        "    T : real = R + 1.0;\n    X : real = R;\n  end method;\nend;\n");
    std::vector<Diagnostic> diags;
    Registry reg = build_registry(mods, diags);
    auto res = analyze(mods[0], reg);
    CHECK(res.ok());  // warnings only
    bool warned_t = false, warned_s = false;
    for (const auto& d : res.diags) {
        if (d.message.find("'T' is bound but never used") != std::string::npos)
            warned_t = true;
        if (d.message.find("'S'") != std::string::npos) warned_s = true;
    }
    CHECK(warned_t);
    CHECK(!warned_s);
}

TEST_CASE("equality of two real expressions warns") {
    auto res = analyze_first(
        "m({R : real}, {X : real})\n  method\n"
        "    test(R = 1.0);\n    X : real = R;\n  end method;\nend;\n");
    CHECK(res.ok());
    bool warned = false;
    for (const auto& d : res.diags)
        if (d.severity == Severity::Warning &&
            d.message.find("compares two real expressions") != std::string::npos)
            warned = true;
    CHECK(warned);
    // int equality stays silent
    auto res2 = analyze_first(
        "m({N : int}, {X : int})\n  method\n"
        "    test(N = 1);\n    X : int = N;\n  end method;\nend;\n");
    for (const auto& d : res2.diags) CHECK(d.severity != Severity::Warning);
}

TEST_CASE("find output has list type; recursion resolves lazily") {
    auto cf = testutil::load_corpus("nqueens.dsp");
    const ScheduledModule* place = cf.find_scheduled("place");
    REQUIRE(place != nullptr);
    const auto& symbols = place->analyzed.methods[1].symbols;
    CHECK(symbols.at("HU").dtype == DType::List);
    CHECK(symbols.at("Avail1").dtype == DType::List);
    CHECK(symbols.at("C").dtype == DType::Int);
}

TEST_CASE("diagnostics render machine-parseable") {
    auto cf = testutil::compile("m({R : real}, {X : real})\n  method\n"
                                "    X : real = Q;\n  end method;\nend;\n");
    CHECK(!cf.ok);
    std::string text = testutil::diag_text(cf);
    CHECK(text.find("<test>:3:16: error: unknown variable 'Q'") != std::string::npos);
}

TEST_CASE("duplicate module names in one file are rejected") {
    auto cf = testutil::compile(
        "m({R : real}, {X : real})\n  method\n    X : real = R;\n  end method;\nend;\n"
        "m({R : real}, {X : real})\n  method\n    X : real = R;\n  end method;\nend;\n");
    CHECK(!cf.ok);
    CHECK(testutil::has_error_containing(cf, "defined more than once"));
}
