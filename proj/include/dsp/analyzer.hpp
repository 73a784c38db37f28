#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dsp/ast.hpp"

namespace dsp {

enum class StmtClass { Generator, Calculator, Tester };

const char* stmt_class_name(StmtClass c);

// Functional classification in the generate-and-test scheme. Total over
// well-formed statements.
StmtClass classify(const Stmt& s);

struct SymbolInfo {
    enum class Origin { Input, Output, Local };
    Origin origin = Origin::Local;
    DType dtype = DType::Real;
    int def_stmt = -1;  // defining statement index; -1 for inputs
};

// Per-method result: the symbol table, the statement dependency graph
// (definer -> reader), and the classification of every statement.
struct MethodAnalysis {
    std::map<std::string, SymbolInfo> symbols;
    std::vector<std::vector<int>> readers;  // readers[i]: statements reading i's definitions
    std::vector<std::vector<int>> deps;     // deps[j]: statements j reads from
    std::vector<StmtClass> classes;
    std::vector<bool> is_verify;
    // Canonical variable listing: inputs, outputs, then locals in source
    // definition order. Used for violation snapshots.
    std::vector<std::string> snapshot_order;
};

struct AnalyzedModule {
    ModuleDecl decl;
    std::vector<MethodAnalysis> methods;
};

struct AnalyzeResult {
    std::optional<AnalyzedModule> module;
    std::vector<Diagnostic> diags;
    bool ok() const { return module.has_value(); }
};

using Registry = std::map<std::string, ModuleDecl>;

Registry build_registry(const std::vector<ModuleDecl>& mods,
                        std::vector<Diagnostic>& diags);

// Signature of a callee as seen from a call site; covers user modules and
// the builtin generators (for, select).
struct CalleeSignature {
    std::vector<DType> inputs;
    std::vector<DType> outputs;
};
std::optional<CalleeSignature> callee_signature(const std::string& name,
                                                const Registry& registry);

AnalyzeResult analyze(const ModuleDecl& m, const Registry& registry);

}  // namespace dsp
