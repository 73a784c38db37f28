#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dsp {

struct Position {
    int line = 1;
    int col = 1;
};

inline std::string to_string(Position p) {
    return std::to_string(p.line) + ":" + std::to_string(p.col);
}

enum class Severity { Error, Warning, Note };

inline const char* severity_name(Severity s) {
    switch (s) {
        case Severity::Error: return "error";
        case Severity::Warning: return "warning";
        case Severity::Note: return "note";
    }
    return "?";
}

// One compiler message. Rendered as "file:line:col: severity: message",
// one per line, so tooling can grep them.
struct Diagnostic {
    Severity severity = Severity::Error;
    Position pos;
    std::string message;
};

inline std::string render(const Diagnostic& d, const std::string& file) {
    return file + ":" + to_string(d.pos) + ": " + severity_name(d.severity) +
           ": " + d.message;
}

inline bool has_errors(const std::vector<Diagnostic>& ds) {
    for (const auto& d : ds)
        if (d.severity == Severity::Error) return true;
    return false;
}

class CompileError : public std::runtime_error {
public:
    Position pos;
    CompileError(const std::string& msg, Position p)
        : std::runtime_error(msg), pos(p) {}
};

class LexError : public CompileError {
public:
    using CompileError::CompileError;
};

class ParseError : public CompileError {
public:
    using CompileError::CompileError;
};

// Faults raised while a compiled program is running. They abort the
// current drain; the driver turns them into diagnostics.
enum class FaultKind {
    EmptyCellRead,
    DivisionByZero,
    DomainFault,
    NonPositiveStep,
    DTypeFault,
    StaleRead,
    Internal,
};

inline const char* fault_name(FaultKind k) {
    switch (k) {
        case FaultKind::EmptyCellRead: return "empty-cell-read";
        case FaultKind::DivisionByZero: return "division-by-zero";
        case FaultKind::DomainFault: return "domain-fault";
        case FaultKind::NonPositiveStep: return "non-positive-step";
        case FaultKind::DTypeFault: return "dtype-fault";
        case FaultKind::StaleRead: return "stale-read";
        case FaultKind::Internal: return "internal";
    }
    return "?";
}

class RuntimeFault : public std::runtime_error {
public:
    FaultKind kind;
    RuntimeFault(FaultKind k, const std::string& msg)
        : std::runtime_error(std::string(fault_name(k)) + ": " + msg), kind(k) {}
};

}  // namespace dsp
