#pragma once

#include <stdexcept>
#include <string>

namespace odecert {

enum class ErrKind {
    DivisionByZero,
    DomainError,
    UnboundVariable,
    SyntaxError,
    UndeclaredName,
    DuplicateName,
    MissingLoopInvariant,
    LoopReached,
    MissingFlow,
    UnsupportedNode,
    UnsupportedLiteral,
    FreshnessViolation,
    NonMatchingFrames,
    UnknownOperator,
    ParseError,
    SamplingExhausted,
    UnsupportedAtom,
    NoSolutionFound,
    Internal,
};

inline const char* err_kind_name(ErrKind k) {
    switch (k) {
        case ErrKind::DivisionByZero: return "DivisionByZero";
        case ErrKind::DomainError: return "DomainError";
        case ErrKind::UnboundVariable: return "UnboundVariable";
        case ErrKind::SyntaxError: return "SyntaxError";
        case ErrKind::UndeclaredName: return "UndeclaredName";
        case ErrKind::DuplicateName: return "DuplicateName";
        case ErrKind::MissingLoopInvariant: return "MissingLoopInvariant";
        case ErrKind::LoopReached: return "LoopReached";
        case ErrKind::MissingFlow: return "MissingFlow";
        case ErrKind::UnsupportedNode: return "UnsupportedNode";
        case ErrKind::UnsupportedLiteral: return "UnsupportedLiteral";
        case ErrKind::FreshnessViolation: return "FreshnessViolation";
        case ErrKind::NonMatchingFrames: return "NonMatchingFrames";
        case ErrKind::UnknownOperator: return "UnknownOperator";
        case ErrKind::ParseError: return "ParseError";
        case ErrKind::SamplingExhausted: return "SamplingExhausted";
        case ErrKind::UnsupportedAtom: return "UnsupportedAtom";
        case ErrKind::NoSolutionFound: return "NoSolutionFound";
        case ErrKind::Internal: return "Internal";
    }
    return "?";
}

class Error : public std::runtime_error {
public:
    Error(ErrKind kind, const std::string& msg)
        : std::runtime_error(std::string(err_kind_name(kind)) + ": " + msg), kind_(kind) {}

    ErrKind kind() const { return kind_; }

private:
    ErrKind kind_;
};

/// Parse failure with source position (1-based line/column).
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& msg, int line, int col)
        : Error(ErrKind::SyntaxError,
                msg + " at line " + std::to_string(line) + ", column " + std::to_string(col)),
          line(line), col(col) {}

    int line;
    int col;
};

}  // namespace odecert
