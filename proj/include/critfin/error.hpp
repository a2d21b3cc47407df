#pragma once

#include <stdexcept>
#include <string>

namespace critfin {

/// Failure categories. The CLI maps these onto its exit codes.
enum class ErrorKind {
    syntax,           ///< malformed polynomial or map text
    inhomogeneous,    ///< polynomial mixes monomial degrees
    invalid_argument, ///< precondition violated by the caller
    not_a_morphism,   ///< forms share a projective zero
    budget_exceeded,  ///< a configured size or iteration cap was hit
    solver_failure,   ///< numerical solving could not certify its output
    degenerate,       ///< an elimination or projection was non-generic beyond retries
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::syntax: return "syntax";
        case ErrorKind::inhomogeneous: return "inhomogeneous";
        case ErrorKind::invalid_argument: return "invalid_argument";
        case ErrorKind::not_a_morphism: return "not_a_morphism";
        case ErrorKind::budget_exceeded: return "budget_exceeded";
        case ErrorKind::solver_failure: return "solver_failure";
        case ErrorKind::degenerate: return "degenerate";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace critfin
