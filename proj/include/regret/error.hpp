#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace regret {

enum class ErrorKind {
    NegativeProbability,
    ProbabilitySumMismatch,
    EmptyProspect,
    NonFiniteOutcome,
    NonFiniteInput,
    DomainViolation,
    UnknownOutcomePresent,
    NoRoot,
    HypothesisUnmet,
    NoReversalFound,
    ConvexityRequired,
    RootSolveFailed,
    ParseError,
    IoError,
    Usage,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NegativeProbability: return "NegativeProbability";
        case ErrorKind::ProbabilitySumMismatch: return "ProbabilitySumMismatch";
        case ErrorKind::EmptyProspect: return "EmptyProspect";
        case ErrorKind::NonFiniteOutcome: return "NonFiniteOutcome";
        case ErrorKind::NonFiniteInput: return "NonFiniteInput";
        case ErrorKind::DomainViolation: return "DomainViolation";
        case ErrorKind::UnknownOutcomePresent: return "UnknownOutcomePresent";
        case ErrorKind::NoRoot: return "NoRoot";
        case ErrorKind::HypothesisUnmet: return "HypothesisUnmet";
        case ErrorKind::NoReversalFound: return "NoReversalFound";
        case ErrorKind::ConvexityRequired: return "ConvexityRequired";
        case ErrorKind::RootSolveFailed: return "RootSolveFailed";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::IoError: return "IoError";
        case ErrorKind::Usage: return "Usage";
    }
    return "Unknown";
}

// Every failure in the library is reported as an Error carrying its kind, so
// callers (the CLI in particular) can map kinds onto exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message,
          double value = std::numeric_limits<double>::quiet_NaN())
        : std::runtime_error(std::string(to_string(kind)) + ": " + message),
          kind_(kind),
          value_(value) {}

    ErrorKind kind() const noexcept { return kind_; }

    // Numeric payload where one is meaningful (the offending probability sum,
    // for instance); NaN otherwise.
    double value() const noexcept { return value_; }

private:
    ErrorKind kind_;
    double value_;
};

}  // namespace regret
