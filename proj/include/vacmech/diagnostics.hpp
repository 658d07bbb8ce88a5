#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace vacmech {

enum class Severity { Info, Warn, Error };

/// Structured, machine-readable note attached to a numerical result.
struct Diagnostic {
    Severity severity = Severity::Info;
    std::string code;
    std::string message;

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

using Diagnostics = std::vector<Diagnostic>;

[[nodiscard]] inline const char* to_string(Severity s) {
    switch (s) {
        case Severity::Info: return "info";
        case Severity::Warn: return "warn";
        case Severity::Error: return "error";
    }
    return "info";
}

[[nodiscard]] inline bool has_errors(const Diagnostics& diags) {
    for (const auto& d : diags)
        if (d.severity == Severity::Error) return true;
    return false;
}

inline void append(Diagnostics& into, const Diagnostics& from) {
    into.insert(into.end(), from.begin(), from.end());
}

// Error types. Everything derives from std::runtime_error/domain_error so
// callers that only care about "something failed" can catch the base.

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// |1 - r e^{2iwq}| vanished: ideal mirror exactly on a cavity resonance.
class PoleError : public std::runtime_error {
public:
    PoleError(double omega, const std::string& what)
        : std::runtime_error(what), omega_(omega) {}
    [[nodiscard]] double omega() const noexcept { return omega_; }

private:
    double omega_;
};

/// An iterative refinement did not reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(double last_estimate, double last_error, const std::string& what)
        : std::runtime_error(what), last_estimate_(last_estimate), last_error_(last_error) {}
    [[nodiscard]] double last_estimate() const noexcept { return last_estimate_; }
    [[nodiscard]] double last_error() const noexcept { return last_error_; }

private:
    double last_estimate_;
    double last_error_;
};

/// The requested quantity is infinite without a regularization cutoff.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace vacmech
