#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace specbounds {

enum class ErrorKind {
    Parse,
    Topology,
    Geometry,
    Numerical,
    Precondition,
    Convergence,
    Io,
};

std::string_view to_string(ErrorKind kind);

/// Base exception for every failure raised by the library. The kind tells
/// callers which stage rejected the input.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    ErrorKind kind() const noexcept { return m_kind; }

private:
    ErrorKind m_kind;
};

struct MeshIssue {
    ErrorKind kind;  // Topology or Geometry
    std::string message;
};

/// Thrown by mesh validation. Lists every violated invariant, not just the
/// first one found.
class MeshValidationError : public Error {
public:
    explicit MeshValidationError(std::vector<MeshIssue> issues);

    const std::vector<MeshIssue>& issues() const noexcept { return m_issues; }
    bool has(std::string_view needle) const;

private:
    std::vector<MeshIssue> m_issues;
};

/// Eigensolver gave up before every requested pair met the residual target.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& message, std::vector<double> residuals);

    const std::vector<double>& residuals() const noexcept { return m_residuals; }

private:
    std::vector<double> m_residuals;
};

[[noreturn]] void throw_precondition(const std::string& message);

} // namespace specbounds
