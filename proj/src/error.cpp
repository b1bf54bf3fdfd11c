#include <specbounds/error.hpp>

namespace specbounds {

std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Topology: return "topology error";
    case ErrorKind::Geometry: return "geometry error";
    case ErrorKind::Numerical: return "numerical error";
    case ErrorKind::Precondition: return "precondition violated";
    case ErrorKind::Convergence: return "convergence failure";
    case ErrorKind::Io: return "i/o error";
    }
    return "error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message)
    , m_kind(kind)
{}

namespace {

ErrorKind dominant_kind(const std::vector<MeshIssue>& issues)
{
    for (const auto& issue : issues) {
        if (issue.kind == ErrorKind::Topology) return ErrorKind::Topology;
    }
    return issues.empty() ? ErrorKind::Topology : issues.front().kind;
}

std::string join_issues(const std::vector<MeshIssue>& issues)
{
    std::string out;
    for (const auto& issue : issues) {
        if (!out.empty()) out += "; ";
        out += issue.message;
    }
    return out;
}

} // namespace

MeshValidationError::MeshValidationError(std::vector<MeshIssue> issues)
    : Error(dominant_kind(issues), join_issues(issues))
    , m_issues(std::move(issues))
{}

bool MeshValidationError::has(std::string_view needle) const
{
    for (const auto& issue : m_issues) {
        if (issue.message.find(needle) != std::string::npos) return true;
    }
    return false;
}

ConvergenceError::ConvergenceError(const std::string& message, std::vector<double> residuals)
    : Error(ErrorKind::Convergence, message)
    , m_residuals(std::move(residuals))
{}

void throw_precondition(const std::string& message)
{
    throw Error(ErrorKind::Precondition, message);
}

} // namespace specbounds
