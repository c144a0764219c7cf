#ifndef SQZ_ERRORS_HPP
#define SQZ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sqz {

// Numeric values match sqz_status in sqz.h.
enum class ErrorKind : int {
    domain = 1,
    coverage = 2,
    convergence = 3,
    boundary = 4,
    parse = 5,
    invariant = 6,
    io = 7,
    verification = 8,
    argument = 9,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct DomainError : Error {
    explicit DomainError(const std::string& w) : Error(ErrorKind::domain, w) {}
};
struct CoverageError : Error {
    explicit CoverageError(const std::string& w) : Error(ErrorKind::coverage, w) {}
};
struct ConvergenceError : Error {
    explicit ConvergenceError(const std::string& w) : Error(ErrorKind::convergence, w) {}
};
struct BoundaryError : Error {
    explicit BoundaryError(const std::string& w) : Error(ErrorKind::boundary, w) {}
};
struct ParseError : Error {
    explicit ParseError(const std::string& w) : Error(ErrorKind::parse, w) {}
};
struct InvariantError : Error {
    explicit InvariantError(const std::string& w) : Error(ErrorKind::invariant, w) {}
};
struct IoError : Error {
    explicit IoError(const std::string& w) : Error(ErrorKind::io, w) {}
};

}  // namespace sqz

#endif
