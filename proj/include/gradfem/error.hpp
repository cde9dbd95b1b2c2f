#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gradfem {

/// Failure categories raised by the library. The CLI maps them onto exit codes.
enum class ErrorKind {
    InvalidArgument,
    DegenerateInput,
    ResourceLimit,
    GradingFailure,
    ConstructionFailure,
    AssemblyFailure,
    PointLocationFailure,
    ClippingFailure,
    EmptySystem,
    SolverFailure,
    NotSpd,
    SingularEvaluation,
    QuadratureFailure,
    InvalidRecord,
    NoTheorem,
    Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Raised by grade_by_rescaling when a mapped element inverts.
class GradingError : public Error {
public:
    GradingError(const std::string& message, long element)
        : Error(ErrorKind::GradingFailure, message), element_(element) {}

    [[nodiscard]] long element() const noexcept { return element_; }

private:
    long element_;
};

/// Raised by the iterative solver; carries the best iterate seen.
class SolverError : public Error {
public:
    SolverError(ErrorKind kind, const std::string& message, std::vector<double> best,
                double residual, int iterations)
        : Error(kind, message), best_(std::move(best)), residual_(residual),
          iterations_(iterations) {}

    [[nodiscard]] const std::vector<double>& best_iterate() const noexcept { return best_; }
    [[nodiscard]] double residual() const noexcept { return residual_; }
    [[nodiscard]] int iterations() const noexcept { return iterations_; }

private:
    std::vector<double> best_;
    double residual_;
    int iterations_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message)
{
    throw Error(kind, message);
}

#define GRADFEM_CHECK(cond, kind, msg)                                                   \
    do {                                                                                 \
        if (!(cond)) ::gradfem::fail(::gradfem::ErrorKind::kind, (msg));                 \
    } while (0)

}  // namespace gradfem
