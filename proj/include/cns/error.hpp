#pragma once

#include <stdexcept>
#include <string>

namespace cns {

/// Process-level outcome classes. The numeric values double as CLI exit codes
/// and as the C API status codes, so they must never be renumbered.
enum class Status : int {
    ok = 0,
    usage = 1,
    validation = 2,
    solver = 3,
    blowup = 4,
    io = 5,
    acceptance = 6,
    format = 7,
    domain = 8,
    internal = 9,
};

class Error : public std::runtime_error {
public:
    Error(Status status, const std::string& what) : std::runtime_error(what), status_(status) {}
    Status status() const noexcept { return status_; }

private:
    Status status_;
};

/// Argument outside the mathematical domain of an operation (negative density,
/// p < 1, inadmissible exponent pair, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(Status::domain, what) {}
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(Status::validation, what) {}
};

class SolverError : public Error {
public:
    SolverError(const std::string& what, double residual, int iterations)
        : Error(Status::solver, what), residual_(residual), iterations_(iterations) {}
    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double residual_;
    int iterations_;
};

/// A trial step violated a positivity/bound/CFL condition. The stepper reacts
/// by halving dt; it only escapes run_to_time as a blow-up flag.
class StepRejected : public Error {
public:
    explicit StepRejected(const std::string& what) : Error(Status::solver, what) {}
};

class FormatError : public Error {
public:
    FormatError(const std::string& what, std::string field = {})
        : Error(Status::format, what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(Status::io, what) {}
};

} // namespace cns
