#pragma once

#include <stdexcept>
#include <string>

namespace rggfpp {

// Exit codes used by the CLI. Library code only throws; the mapping lives here
// so every tool agrees on it.
enum class ExitCode : int {
    ok = 0,
    failure = 1,
    config = 2,
    subcritical_quota = 3,
    io = 4,
};

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what, ExitCode code = ExitCode::failure)
        : std::runtime_error(what), code_(code) {}

    ExitCode code() const noexcept { return code_; }
    virtual const char* kind() const noexcept { return "error"; }

private:
    ExitCode code_;
};

/// Invalid parameters or malformed configuration.
class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& what) : Error(what, ExitCode::config) {}
    const char* kind() const noexcept override { return "parameter"; }
};

/// The sample has no usable giant component (empty graph).
class SubcriticalError : public Error {
public:
    explicit SubcriticalError(const std::string& what) : Error(what) {}
    const char* kind() const noexcept override { return "subcritical"; }
};

/// Too many replicas of an experiment came out subcritical.
class SubcriticalQuotaError : public Error {
public:
    explicit SubcriticalQuotaError(const std::string& what)
        : Error(what, ExitCode::subcritical_quota) {}
    const char* kind() const noexcept override { return "subcritical_quota"; }
};

/// A data invariant was violated (negative weight, corrupted input).
class IntegrityError : public Error {
public:
    explicit IntegrityError(const std::string& what) : Error(what) {}
    const char* kind() const noexcept override { return "integrity"; }
};

/// The empirical kernel is undefined because N_alpha(S) = 0.
class NoNeighborError : public Error {
public:
    explicit NoNeighborError(const std::string& what) : Error(what) {}
    const char* kind() const noexcept override { return "no_neighbor"; }
};

class UnsupportedDimensionError : public Error {
public:
    explicit UnsupportedDimensionError(const std::string& what)
        : Error(what, ExitCode::config) {}
    const char* kind() const noexcept override { return "unsupported_dimension"; }
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what, ExitCode::io) {}
    const char* kind() const noexcept override { return "io"; }
};

}  // namespace rggfpp
