#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace epiassim {

/// Base for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid input value (parameter out of range, bad argument to a pure function).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid user configuration; the message starts with the offending field path.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Numerical failures. The CLI maps these to exit code 3.
class NumericalError : public Error {
public:
    using Error::Error;
};

class StepSizeUnderflow : public NumericalError {
public:
    StepSizeUnderflow(const std::string& what, double t, double h)
        : NumericalError(what), time_(t), step_(h) {}
    double time() const noexcept { return time_; }
    double step() const noexcept { return step_; }

private:
    double time_;
    double step_;
};

class NonConvergence : public NumericalError {
public:
    NonConvergence(const std::string& what, double last_change)
        : NumericalError(what), last_change_(last_change) {}
    double last_change() const noexcept { return last_change_; }

private:
    double last_change_;
};

class SingularInnovation : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A Case-3/4 observation was requested on a state whose incidence accumulator
/// was never armed by reset_incidence().
class AccumulatorUnset : public Error {
public:
    using Error::Error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

class DegenerateInnovation : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class MissingSeries : public Error {
public:
    explicit MissingSeries(const std::string& series)
        : Error("missing series: " + series), series_(series) {}
    const std::string& series() const noexcept { return series_; }

private:
    std::string series_;
};

/// Failure while propagating one ensemble member; carries where it happened.
class MemberFailure : public NumericalError {
public:
    MemberFailure(std::size_t member, const std::string& cause)
        : NumericalError("member " + std::to_string(member) + ": " + cause), member_(member) {}
    std::size_t member() const noexcept { return member_; }

private:
    std::size_t member_;
};

/// Failure inside the filter loop at a given observation step (1-based).
class StepFailure : public NumericalError {
public:
    StepFailure(std::size_t step, const std::string& cause)
        : NumericalError("observation step " + std::to_string(step) + ": " + cause), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

}  // namespace epiassim
