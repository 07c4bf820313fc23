#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace gvc {

/// Precondition failure on user-supplied arguments (bad extents, shapes, boxes).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A fixed-point or series iteration did not reach its tolerance.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, double last_delta, int iterations)
        : std::runtime_error(what), last_delta_(last_delta), iterations_(iterations) {}

    double last_delta() const noexcept { return last_delta_; }
    int iterations() const noexcept { return iterations_; }

private:
    double last_delta_;
    int iterations_;
};

/// Non-finite value produced while evaluating at grid node (i, j).
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, int i, int j)
        : std::runtime_error(what), i_(i), j_(j) {}

    int i() const noexcept { return i_; }
    int j() const noexcept { return j_; }

private:
    int i_;
    int j_;
};

/// A power series could not be certified to the requested accuracy with the
/// available number of terms.
class TruncationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A user-supplied mapping threw or returned garbage at a sampled point.
class EvaluationError : public std::runtime_error {
public:
    EvaluationError(const std::string& what, std::string mapping)
        : std::runtime_error(what), mapping_(std::move(mapping)) {}

    const std::string& mapping() const noexcept { return mapping_; }

private:
    std::string mapping_;
};

}  // namespace gvc
