#pragma once

#include <stdexcept>
#include <string>

namespace eigenbound {

/// Argument outside the mathematical domain of an operation (pole clearance,
/// exponent range, mesh too coarse, ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A model problem whose weight vanishes inside the working interval.
/// Carries the first offending factor and the location of its zero.
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string what, std::size_t term_index, double curvature,
                    double zero_location)
        : std::runtime_error(std::move(what)),
          term_index(term_index),
          curvature(curvature),
          zero_location(zero_location) {}

    std::size_t term_index;
    double curvature;
    double zero_location;
};

/// The adaptive step controller underflowed (reported with the location).
class StepFailure : public std::runtime_error {
public:
    StepFailure(const std::string& what, double location)
        : std::runtime_error(what), location(location) {}
    double location;
};

/// Eigenvalue bracketing ran past its expansion budget.
class BracketFailure : public std::runtime_error {
public:
    explicit BracketFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Iterative minimization hit its iteration cap before the stopping rule.
class NoConvergence : public std::runtime_error {
public:
    NoConvergence(const std::string& what, int iterations, double last_value,
                  double last_decrease)
        : std::runtime_error(what),
          iterations(iterations),
          last_value(last_value),
          last_decrease(last_decrease) {}
    int iterations;
    double last_value;
    double last_decrease;
};

/// Explicit time stepping produced an overshoot (new sign change in the state).
class StabilityError : public std::runtime_error {
public:
    explicit StabilityError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace eigenbound
