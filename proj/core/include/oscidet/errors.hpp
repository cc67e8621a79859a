// errors.hpp — exception taxonomy shared across the library
//
// Three failure classes, matching the three nonzero exit codes of the CLI:
//   ValidationError — input or configuration rejected before any computation
//   AccuracyError   — a quadrature refused to converge to its target; carries
//                     the last two refinement values so callers can judge
//   FitError        — curve fitting could not produce a meaningful answer

#pragma once

#include <stdexcept>
#include <string>

namespace oscidet {

class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class AccuracyError : public std::runtime_error {
public:
    AccuracyError(const std::string& what, double coarse, double fine)
        : std::runtime_error(what), coarse_value(coarse), fine_value(fine) {}

    double coarse_value;  // value at the previous refinement level
    double fine_value;    // value at the final refinement level
};

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace oscidet
