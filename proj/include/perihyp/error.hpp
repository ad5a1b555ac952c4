#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace perihyp {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (x outside [0,1],
/// ln of a non-positive number, division by zero, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed coefficient expression. `position` is a 0-based character offset.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t position)
        : Error(message + " at position " + std::to_string(position)), detail_(message), position_(position) {}

    std::size_t position() const noexcept { return position_; }
    /// The message without the position suffix.
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string detail_;
    std::size_t position_;
};

/// The boundary-trace shift equation is neither a contraction nor an inverted
/// contraction, so the reflection operator cannot be inverted by iteration.
class ResonantGain : public Error {
public:
    ResonantGain(const std::string& message, double min_gain, double max_gain)
        : Error(message), min_gain_(min_gain), max_gain_(max_gain) {}

    double min_gain() const noexcept { return min_gain_; }
    double max_gain() const noexcept { return max_gain_; }

private:
    double min_gain_;
    double max_gain_;
};

class DegenerateDenominator : public Error {
public:
    using Error::Error;
};

class InnerSolveStagnation : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace perihyp
