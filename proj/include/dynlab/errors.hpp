#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dynlab {

/// Raised when an integration step produces NaN or Inf.
class NonFiniteState : public std::runtime_error {
public:
    NonFiniteState(std::size_t step, double time)
        : std::runtime_error("non-finite state at step " + std::to_string(step) +
                             " (t = " + std::to_string(time) + ")"),
          step_(step), time_(time) {}

    std::size_t step() const noexcept { return step_; }
    double time() const noexcept { return time_; }

private:
    std::size_t step_;
    double time_;
};

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed s-expression input; position is a 0-based character offset.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t position)
        : std::runtime_error(what + " at position " + std::to_string(position)),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace dynlab
