#pragma once

#include <stdexcept>
#include <string>

namespace rmt {

// Bad arguments or malformed input data.
class InputError : public std::invalid_argument {
  public:
    explicit InputError(const std::string& msg) : std::invalid_argument(msg) {}
};

// A numerical procedure failed to meet its tolerance; carries the best
// estimate obtained so far.
class NumericalError : public std::runtime_error {
  public:
    NumericalError(const std::string& msg, double best = 0.0)
        : std::runtime_error(msg), best_estimate(best) {}
    double best_estimate;
};

} // namespace rmt
