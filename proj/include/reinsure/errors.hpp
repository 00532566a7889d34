#pragma once

#include <stdexcept>
#include <string>

namespace reinsure {

// Argument outside the mathematical domain of an operation (u outside [0, I],
// MGF evaluated past its abscissa of convergence, ...).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Floating-point breakdown: underflow of an unnormalized filter, overflow of an
// exponential moment.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A claim size that has zero likelihood under every hidden state.
struct DegenerateObservation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonConcaveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Backward step too coarse for the jump intensities.
struct StabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid model or scenario description. `where` carries the key path or the
// line/column of the offending input.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string where, const std::string& what)
        : std::runtime_error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}

    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

}  // namespace reinsure
