#pragma once

#include <stdexcept>
#include <string>

namespace unet {

/// Inconsistent shapes, dimensions or truncation parameters.
class ConfigurationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter or matrix fails a mathematical constraint (unitarity,
/// r^2 + t^2 = 1, |a_k| <= 1, ...). `field()` names the offending item,
/// e.g. "scattering[3]" or "coin[site 5]".
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string field, const std::string& what)
        : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A numerical procedure could not deliver its contract (empty spectral
/// window, non-cyclic vector, wrap violation, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace unet
