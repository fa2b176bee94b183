#pragma once

#include <stdexcept>
#include <string>

namespace consensus {

/// Outcome outside the domain of a shifted-CRRA utility (y - s <= 0).
class DomainError : public std::domain_error {
public:
    DomainError(double theta, double s, double y);

    double theta() const noexcept { return theta_; }
    double s() const noexcept { return s_; }
    double y() const noexcept { return y_; }

private:
    double theta_;
    double s_;
    double y_;
};

/// Mismatched lengths between per-point arrays and a grid.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Bad user input: grid spec, config file, sample file.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Adaptive quadrature failed to reach its tolerance.
class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace consensus
