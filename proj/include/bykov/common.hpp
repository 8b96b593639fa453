#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bykov {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Invalid input to an operation. `field()` names the offending quantity.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A point lies on an invariant manifold where a local map is undefined
/// (the trajectory never leaves the neighbourhood, or never reaches it).
class InvariantManifoldError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Representative of an angle difference in (-pi, pi].
inline double wrap_pi(double angle) {
    double r = std::remainder(angle, kTwoPi);  // in [-pi, pi]
    if (r <= -kPi) r += kTwoPi;
    return r;
}

/// Angle reduced to [0, 2pi).
inline double mod_two_pi(double angle) {
    double r = std::fmod(angle, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r -= kTwoPi;
    return r;
}

/// Distance on the circle R / 2piZ.
inline double circle_distance(double a, double b) { return std::abs(wrap_pi(a - b)); }

}  // namespace bykov
