#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace spmc {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Reduces an angle to the canonical interval (-pi, pi]. The boundary -pi is
/// mapped to +pi so every angle has a single representative.
inline double wrap_angle(double x) {
    if (!std::isfinite(x)) {
        throw std::invalid_argument("wrap_angle: non-finite input");
    }
    // std::remainder returns a value in [-pi, pi]; fold the lower boundary.
    double y = std::remainder(x, two_pi);
    if (y <= -pi) {
        y += two_pi;
    }
    return y;
}

/// An angle stored in (-pi, pi]. Construction wraps, so two WrappedAngle
/// values representing the same direction compare equal.
class WrappedAngle {
public:
    WrappedAngle() : value_(0.0) {}
    explicit WrappedAngle(double radians) : value_(wrap_angle(radians)) {}

    double value() const { return value_; }

    /// Wrap-add: the group operation on the circle.
    WrappedAngle operator+(WrappedAngle other) const {
        return WrappedAngle(value_ + other.value_);
    }
    WrappedAngle operator-(WrappedAngle other) const {
        return WrappedAngle(value_ - other.value_);
    }

    friend bool operator==(WrappedAngle a, WrappedAngle b) { return a.value_ == b.value_; }

private:
    double value_;
};

inline WrappedAngle wrap(double x) { return WrappedAngle(x); }

/// Signed circular distance wrap(a - b) as a plain double in (-pi, pi].
inline double angular_difference(double a, double b) { return wrap_angle(a - b); }

/// A point of the unit circle (or, in the degenerate no-signal case, the
/// origin). Factory construction keeps re^2 + im^2 = 1 to within rounding.
class ManifoldPoint {
public:
    ManifoldPoint() : re_(1.0), im_(0.0) {}
    ManifoldPoint(double re, double im) : re_(re), im_(im) {}

    static ManifoldPoint from_angle(WrappedAngle a) {
        return ManifoldPoint(std::cos(a.value()), std::sin(a.value()));
    }

    /// Projects (re, im) onto the unit circle.
    static ManifoldPoint unit_from(double re, double im) {
        const double n = std::hypot(re, im);
        if (n == 0.0) {
            throw std::invalid_argument("ManifoldPoint::unit_from: zero vector");
        }
        return ManifoldPoint(re / n, im / n);
    }

    /// Origin sentinel used for baselines whose correlator output carried no
    /// usable signal.
    static ManifoldPoint zero() { return ManifoldPoint(0.0, 0.0); }

    double re() const { return re_; }
    double im() const { return im_; }
    double norm() const { return std::hypot(re_, im_); }
    bool is_zero() const { return re_ == 0.0 && im_ == 0.0; }

    WrappedAngle angle() const { return WrappedAngle(std::atan2(im_, re_)); }

    std::complex<double> as_complex() const { return {re_, im_}; }

private:
    double re_;
    double im_;
};

/// Von Mises concentration (reliability) parameter, kappa >= 0. +infinity is
/// allowed and denotes a noiseless baseline.
class Concentration {
public:
    Concentration() : kappa_(0.0) {}
    explicit Concentration(double kappa) : kappa_(kappa) {
        if (std::isnan(kappa) || kappa < 0.0) {
            throw std::invalid_argument("Concentration: kappa must be >= 0");
        }
    }

    static Concentration infinite() {
        return Concentration(std::numeric_limits<double>::infinity());
    }

    double kappa() const { return kappa_; }
    bool is_infinite() const { return std::isinf(kappa_); }

private:
    double kappa_;
};

} // namespace spmc
