#pragma once

/// Rotationally symmetric model spaces.
///
/// A model space of dimension m is the warped product [0, b) x_f S^{m-1}
/// with metric dr^2 + f(r)^2 g_{S^{m-1}}.  The warping function f fixes the
/// geometry completely: f(r) = r is Euclidean space, f(r) = sin r the round
/// sphere, f(r) = sinh r hyperbolic space.

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <utility>

#include "bhl/error.hpp"

namespace bhl {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

/// Real interval with individually open or closed endpoints.
struct interval {
    double lo = 0.0;
    double hi = infinity;
    bool closed_lo = true;
    bool closed_hi = false;

    bool contains(double x) const {
        if (x < lo || (x == lo && !closed_lo)) return false;
        if (x > hi || (x == hi && !closed_hi)) return false;
        return true;
    }
    bool contains_interior(double x) const { return x > lo && x < hi; }

    std::string str() const {
        std::ostringstream os;
        os << (closed_lo ? '[' : '(') << lo << ", ";
        if (hi == infinity) os << "inf)";
        else os << hi << (closed_hi ? ']' : ')');
        return os.str();
    }
};

enum class warp_kind { flat, spherical, hyperbolic, custom };

inline const char* warp_kind_name(warp_kind k) {
    switch (k) {
    case warp_kind::flat: return "flat";
    case warp_kind::spherical: return "spherical";
    case warp_kind::hyperbolic: return "hyperbolic";
    case warp_kind::custom: return "custom";
    }
    return "unknown";
}

/// Warping function f of a model space, evaluable together with its first
/// three derivatives.  Built-in kinds carry exact derivatives; custom kinds
/// supply a callable (r, order) -> f^(order)(r) valid for order 0..3.
class warping_function {
public:
    static warping_function flat() {
        return warping_function(warp_kind::flat, interval{0.0, infinity, true, false}, nullptr);
    }
    static warping_function spherical() {
        return warping_function(warp_kind::spherical,
                                interval{0.0, std::acos(-1.0), true, true}, nullptr);
    }
    static warping_function hyperbolic() {
        return warping_function(warp_kind::hyperbolic, interval{0.0, infinity, true, false}, nullptr);
    }

    /// Custom warping.  Checks the model boundary behavior f(0) = 0,
    /// f'(0) = 1 numerically at r = 1e-6 unless check_boundary is false
    /// (used for classification outputs that are models only up to scale).
    static warping_function custom(std::function<double(double, int)> eval,
                                   interval domain, bool check_boundary = true) {
        if (!eval) fail(errc::domain_error, "custom warping requires an evaluator");
        if (domain.lo != 0.0)
            fail(errc::domain_error, "warping domain must start at 0, got " + domain.str());
        warping_function w(warp_kind::custom, domain, std::move(eval));
        if (check_boundary) {
            const double r = 1e-6;
            double v0 = w(r, 0), v1 = w(r, 1);
            if (std::abs(v0 / r - 1.0) > 1e-4 || std::abs(v1 - 1.0) > 1e-4)
                fail(errc::domain_error,
                     "custom warping violates f(0)=0, f'(0)=1 near the pole");
        }
        return w;
    }

    warp_kind kind() const { return kind_; }
    const interval& domain() const { return domain_; }

    /// f^(order)(r) for order in 0..3.
    double operator()(double r, int order = 0) const {
        if (order < 0 || order > 3)
            fail(errc::unsupported_order,
                 "warping derivatives available to order 3, requested " + std::to_string(order));
        if (!domain_.contains(r)) {
            std::ostringstream os;
            os << "warping argument " << r << " outside domain " << domain_.str();
            fail(errc::domain_error, os.str());
        }
        switch (kind_) {
        case warp_kind::flat:
            switch (order) {
            case 0: return r;
            case 1: return 1.0;
            default: return 0.0;
            }
        case warp_kind::spherical:
            switch (order) {
            case 0: return std::sin(r);
            case 1: return std::cos(r);
            case 2: return -std::sin(r);
            default: return -std::cos(r);
            }
        case warp_kind::hyperbolic:
            switch (order) {
            case 0: return std::sinh(r);
            case 1: return std::cosh(r);
            case 2: return std::sinh(r);
            default: return std::cosh(r);
            }
        case warp_kind::custom:
            return eval_(r, order);
        }
        fail(errc::domain_error, "corrupt warping kind");
    }

private:
    warping_function(warp_kind k, interval d, std::function<double(double, int)> e)
        : kind_(k), domain_(d), eval_(std::move(e)) {}

    warp_kind kind_;
    interval domain_;
    std::function<double(double, int)> eval_;
};

/// Rotationally symmetric model space of dimension m >= 2.
struct model_space {
    int dimension;
    warping_function warping;

    model_space(int m, warping_function f) : dimension(m), warping(std::move(f)) {
        if (m < 2)
            fail(errc::domain_error,
                 "model space dimension must be at least 2, got " + std::to_string(m));
    }
};

/// Sectional curvature of the radial planes, K(r) = -f''(r)/f(r).
/// For the built-in warpings this is identically 0, +1, -1.
inline double radial_curvature(const warping_function& f, double r) {
    double v = f(r, 0);
    // values at roundoff scale mean r sits on a metric pole (e.g. sin(pi))
    if (std::abs(v) < 1e-12) {
        std::ostringstream os;
        os << "warping vanishes at r = " << r << "; radial curvature undefined";
        fail(errc::singularity, os.str());
    }
    return -f(r, 2) / v;
}

/// Scalar curvature of a 4-dimensional model space with warping lambda,
/// evaluated at radius rho:
///
///   Scal(rho) = (6 - 6 lambda lambda'' - 6 lambda'^2) / lambda^2.
///
/// Flat, spherical and hyperbolic warpings give 0, 12, -12.
inline double target_scalar_curvature(const model_space& target, double rho) {
    if (target.dimension != 4)
        fail(errc::not_applicable,
             "scalar curvature formula implemented for dimension 4 only, got " +
                 std::to_string(target.dimension));
    const warping_function& l = target.warping;
    double v = l(rho, 0);
    if (std::abs(v) < 1e-12) {
        std::ostringstream os;
        os << "warping vanishes at rho = " << rho << "; scalar curvature undefined";
        fail(errc::singularity, os.str());
    }
    double v1 = l(rho, 1), v2 = l(rho, 2);
    return (6.0 - 6.0 * v * v2 - 6.0 * v1 * v1) / (v * v);
}

/// Volume of the round unit sphere S^d:
///
///   Vol(S^d) = 2 pi^{(d+1)/2} / Gamma((d+1)/2),
///
/// with Gamma evaluated at integer and half-integer arguments by the
/// recursion Gamma(x+1) = x Gamma(x) from Gamma(1) = 1, Gamma(1/2) = sqrt(pi).
inline double sphere_volume(int d) {
    if (d < 1)
        fail(errc::domain_error, "sphere dimension must be at least 1, got " + std::to_string(d));
    const double pi = std::acos(-1.0);
    // (d+1)/2 is either an integer or a half-integer.
    double x = (d % 2 == 1) ? 1.0 : 0.5;
    double gamma = (d % 2 == 1) ? 1.0 : std::sqrt(pi);
    const double arg = 0.5 * (d + 1);
    while (x < arg - 0.25) {
        gamma *= x;
        x += 1.0;
    }
    return 2.0 * std::pow(pi, arg) / gamma;
}

} // namespace bhl
