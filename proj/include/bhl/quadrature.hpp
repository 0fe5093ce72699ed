#pragma once

/// Composite Gauss-Legendre quadrature, 5 nodes per panel (degree-9 exact).

#include <array>
#include <cmath>
#include <sstream>

#include "bhl/error.hpp"

namespace bhl {

namespace detail {

// 5-point Gauss-Legendre nodes and weights on [-1, 1].
inline constexpr std::array<double, 5> gl5_nodes = {
    -0.9061798459386639928, -0.5384693101056830910, 0.0,
    0.5384693101056830910, 0.9061798459386639928};
inline constexpr std::array<double, 5> gl5_weights = {
    0.2369268850561890875, 0.4786286704993664680, 0.5688888888888888889,
    0.4786286704993664680, 0.2369268850561890875};

} // namespace detail

/// Integral of f over one panel [a, b] by 5-point Gauss-Legendre.
template <class F>
double gauss5_panel(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < 5; ++i) {
        double x = mid + half * detail::gl5_nodes[i];
        double v = f(x);
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "integrand not finite at r = " << x;
            fail(errc::evaluation_error, os.str());
        }
        acc += detail::gl5_weights[i] * v;
    }
    return half * acc;
}

/// Composite rule with a fixed number of equal panels.  An empty interval
/// (a == b) integrates to zero.
template <class F>
double quadrature(F&& f, double a, double b, int panels) {
    if (a == b) return 0.0;
    if (a > b)
        fail(errc::domain_error, "quadrature interval has a > b");
    if (panels < 1)
        fail(errc::domain_error, "quadrature needs at least one panel");
    const double h = (b - a) / panels;
    double acc = 0.0;
    for (int p = 0; p < panels; ++p)
        acc += gauss5_panel(f, a + p * h, a + (p + 1) * h);
    return acc;
}

/// Adaptive composite rule: panel count doubles until two successive values
/// agree to abs_tol + rel_tol * |value|, capped at 2^20 subintervals.
template <class F>
double quadrature_adaptive(F&& f, double a, double b, double rel_tol = 1e-12,
                           double abs_tol = 1e-14, int* panels_out = nullptr) {
    if (a == b) {
        if (panels_out) *panels_out = 0;
        return 0.0;
    }
    constexpr int max_panels = 1 << 20;
    int panels = 8;
    double prev = quadrature(f, a, b, panels);
    while (panels < max_panels) {
        panels *= 2;
        double cur = quadrature(f, a, b, panels);
        if (std::abs(cur - prev) <= abs_tol + rel_tol * std::abs(cur)) {
            if (panels_out) *panels_out = panels;
            return cur;
        }
        prev = cur;
    }
    fail(errc::no_convergence, "adaptive quadrature exceeded 2^20 subintervals");
}

} // namespace bhl
