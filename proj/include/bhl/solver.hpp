#pragma once

/// Initial value integration and shooting for the biharmonic profile ODE.
///
/// The fourth-order profile equation is integrated as the first-order system
///
///   rho'' = F - (m-1)(sigma'/sigma) rho' + 2k lambda lambda'(rho)/sigma^2
///   F''   =   - (m-1)(sigma'/sigma) F'  + 2k (lambda lambda')'(rho)/sigma^2 F
///
/// in the state (rho, rho', F, F').  The integrator is the Dormand-Prince
/// embedded 4(5) pair with PI step control.  Accepted steps keep the stage
/// derivatives, so dense output is quintic Hermite per step and channel,
/// accurate enough that finite differences of the interpolant recover F''
/// at the 1e-5 level needed by the residual checks downstream.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <sstream>
#include <vector>

#include "bhl/error.hpp"
#include "bhl/geometry.hpp"
#include "bhl/profiles.hpp"

namespace bhl {

/// Solver state at one radius.
struct ode_state {
    double r = 0.0;
    double rho = 0.0;
    double rho_p = 0.0;
    double F = 0.0;
    double F_p = 0.0;
};

struct solver_config {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double h_min = 1e-12;
    double h_max = 1e-3; // keeps the quintic dense output below FD noise
    double newton_tol = 1e-10;
    int newton_max_iter = 30;
    double fd_jacobian_step = 1e-6;
};

namespace detail {

inline void check_solver_config(const solver_config& cfg) {
    if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0))
        fail(errc::config_invalid, "solver tolerances must be positive");
    if (!(cfg.h_min < cfg.h_max) || !(cfg.h_min > 0.0))
        fail(errc::config_invalid, "solver needs 0 < h_min < h_max");
    if (!(cfg.newton_tol > 0.0) || cfg.newton_max_iter < 1 || !(cfg.fd_jacobian_step > 0.0))
        fail(errc::config_invalid, "invalid Newton settings");
}

} // namespace detail

/// Integrated solution: accepted states plus nodal second derivatives,
/// queryable anywhere inside the covered interval.
class trajectory {
public:
    trajectory(std::vector<ode_state> states, std::vector<std::array<double, 2>> accel,
               int m, double k, warping_function sigma, warping_function lambda)
        : states_(std::move(states)), accel_(std::move(accel)), m_(m), k_(k),
          sigma_(std::move(sigma)), lambda_(std::move(lambda)) {
        if (states_.empty()) fail(errc::domain_error, "empty trajectory");
        if (states_.size() != accel_.size())
            fail(errc::domain_error, "trajectory bookkeeping mismatch");
        for (size_t i = 1; i < states_.size(); ++i)
            if (!(states_[i - 1].r < states_[i].r))
                fail(errc::domain_error, "trajectory radii must increase strictly");
    }

    const std::vector<ode_state>& states() const { return states_; }
    double r_front() const { return states_.front().r; }
    double r_back() const { return states_.back().r; }

    /// Dense output: quintic Hermite on (value, slope, curvature) data of the
    /// rho and F channels independently.
    ode_state at(double r) const {
        size_t seg = locate(r);
        if (states_.size() == 1) return states_.front();
        const ode_state& L = states_[seg];
        const ode_state& R = states_[seg + 1];
        double h = R.r - L.r;
        double t = (r - L.r) / h;
        auto [rho, rho_p] = quintic(L.rho, L.rho_p, accel_[seg][0], R.rho, R.rho_p,
                                    accel_[seg + 1][0], h, t);
        auto [F, F_p] =
            quintic(L.F, L.F_p, accel_[seg][1], R.F, R.F_p, accel_[seg + 1][1], h, t);
        return {r, rho, rho_p, F, F_p};
    }

    /// Profile view of the rho channel (orders 0..2).  The second derivative
    /// is reconstructed through the ODE right-hand side from the interpolated
    /// state, so tension evaluations of this profile reproduce the F channel.
    radial_profile to_profile() const {
        auto self = std::make_shared<trajectory>(*this);
        radial_profile p;
        p.max_order = 2;
        p.domain = interval{r_front(), r_back(), true, true};
        p.eval = [self](double r, int order) {
            ode_state s = self->at(r);
            if (order == 0) return s.rho;
            if (order == 1) return s.rho_p;
            double sig0 = self->sigma_(r, 0);
            double g = self->sigma_(r, 1) / sig0;
            double l0 = self->lambda_(s.rho, 0), l1 = self->lambda_(s.rho, 1);
            return s.F - (self->m_ - 1) * g * s.rho_p +
                   2.0 * self->k_ * l0 * l1 / (sig0 * sig0);
        };
        return p;
    }

private:
    size_t locate(double r) const {
        if (r < r_front() || r > r_back()) {
            std::ostringstream os;
            os << "query r = " << r << " outside integrated interval [" << r_front() << ", "
               << r_back() << "]";
            fail(errc::domain_error, os.str());
        }
        size_t lo = 0, hi = states_.size() - 1;
        while (hi - lo > 1) {
            size_t mid = (lo + hi) / 2;
            (states_[mid].r <= r ? lo : hi) = mid;
        }
        return lo;
    }

    /// Value and first derivative of the quintic matching (y, y', y'') at
    /// both segment ends; t is the local coordinate in [0, 1].
    static std::pair<double, double> quintic(double y0, double d0, double s0, double y1,
                                             double d1, double s1, double h, double t) {
        double A = y1 - y0 - h * d0 - 0.5 * h * h * s0;
        double B = h * (d1 - d0) - h * h * s0;
        double C = h * h * (s1 - s0);
        double c5 = (12.0 * A - 6.0 * B + C) / 2.0;
        double c4 = 7.0 * B - 15.0 * A - C;
        double c3 = 10.0 * A - 4.0 * B + 0.5 * C;
        double t2 = t * t, t3 = t2 * t;
        double val = y0 + h * d0 * t + 0.5 * h * h * s0 * t2 + t3 * (c3 + t * (c4 + t * c5));
        double dval_dt = h * d0 + h * h * s0 * t +
                         t2 * (3.0 * c3 + t * (4.0 * c4 + 5.0 * t * c5));
        return {val, dval_dt / h};
    }

    std::vector<ode_state> states_;
    std::vector<std::array<double, 2>> accel_; // (rho'', F'') at each node
    int m_;
    double k_;
    warping_function sigma_;
    warping_function lambda_;
};

namespace detail {

struct rhs_eval {
    int m;
    double ed; // 2k
    const warping_function& sigma;
    const warping_function& lambda;

    std::array<double, 4> operator()(double r, const std::array<double, 4>& y) const {
        double s0 = sigma(r, 0);
        if (std::abs(s0) < 1e-12) {
            std::ostringstream os;
            os << "domain warping vanishes at r = " << r;
            fail(errc::singularity, os.str());
        }
        if (!lambda.domain().contains(y[0])) {
            std::ostringstream os;
            os << "profile escaped the target domain: rho = " << y[0] << " at r = " << r
               << " (domain " << lambda.domain().str() << ")";
            fail(errc::range_escape, os.str());
        }
        double g = sigma(r, 1) / s0;
        double l0 = lambda(y[0], 0), l1 = lambda(y[0], 1), l2 = lambda(y[0], 2);
        double W = l0 * l1;
        double Wp = l1 * l1 + l0 * l2;
        double s2 = s0 * s0;
        return {y[1], y[2] - (m - 1) * g * y[1] + ed * W / s2, y[3],
                -(m - 1) * g * y[3] + ed * Wp / s2 * y[2]};
    }
};

// Dormand-Prince 5(4) tableau
inline constexpr double dp_c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double dp_a[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
inline constexpr double dp_e[7] = {
    35.0 / 384 - 5179.0 / 57600,      0.0,
    500.0 / 1113 - 7571.0 / 16695,    125.0 / 192 - 393.0 / 640,
    -2187.0 / 6784 + 92097.0 / 339200, 11.0 / 84 - 187.0 / 2100,
    -1.0 / 40};

} // namespace detail

/// Integrates the profile system from s0 to r_end (either direction) with
/// componentwise local error control rel_tol*|y| + abs_tol.
inline trajectory integrate_ivp(int m, double k, const warping_function& sigma,
                                const warping_function& lambda, const ode_state& s0,
                                double r_end, const solver_config& cfg = {}) {
    detail::check_solver_config(cfg);
    if (m < 2) fail(errc::domain_error, "need m >= 2");
    for (double v : {s0.r, s0.rho, s0.rho_p, s0.F, s0.F_p})
        if (!std::isfinite(v)) fail(errc::domain_error, "initial state must be finite");
    if (!sigma.domain().contains_interior(s0.r) || !sigma.domain().contains_interior(r_end)) {
        std::ostringstream os;
        os << "integration interval [" << s0.r << ", " << r_end
           << "] not interior to the warping domain " << sigma.domain().str();
        fail(errc::domain_error, os.str());
    }

    detail::rhs_eval rhs{m, 2.0 * k, sigma, lambda};

    std::vector<ode_state> states;
    std::vector<std::array<double, 2>> accel;
    auto push = [&](double r, const std::array<double, 4>& y,
                    const std::array<double, 4>& dy) {
        states.push_back({r, y[0], y[1], y[2], y[3]});
        accel.push_back({dy[1], dy[3]});
    };

    std::array<double, 4> y{s0.rho, s0.rho_p, s0.F, s0.F_p};
    double r = s0.r;
    std::array<double, 4> k1 = rhs(r, y);
    push(r, y, k1);

    if (r_end == s0.r)
        return trajectory(std::move(states), std::move(accel), m, k, sigma, lambda);

    const double dir = r_end > s0.r ? 1.0 : -1.0;
    double h = dir * std::min(cfg.h_max, std::abs(r_end - s0.r));
    double err_old = 1e-4;
    bool rejected = false;
    long accepted = 0;

    std::array<std::array<double, 4>, 7> ks;
    while (dir * (r_end - r) > 0.0) {
        bool last = false;
        if (dir * (r + h - r_end) > 0.0) {
            h = r_end - r; // clamped final step, exempt from the underflow check
            last = true;
        }
        if (!last && std::abs(h) < cfg.h_min) {
            std::ostringstream os;
            os << "step size underflow (" << std::abs(h) << " < h_min) near r = " << r;
            fail(errc::stiffness, os.str());
        }

        ks[0] = k1;
        for (int i = 1; i < 7; ++i) {
            std::array<double, 4> yi = y;
            for (int j = 0; j < i; ++j)
                for (int c = 0; c < 4; ++c) yi[c] += h * detail::dp_a[i][j] * ks[j][c];
            ks[i] = rhs(r + detail::dp_c[i] * h, yi);
        }
        std::array<double, 4> ynew = y;
        for (int j = 0; j < 6; ++j)
            for (int c = 0; c < 4; ++c) ynew[c] += h * detail::dp_a[6][j] * ks[j][c];

        double err = 0.0;
        for (int c = 0; c < 4; ++c) {
            double e = 0.0;
            for (int j = 0; j < 7; ++j) e += detail::dp_e[j] * ks[j][c];
            e *= h;
            double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[c]), std::abs(ynew[c]));
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / 4.0);

        if (!std::isfinite(err)) {
            h *= 0.2;
            rejected = true;
            continue;
        }
        if (err <= 1.0) {
            r = last ? r_end : r + h;
            y = ynew;
            k1 = ks[6]; // FSAL: last stage is the derivative at the new point
            push(r, y, k1);
            if (++accepted > 2000000)
                fail(errc::stiffness, "accepted step budget exhausted");
            double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.14) *
                         std::pow(err_old, 0.08);
            fac = std::clamp(fac, 0.2, rejected ? 1.0 : 5.0);
            err_old = std::max(err, 1e-4);
            h = dir * std::min(std::abs(h) * fac, cfg.h_max);
            rejected = false;
        } else {
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.2, 0.9);
            rejected = true;
        }
    }

    if (dir < 0.0) {
        std::reverse(states.begin(), states.end());
        std::reverse(accel.begin(), accel.end());
    }
    return trajectory(std::move(states), std::move(accel), m, k, sigma, lambda);
}

/// State at r = eps generated by the two-parameter family of profiles regular
/// at the pole of a 4-dimensional model, rho ~ C1 r + C2 r^3 (the flat-model
/// truncation; relative truncation error is O(eps^3)).
inline ode_state regular_pole_start(int m, const eigenmap_descriptor& phi,
                                    const warping_function& lambda, double C1, double C2,
                                    double eps) {
    if (m != 4 || !is_identity_eigenmap(phi) || phi.domain_sphere_dim != 3)
        fail(errc::unsupported_start,
             "regular pole starts exist for m = 4 with the identity eigenmap of S^3 only");
    if (!(eps > 0.0) || eps > 1e-2)
        fail(errc::domain_error, "pole offset eps must lie in (0, 1e-2]");
    if (std::abs(lambda(0.0, 1) - 1.0) > 1e-8)
        fail(errc::domain_error, "pole start needs lambda'(0) = 1");
    return {eps, C1 * eps + C2 * eps * eps * eps, C1 + 3.0 * C2 * eps * eps, 12.0 * C2 * eps,
            12.0 * C2};
}

/// Left boundary mode with the full state known at r_a except (F, F'),
/// which are the shooting unknowns (initialized from the given guesses).
struct state_shot {
    double r_a = 0.0;
    double rho = 0.0;
    double rho_p = 0.0;
    double F_guess = 0.0;
    double F_p_guess = 0.0;
};

/// Left boundary mode starting regular at the pole with unknowns (C1, C2).
struct pole_shot {
    double C1_guess = 1.0;
    double C2_guess = 0.0;
    double eps = 1e-3;
};

/// Right boundary targets.
struct shoot_target {
    double r_b = 0.0;
    double rho = 0.0;
    double rho_p = 0.0;
};

struct shoot_result {
    radial_profile profile; // trajectory-backed, orders 0..2
    trajectory traj;
    double p1 = 0.0, p2 = 0.0; // converged shooting parameters
    int iterations = 0;
    double mismatch = 0.0; // final max of scaled target mismatches
};

namespace detail {

template <class MakeStart>
shoot_result shoot_newton(int m, double k, const warping_function& sigma,
                          const warping_function& lambda, double p1, double p2,
                          MakeStart&& make_start, const shoot_target& right,
                          const solver_config& cfg) {
    check_solver_config(cfg);
    auto mismatch = [&](double a, double b) -> std::pair<std::array<double, 2>, trajectory> {
        ode_state s0 = make_start(a, b);
        trajectory tr = integrate_ivp(m, k, sigma, lambda, s0, right.r_b, cfg);
        const ode_state& end = right.r_b >= s0.r ? tr.states().back() : tr.states().front();
        return {{end.rho - right.rho, end.rho_p - right.rho_p}, std::move(tr)};
    };
    auto converged = [&](const std::array<double, 2>& f) {
        return std::abs(f[0]) <= cfg.newton_tol * (1.0 + std::abs(right.rho)) &&
               std::abs(f[1]) <= cfg.newton_tol * (1.0 + std::abs(right.rho_p));
    };
    auto scaled = [&](const std::array<double, 2>& f) {
        return std::max(std::abs(f[0]) / (1.0 + std::abs(right.rho)),
                        std::abs(f[1]) / (1.0 + std::abs(right.rho_p)));
    };

    auto [f, tr] = mismatch(p1, p2);
    int iter = 0;
    while (!converged(f)) {
        if (iter >= cfg.newton_max_iter) {
            std::ostringstream os;
            os << "shooting failed to converge after " << iter
               << " iterations; final scaled mismatch " << scaled(f);
            fail(errc::no_convergence, os.str());
        }
        double d1 = cfg.fd_jacobian_step * std::max(1.0, std::abs(p1));
        double d2 = cfg.fd_jacobian_step * std::max(1.0, std::abs(p2));
        auto f1 = mismatch(p1 + d1, p2).first;
        auto f2 = mismatch(p1, p2 + d2).first;
        double J11 = (f1[0] - f[0]) / d1, J12 = (f2[0] - f[0]) / d2;
        double J21 = (f1[1] - f[1]) / d1, J22 = (f2[1] - f[1]) / d2;
        double det = J11 * J22 - J12 * J21;
        if (!std::isfinite(det) || std::abs(det) < 1e-300)
            fail(errc::no_convergence, "singular shooting Jacobian");
        p1 -= (J22 * f[0] - J12 * f[1]) / det;
        p2 -= (-J21 * f[0] + J11 * f[1]) / det;
        if (!std::isfinite(p1) || !std::isfinite(p2))
            fail(errc::no_convergence, "shooting parameters left the finite range");
        std::tie(f, tr) = mismatch(p1, p2);
        ++iter;
    }
    shoot_result out{tr.to_profile(), std::move(tr), p1, p2, iter, scaled(f)};
    return out;
}

} // namespace detail

/// Shooting with a regular-pole left end: unknowns (C1, C2).
inline shoot_result shoot_bvp(int m, double k, const warping_function& sigma,
                              const warping_function& lambda, const pole_shot& left,
                              const shoot_target& right, const solver_config& cfg = {}) {
    if (m != 4 || std::abs(2.0 * k - 3.0) > 1e-12)
        fail(errc::unsupported_start,
             "pole shooting supports m = 4 with the identity eigenmap (2k = 3) only");
    auto phi = eigenmap_catalog("identity(3)");
    auto make_start = [&, left](double C1, double C2) {
        return regular_pole_start(4, phi, lambda, C1, C2, left.eps);
    };
    return detail::shoot_newton(m, k, sigma, lambda, left.C1_guess, left.C2_guess,
                                make_start, right, cfg);
}

/// Shooting with fixed (rho, rho') at the left end: unknowns (F, F').
inline shoot_result shoot_bvp(int m, double k, const warping_function& sigma,
                              const warping_function& lambda, const state_shot& left,
                              const shoot_target& right, const solver_config& cfg = {}) {
    auto make_start = [left](double F, double Fp) {
        return ode_state{left.r_a, left.rho, left.rho_p, F, Fp};
    };
    return detail::shoot_newton(m, k, sigma, lambda, left.F_guess, left.F_p_guess,
                                make_start, right, cfg);
}

} // namespace bhl
