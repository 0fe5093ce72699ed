#pragma once

/// Tension and bitension of equivariant maps.
///
/// For a map (r, theta) -> (rho(r), phi(theta)) with domain warping sigma,
/// target warping lambda and eigenmap energy density 2k, the tension field
/// is tau = F(r) d/drho with
///
///   F = rho'' + (m-1)(sigma'/sigma) rho' - 2k lambda lambda'(rho) / sigma^2,
///
/// and the map is biharmonic exactly when
///
///   F'' + (m-1)(sigma'/sigma) F' - 2k (lambda lambda')'(rho) / sigma^2 F = 0.

#include <cmath>
#include <concepts>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bhl/error.hpp"
#include "bhl/geometry.hpp"
#include "bhl/profiles.hpp"

namespace bhl {

namespace detail {

/// lambda lambda' and its first two derivatives at rho, with domain errors
/// on lambda reported as range escapes of the profile.
struct target_w {
    double w, wp, wpp;
};

inline target_w target_w_at(const warping_function& lambda, double rho) {
    if (!lambda.domain().contains(rho)) {
        std::ostringstream os;
        os << "profile value rho = " << rho << " outside target warping domain "
           << lambda.domain().str();
        fail(errc::range_error, os.str());
    }
    double l0 = lambda(rho, 0), l1 = lambda(rho, 1), l2 = lambda(rho, 2), l3 = lambda(rho, 3);
    return {l0 * l1, l1 * l1 + l0 * l2, 3.0 * l1 * l2 + l0 * l3};
}

inline double sigma_checked(const warping_function& sigma, double r) {
    double s = sigma(r, 0);
    if (std::abs(s) < 1e-12) {
        std::ostringstream os;
        os << "domain warping vanishes at r = " << r;
        fail(errc::singularity, os.str());
    }
    return s;
}

inline double fd_step(double r) { return 1e-4 * std::max(1.0, std::abs(r)); }

/// Checks that the 5-point stencil r +- 2h stays inside both the domain
/// warping and the profile domain.
inline void check_stencil(const equivariant_map& map, double r, double h) {
    const interval& dw = map.domain.warping.domain();
    const interval& dp = map.profile.domain;
    for (double x : {r - 2.0 * h, r + 2.0 * h}) {
        if (!dw.contains(x) || !dp.contains(x)) {
            std::ostringstream os;
            os << "finite-difference stencil at r = " << r << " (step " << h
               << ") leaves the domain";
            fail(errc::stencil_error, os.str());
        }
    }
}

} // namespace detail

/// Radial Laplacian of a radial function alpha on a model space:
/// Delta alpha = alpha'' + (m-1)(sigma'/sigma) alpha'.
template <class Fn>
    requires std::invocable<Fn&, double, int>
double radial_laplacian(const model_space& domain, Fn&& alpha, double r) {
    double s = detail::sigma_checked(domain.warping, r);
    double g = domain.warping(r, 1) / s;
    return alpha(r, 2) + (domain.dimension - 1) * g * alpha(r, 1);
}

inline double radial_laplacian(const model_space& domain, const radial_profile& alpha,
                               double r) {
    return radial_laplacian(domain,
                            [&](double x, int k) { return profile_eval(alpha, x, k); }, r);
}

/// Tension scalar F(r); tau(phi) = F d/drho.
inline double tension_F(const equivariant_map& map, double r) {
    const int m = map.domain.dimension;
    const double ed = map.eigenmap.energy_density;
    double rho = profile_eval(map.profile, r, 0);
    double rho1 = profile_eval(map.profile, r, 1);
    double rho2 = profile_eval(map.profile, r, 2);
    double s0 = detail::sigma_checked(map.domain.warping, r);
    double g = map.domain.warping(r, 1) / s0;
    double w = detail::target_w_at(map.target.warping, rho).w;
    return rho2 + (m - 1) * g * rho1 - ed * w / (s0 * s0);
}

namespace detail {

struct tension_derivs {
    double F, Fp, Fpp;
};

/// F together with F', F''.  Uses exact chain-rule derivatives when the
/// profile carries order-4 data, otherwise 5-point central differences of
/// tension_F with step max(1e-4, 1e-4 r).
inline tension_derivs tension_with_derivs(const equivariant_map& map, double r) {
    const int m = map.domain.dimension;
    const double ed = map.eigenmap.energy_density;
    if (map.profile.max_order >= 4) {
        double rho = profile_eval(map.profile, r, 0);
        double r1 = profile_eval(map.profile, r, 1);
        double r2 = profile_eval(map.profile, r, 2);
        double r3 = profile_eval(map.profile, r, 3);
        double r4 = profile_eval(map.profile, r, 4);
        const warping_function& sig = map.domain.warping;
        double s0 = sigma_checked(sig, r);
        double s1 = sig(r, 1), s2 = sig(r, 2), s3 = sig(r, 3);
        double g = s1 / s0;
        double gp = s2 / s0 - g * g;
        double gpp = s3 / s0 - 3.0 * s1 * s2 / (s0 * s0) + 2.0 * g * g * g;
        double s = 1.0 / (s0 * s0);
        double sp = -2.0 * s1 / (s0 * s0 * s0);
        double spp = -2.0 * s2 / (s0 * s0 * s0) + 6.0 * s1 * s1 / (s0 * s0 * s0 * s0);
        target_w W = target_w_at(map.target.warping, rho);
        double u = W.w, up = W.wp * r1, upp = W.wpp * r1 * r1 + W.wp * r2;
        double F = r2 + (m - 1) * g * r1 - ed * u * s;
        double Fp = r3 + (m - 1) * (gp * r1 + g * r2) - ed * (up * s + u * sp);
        double Fpp = r4 + (m - 1) * (gpp * r1 + 2.0 * gp * r2 + g * r3) -
                     ed * (upp * s + 2.0 * up * sp + u * spp);
        return {F, Fp, Fpp};
    }
    double h = fd_step(r);
    check_stencil(map, r, h);
    double f2m = tension_F(map, r - 2.0 * h);
    double f1m = tension_F(map, r - h);
    double f0 = tension_F(map, r);
    double f1p = tension_F(map, r + h);
    double f2p = tension_F(map, r + 2.0 * h);
    double Fp = (-f2p + 8.0 * f1p - 8.0 * f1m + f2m) / (12.0 * h);
    double Fpp = (-f2p + 16.0 * f1p - 30.0 * f0 + 16.0 * f1m - f2m) / (12.0 * h * h);
    return {f0, Fp, Fpp};
}

} // namespace detail

/// Bitension residual in the variational form
/// F'' + (m-1)(sigma'/sigma) F' - 2k (lambda lambda')'(rho)/sigma^2 F.
/// Identically zero along biharmonic maps.
inline double bitension_residual(const equivariant_map& map, double r) {
    const int m = map.domain.dimension;
    const double ed = map.eigenmap.energy_density;
    detail::tension_derivs d = detail::tension_with_derivs(map, r);
    double s0 = detail::sigma_checked(map.domain.warping, r);
    double g = map.domain.warping(r, 1) / s0;
    double rho = profile_eval(map.profile, r, 0);
    double wp = detail::target_w_at(map.target.warping, rho).wp;
    return d.Fpp + (m - 1) * g * d.Fp - ed * wp / (s0 * s0) * d.F;
}

/// The same residual assembled through iterated radial Laplacians:
///
///   Delta^2 rho - 2k Delta(lambda lambda'(rho)/sigma^2)
///     - 2k (lambda lambda')'(rho)/sigma^2 (Delta rho - 2k lambda lambda'(rho)/sigma^2).
///
/// Algebraically equal to bitension_residual; computed along a different
/// route as a cross-check.
inline double bitension_residual_alt(const equivariant_map& map, double r) {
    const int m = map.domain.dimension;
    const double ed = map.eigenmap.energy_density;
    const warping_function& sig = map.domain.warping;
    double s0 = detail::sigma_checked(sig, r);
    double s1 = sig(r, 1);
    double g = s1 / s0;
    double rho = profile_eval(map.profile, r, 0);
    detail::target_w W = detail::target_w_at(map.target.warping, rho);

    double lap, lap_p, lap_pp;   // Delta rho and derivatives
    double hh, hh_p, hh_pp;      // lambda lambda'(rho)/sigma^2 and derivatives
    if (map.profile.max_order >= 4) {
        double r1 = profile_eval(map.profile, r, 1);
        double r2 = profile_eval(map.profile, r, 2);
        double r3 = profile_eval(map.profile, r, 3);
        double r4 = profile_eval(map.profile, r, 4);
        double s2 = sig(r, 2), s3 = sig(r, 3);
        double gp = s2 / s0 - g * g;
        double gpp = s3 / s0 - 3.0 * s1 * s2 / (s0 * s0) + 2.0 * g * g * g;
        double s = 1.0 / (s0 * s0);
        double sp = -2.0 * s1 / (s0 * s0 * s0);
        double spp = -2.0 * s2 / (s0 * s0 * s0) + 6.0 * s1 * s1 / (s0 * s0 * s0 * s0);
        double u = W.w, up = W.wp * r1, upp = W.wpp * r1 * r1 + W.wp * r2;
        lap = r2 + (m - 1) * g * r1;
        lap_p = r3 + (m - 1) * (gp * r1 + g * r2);
        lap_pp = r4 + (m - 1) * (gpp * r1 + 2.0 * gp * r2 + g * r3);
        hh = u * s;
        hh_p = up * s + u * sp;
        hh_pp = upp * s + 2.0 * up * sp + u * spp;
    } else {
        double h = detail::fd_step(r);
        detail::check_stencil(map, r, h);
        auto lap_at = [&](double x) {
            return radial_laplacian(
                map.domain, [&](double y, int k) { return profile_eval(map.profile, y, k); },
                x);
        };
        auto hh_at = [&](double x) {
            double rx = profile_eval(map.profile, x, 0);
            double sx = detail::sigma_checked(sig, x);
            return detail::target_w_at(map.target.warping, rx).w / (sx * sx);
        };
        double l2m = lap_at(r - 2.0 * h), l1m = lap_at(r - h), l0 = lap_at(r);
        double l1p = lap_at(r + h), l2p = lap_at(r + 2.0 * h);
        double q2m = hh_at(r - 2.0 * h), q1m = hh_at(r - h), q0 = hh_at(r);
        double q1p = hh_at(r + h), q2p = hh_at(r + 2.0 * h);
        lap = l0;
        lap_p = (-l2p + 8.0 * l1p - 8.0 * l1m + l2m) / (12.0 * h);
        lap_pp = (-l2p + 16.0 * l1p - 30.0 * l0 + 16.0 * l1m - l2m) / (12.0 * h * h);
        hh = q0;
        hh_p = (-q2p + 8.0 * q1p - 8.0 * q1m + q2m) / (12.0 * h);
        hh_pp = (-q2p + 16.0 * q1p - 30.0 * q0 + 16.0 * q1m - q2m) / (12.0 * h * h);
    }
    double lap2_rho = lap_pp + (m - 1) * g * lap_p;
    double lap_hh = hh_pp + (m - 1) * g * hh_p;
    return lap2_rho - ed * lap_hh - ed * W.wp / (s0 * s0) * (lap - ed * hh);
}

/// |rho'(r)| sigma(r) - lambda(rho(r)).  Vanishes exactly when the
/// (rotationally symmetric) map is conformal.
inline double conformality_residual(const equivariant_map& map, double r) {
    if (!rotationally_symmetric(map))
        fail(errc::not_applicable,
             "conformality residual defined for rotationally symmetric maps only");
    double rho = profile_eval(map.profile, r, 0);
    double rho1 = profile_eval(map.profile, r, 1);
    double s0 = map.domain.warping(r, 0);
    if (!map.target.warping.domain().contains(rho)) {
        std::ostringstream os;
        os << "profile value rho = " << rho << " outside target warping domain "
           << map.target.warping.domain().str();
        fail(errc::range_error, os.str());
    }
    return std::abs(rho1) * s0 - map.target.warping(rho, 0);
}

/// Residuals of a latitude map theta -> (rho0, phi(theta)):
///   F = -2k lambda lambda'(rho0),  bitension = -2k (lambda lambda')'(rho0) F.
struct latitude_residual_data {
    double F;
    double bitension;
};

inline latitude_residual_data latitude_residuals(const latitude_map& map) {
    const double ed = map.eigenmap.energy_density;
    detail::target_w W = detail::target_w_at(map.target.warping, map.rho0);
    double F = -ed * W.w;
    return {F, -ed * W.wp * F};
}

struct tolerances {
    double tau_h = 1e-8; // harmonicity threshold on sup |F|
    double tau_b = 1e-6; // biharmonicity threshold on sup |bitension|
};

enum class verdict { harmonic, proper_biharmonic, neither };

inline const char* verdict_name(verdict v) {
    switch (v) {
    case verdict::harmonic: return "harmonic";
    case verdict::proper_biharmonic: return "proper_biharmonic";
    case verdict::neither: return "neither";
    }
    return "unknown";
}

/// Grid evaluation of all residuals with sup and root-mean-square norms.
struct residual_report_data {
    double a = 0.0, b = 0.0;
    std::vector<double> grid;
    std::vector<double> F_values;
    std::vector<double> bitension_values;
    std::vector<double> conformal_values; // empty unless rotationally symmetric
    double F_sup = 0.0, F_l2 = 0.0;
    double bitension_sup = 0.0, bitension_l2 = 0.0;
    std::optional<double> conformal_sup;
    verdict classification = verdict::neither;
};

/// Evaluates F, the bitension residual and (when defined) the conformality
/// residual on a uniform n-point grid over [a, b] and classifies the map:
/// harmonic if sup |F| <= tau_h, proper biharmonic if additionally proper
/// (sup |F| > tau_h) and sup |bitension| <= tau_b, otherwise neither.
inline residual_report_data residual_report(const equivariant_map& map, double a, double b,
                                            int n, tolerances tol = {}) {
    if (n < 8) fail(errc::domain_error, "residual report needs at least 8 grid points");
    if (!(a < b)) fail(errc::domain_error, "residual report needs a < b");
    residual_report_data rep;
    rep.a = a;
    rep.b = b;
    const bool conf = rotationally_symmetric(map);
    double sumF2 = 0.0, sumB2 = 0.0, csup = 0.0;
    for (int i = 0; i < n; ++i) {
        double r = a + (b - a) * i / (n - 1);
        try {
            double F = tension_F(map, r);
            double bt = bitension_residual(map, r);
            rep.grid.push_back(r);
            rep.F_values.push_back(F);
            rep.bitension_values.push_back(bt);
            rep.F_sup = std::max(rep.F_sup, std::abs(F));
            rep.bitension_sup = std::max(rep.bitension_sup, std::abs(bt));
            sumF2 += F * F;
            sumB2 += bt * bt;
            if (conf) {
                double c = conformality_residual(map, r);
                rep.conformal_values.push_back(c);
                csup = std::max(csup, std::abs(c));
            }
        } catch (const error& e) {
            std::ostringstream os;
            os << "residual evaluation failed at r = " << r << ": " << e.what();
            fail(e.code(), os.str());
        }
    }
    rep.F_l2 = std::sqrt(sumF2 / n);
    rep.bitension_l2 = std::sqrt(sumB2 / n);
    if (conf) rep.conformal_sup = csup;
    if (rep.F_sup <= tol.tau_h)
        rep.classification = verdict::harmonic;
    else if (rep.bitension_sup <= tol.tau_b)
        rep.classification = verdict::proper_biharmonic;
    else
        rep.classification = verdict::neither;
    return rep;
}

} // namespace bhl
