#pragma once

/// Closed-form families on Euclidean domains and the conformal classification
/// machinery in dimension 4.
///
/// On R^m (sigma = r) with eigenmap energy density 2k and flat target, the
/// radial tension equation has indicial roots
///
///   k_{+,-} = (-(m-2) +- sqrt((m-2)^2 + 8k)) / 2,
///
/// spanning the harmonic profiles r^{k_+}, r^{k_-}.  Biharmonic profiles add
/// the particular solutions r^{k_pm + 2}, except along the degenerate branch
/// m + 2 k_- = 0 where r ln r type terms appear.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "bhl/error.hpp"
#include "bhl/geometry.hpp"
#include "bhl/profiles.hpp"
#include "bhl/tension.hpp"

namespace bhl {

/// Indicial roots of the Euclidean radial tension equation, k_plus >= k_minus.
struct exponent_pair {
    double k_plus;
    double k_minus;
};

/// Both roots of kappa^2 + (m-2) kappa - 2k = 0.
inline exponent_pair euclidean_exponents(int m, double k) {
    if (m < 2) fail(errc::domain_error, "need m >= 2, got " + std::to_string(m));
    if (!(k > 0.0)) fail(errc::domain_error, "need k > 0");
    double disc = std::sqrt((m - 2.0) * (m - 2.0) + 8.0 * k);
    return {(-(m - 2.0) + disc) / 2.0, (-(m - 2.0) - disc) / 2.0};
}

/// Term list of the harmonic family c1 r^{k_plus} + c2 r^{k_minus}.
inline std::vector<poly_term> harmonic_family_terms(int m, double k, double c1, double c2) {
    exponent_pair e = euclidean_exponents(m, k);
    return {{c1, e.k_plus, false}, {c2, e.k_minus, false}};
}

/// General solution c1 r^{k_plus} + c2 r^{k_minus} of the harmonic equation.
inline radial_profile harmonic_family(int m, double k, double c1, double c2) {
    return make_polynomial_profile(harmonic_family_terms(m, k, c1, c2));
}

struct family_coefficients {
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
};

/// Term list of the fourth-order family on R^m:
///
///   c1/(2(m+2k_plus)) r^{k_plus+2} + c2/(2(m+2k_minus)) r^{k_minus+2}
///     + c3 r^{k_plus} + c4 r^{k_minus},
///
/// whose tension is then c1 r^{k_plus} + c2 r^{k_minus}.  The branch
/// m + 2 k_minus = 0 is only solvable in closed form for (m=2, k=1/2),
/// where the family is c1 r^3 + c2 r ln r + c3 r + c4 r^{-1}.
inline std::vector<poly_term> biharmonic_family_terms(int m, double k,
                                                      const family_coefficients& c) {
    exponent_pair e = euclidean_exponents(m, k);
    double dplus = m + 2.0 * e.k_plus;
    double dminus = m + 2.0 * e.k_minus;
    if (std::abs(dplus) < 1e-9)
        fail(errc::degenerate_family,
             "denominator m + 2 k_plus vanishes for m = " + std::to_string(m));
    if (std::abs(dminus) < 1e-9) {
        if (m != 2) {
            std::ostringstream os;
            os << "denominator m + 2 k_minus vanishes for m = " << m << ", k = " << k
               << "; no closed-form branch available";
            fail(errc::degenerate_family, os.str());
        }
        // m = 2, k = 1/2: exponents +-1, resonant second particular solution
        return {{c.c1, 3.0, false}, {c.c2, 1.0, true}, {c.c3, 1.0, false}, {c.c4, -1.0, false}};
    }
    return {{c.c1 / (2.0 * dplus), e.k_plus + 2.0, false},
            {c.c2 / (2.0 * dminus), e.k_minus + 2.0, false},
            {c.c3, e.k_plus, false},
            {c.c4, e.k_minus, false}};
}

/// Tension scalar of the same member: c1 r^{k_plus} + c2 r^{k_minus}, or
/// 8 c1 r + 2 c2 / r along the logarithmic branch.
inline std::vector<poly_term> biharmonic_family_tension_terms(int m, double k,
                                                              const family_coefficients& c) {
    exponent_pair e = euclidean_exponents(m, k);
    if (m == 2 && std::abs(m + 2.0 * e.k_minus) < 1e-9)
        return {{8.0 * c.c1, 1.0, false}, {2.0 * c.c2, -1.0, false}};
    return {{c.c1, e.k_plus, false}, {c.c2, e.k_minus, false}};
}

inline radial_profile biharmonic_family(int m, double k, const family_coefficients& c) {
    return make_polynomial_profile(biharmonic_family_terms(m, k, c));
}

/// Term lists splitting the biharmonic member with the given coefficients
/// as rho(r) = r^2 rho1(r) + rho2(r) with both components harmonic:
/// rho1 = c1/(2(m+2k_plus)) r^{k_plus} + c2/(2(m+2k_minus)) r^{k_minus},
/// rho2 = c3 r^{k_plus} + c4 r^{k_minus}.
inline std::pair<std::vector<poly_term>, std::vector<poly_term>> almansi_terms(
    int m, double k, const family_coefficients& c) {
    if (m == 2)
        fail(errc::not_applicable,
             "the m = 2 logarithmic branch admits no such decomposition");
    exponent_pair e = euclidean_exponents(m, k);
    double dplus = m + 2.0 * e.k_plus;
    double dminus = m + 2.0 * e.k_minus;
    if (std::abs(dplus) < 1e-9 || std::abs(dminus) < 1e-9)
        fail(errc::degenerate_family,
             "denominator m + 2 k_minus vanishes; decomposition undefined");
    std::vector<poly_term> rho1{{c.c1 / (2.0 * dplus), e.k_plus, false},
                                {c.c2 / (2.0 * dminus), e.k_minus, false}};
    std::vector<poly_term> rho2{{c.c3, e.k_plus, false}, {c.c4, e.k_minus, false}};
    return {rho1, rho2};
}

inline std::pair<radial_profile, radial_profile> almansi_decompose(
    int m, double k, const family_coefficients& c) {
    auto [t1, t2] = almansi_terms(m, k, c);
    return {make_polynomial_profile(t1), make_polynomial_profile(t2)};
}

enum class classified_map { inversion, stereographic, hyperbolic };

namespace detail {

inline radial_profile arctan_profile() {
    radial_profile p;
    p.max_order = 4;
    p.domain = interval{0.0, infinity, true, false};
    p.eval = [](double r, int k) {
        double q = 1.0 + r * r;
        switch (k) {
        case 0: return 2.0 * std::atan(r);
        case 1: return 2.0 / q;
        case 2: return -4.0 * r / (q * q);
        case 3: return (12.0 * r * r - 4.0) / (q * q * q);
        default: return 48.0 * r * (1.0 - r * r) / (q * q * q * q);
        }
    };
    return p;
}

inline radial_profile artanh_profile() {
    radial_profile p;
    p.max_order = 4;
    p.domain = interval{0.0, 1.0, true, false};
    p.eval = [](double r, int k) {
        double q = 1.0 - r * r;
        switch (k) {
        case 0: return std::log((1.0 + r) / (1.0 - r)); // 2 artanh r
        case 1: return 2.0 / q;
        case 2: return 4.0 * r / (q * q);
        case 3: return (4.0 + 12.0 * r * r) / (q * q * q);
        default: return 48.0 * r * (1.0 + r * r) / (q * q * q * q);
        }
    };
    return p;
}

} // namespace detail

/// The three proper biharmonic conformal maps from 4-dimensional Euclidean
/// domains: the sphere inversion rho = 1/r, the inverse stereographic
/// projection rho = 2 arctan r into the round sphere, and rho = 2 artanh r
/// from the unit ball into hyperbolic space.
inline equivariant_map classification_map(classified_map which) {
    model_space dom(4, warping_function::flat());
    auto id3 = eigenmap_catalog("identity(3)");
    switch (which) {
    case classified_map::inversion:
        return equivariant_map(dom, model_space(4, warping_function::flat()), id3,
                               make_polynomial_profile({{1.0, -1.0, false}}));
    case classified_map::stereographic:
        return equivariant_map(dom, model_space(4, warping_function::spherical()), id3,
                               detail::arctan_profile());
    case classified_map::hyperbolic:
        return equivariant_map(dom, model_space(4, warping_function::hyperbolic()), id3,
                               detail::artanh_profile());
    }
    fail(errc::domain_error, "corrupt classification choice");
}

inline equivariant_map classification_map(const std::string& which) {
    if (which == "inversion") return classification_map(classified_map::inversion);
    if (which == "stereographic") return classification_map(classified_map::stereographic);
    if (which == "hyperbolic") return classification_map(classified_map::hyperbolic);
    fail(errc::catalog_miss, "unknown classification map '" + which +
                                 "'; choices: inversion, stereographic, hyperbolic");
}

/// Change of variable mapping the conformal parameter t back to the radius:
/// r = e^t for flat domains (c = 0), r = 2 arctan e^t for c = +1 and
/// r = 2 artanh e^t for c = -1 (which needs e^t < 1, i.e. t < 0).
inline double conformal_change_of_variable(int c, double t) {
    switch (c) {
    case 0: return std::exp(t);
    case 1: return 2.0 * std::atan(std::exp(t));
    case -1: {
        if (t >= 0.0)
            fail(errc::domain_error,
                 "c = -1 change of variable needs t < 0, got t = " + std::to_string(t));
        double x = std::exp(t);
        return std::log((1.0 + x) / (1.0 - x));
    }
    default:
        fail(errc::domain_error,
             "curvature label must be -1, 0 or +1, got " + std::to_string(c));
    }
}

/// Diagnostics of the conformal factor u = lambda(rho)/sigma of a conformal
/// map between 4-dimensional model spaces with domain curvature c.
struct conformal_factor_report {
    double A = 0.0;            // grid mean of A(r)
    double A_spread = 0.0;     // max - min of A(r); small when A is constant
    double residual_sup = 0.0; // sup |Delta u - 3 c u - A u^3|
};

/// Computes A(r) = -(Scal(rho(r)) + 6 c / u^2) / 6 pointwise on a grid,
/// reports its mean and spread, and checks the conformal-factor equation
/// Delta u = 3 c u + A u^3 with the mean value.  Inputs must be conformal
/// rotationally symmetric maps between 4-dimensional models.
inline conformal_factor_report conformal_factor_residual(const equivariant_map& map,
                                                         double c, double a = 0.2,
                                                         double b = 0.8, int n = 50) {
    if (map.domain.dimension != 4 || map.target.dimension != 4)
        fail(errc::not_applicable, "conformal classification works in dimension 4 only");
    if (!rotationally_symmetric(map))
        fail(errc::not_applicable, "conformal classification needs a rotationally symmetric map");
    if (n < 8) fail(errc::domain_error, "conformal factor grid needs at least 8 points");
    if (!(a < b)) fail(errc::domain_error, "conformal factor grid needs a < b");

    const warping_function& sig = map.domain.warping;
    const warping_function& lam = map.target.warping;

    double conf_sup = 0.0;
    for (int i = 0; i < n; ++i) {
        double r = a + (b - a) * i / (n - 1);
        conf_sup = std::max(conf_sup, std::abs(conformality_residual(map, r)));
        double K = radial_curvature(sig, r);
        if (std::abs(K - c) > 1e-8) {
            std::ostringstream os;
            os << "domain curvature at r = " << r << " is " << K
               << ", not the supplied constant " << c;
            fail(errc::domain_error, os.str());
        }
    }
    if (conf_sup > 1e-8) {
        std::ostringstream os;
        os << "map is not conformal: sup | |rho'| sigma - lambda(rho) | = " << conf_sup;
        fail(errc::not_conformal, os.str());
    }

    std::vector<double> Avals(n);
    std::vector<double> uvals(n), lap_u(n);
    for (int i = 0; i < n; ++i) {
        double r = a + (b - a) * i / (n - 1);
        double rho = profile_eval(map.profile, r, 0);
        double r1 = profile_eval(map.profile, r, 1);
        double r2 = profile_eval(map.profile, r, 2);
        double s0 = detail::sigma_checked(sig, r);
        double s1 = sig(r, 1), s2 = sig(r, 2);
        double l0 = lam(rho, 0), l1 = lam(rho, 1), l2 = lam(rho, 2);

        double u = l0 / s0;
        double up = l1 * r1 / s0 - l0 * s1 / (s0 * s0);
        double upp = (l2 * r1 * r1 + l1 * r2) / s0 - 2.0 * l1 * r1 * s1 / (s0 * s0) -
                     l0 * s2 / (s0 * s0) + 2.0 * l0 * s1 * s1 / (s0 * s0 * s0);
        uvals[i] = u;
        lap_u[i] = upp + 3.0 * (s1 / s0) * up;
        double scal = target_scalar_curvature(map.target, rho);
        Avals[i] = -(scal + 6.0 * c / (u * u)) / 6.0;
    }
    conformal_factor_report rep;
    double lo = Avals[0], hi = Avals[0], sum = 0.0;
    for (double v : Avals) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        sum += v;
    }
    rep.A = sum / n;
    rep.A_spread = hi - lo;
    for (int i = 0; i < n; ++i) {
        double res = lap_u[i] - 3.0 * c * uvals[i] - rep.A * uvals[i] * uvals[i] * uvals[i];
        rep.residual_sup = std::max(rep.residual_sup, std::abs(res));
    }
    return rep;
}

/// Target warping of a conformal proper biharmonic map with the given
/// conformal-factor constant A and domain curvature c:
///
///   A = 0:  lambda(rho) = sqrt(1+c) rho          (flat target, needs c > -1)
///   A > 0:  lambda(rho) = C sinh(sqrt(2A)/2 rho) (hyperbolic space form)
///   A < 0:  lambda(rho) = C sin(sqrt(2|A|)/2 rho) (spherical space form)
inline warping_function classify_conformal_target(double A, double c, double C = 1.0) {
    if (A == 0.0) {
        if (c <= -1.0)
            fail(errc::degenerate_target,
                 "flat branch needs c > -1, got c = " + std::to_string(c));
        double slope = std::sqrt(1.0 + c);
        return warping_function::custom(
            [slope](double rho, int k) {
                switch (k) {
                case 0: return slope * rho;
                case 1: return slope;
                default: return 0.0;
                }
            },
            interval{0.0, infinity, true, false}, /*check_boundary=*/false);
    }
    if (!(C > 0.0)) fail(errc::domain_error, "scale C must be positive");
    if (A > 0.0) {
        double w = std::sqrt(2.0 * A) / 2.0;
        return warping_function::custom(
            [w, C](double rho, int k) {
                switch (k) {
                case 0: return C * std::sinh(w * rho);
                case 1: return C * w * std::cosh(w * rho);
                case 2: return C * w * w * std::sinh(w * rho);
                default: return C * w * w * w * std::cosh(w * rho);
                }
            },
            interval{0.0, infinity, true, false}, /*check_boundary=*/false);
    }
    double w = std::sqrt(-2.0 * A) / 2.0;
    double pi = std::acos(-1.0);
    return warping_function::custom(
        [w, C](double rho, int k) {
            switch (k) {
            case 0: return C * std::sin(w * rho);
            case 1: return C * w * std::cos(w * rho);
            case 2: return -C * w * w * std::sin(w * rho);
            default: return -C * w * w * w * std::cos(w * rho);
            }
        },
        interval{0.0, pi / w, true, true}, /*check_boundary=*/false);
}

} // namespace bhl
