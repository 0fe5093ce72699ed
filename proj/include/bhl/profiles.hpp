#pragma once

/// Radial profiles and equivariant map data.
///
/// An equivariant map between model spaces (M^m, dr^2 + sigma^2 g) and
/// (N^n, drho^2 + lambda^2 g) is determined by a sphere eigenmap
/// phi : S^{m-1} -> S^{n-1} with constant energy density and a radial
/// profile rho(r); the map sends (r, theta) to (rho(r), phi(theta)).

#include <cmath>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bhl/error.hpp"
#include "bhl/geometry.hpp"

namespace bhl {

/// Radial profile rho(r) with derivatives up to max_order (2 or 4).
/// Profiles are immutable value types; eval is (r, order) -> rho^(order)(r)
/// and is only called with arguments already validated by profile_eval.
struct radial_profile {
    std::function<double(double, int)> eval;
    int max_order = 2;
    interval domain{0.0, infinity, false, false};
};

inline double profile_eval(const radial_profile& p, double r, int order = 0) {
    if (!p.eval) fail(errc::empty_profile, "profile has no evaluator");
    if (order < 0 || order > p.max_order)
        fail(errc::unsupported_order,
             "profile provides derivatives to order " + std::to_string(p.max_order) +
                 ", requested " + std::to_string(order));
    if (!p.domain.contains(r)) {
        std::ostringstream os;
        os << "profile argument " << r << " outside domain " << p.domain.str();
        fail(errc::domain_error, os.str());
    }
    return p.eval(r, order);
}

/// One monomial c * r^p, optionally times ln r.
struct poly_term {
    double coefficient = 0.0;
    double exponent = 0.0;
    bool log = false;
};

namespace detail {

inline std::vector<poly_term> differentiate_terms(const std::vector<poly_term>& terms) {
    std::vector<poly_term> out;
    for (const auto& t : terms) {
        if (t.log) {
            // d/dr [c r^p ln r] = c p r^{p-1} ln r + c r^{p-1}
            if (t.coefficient * t.exponent != 0.0)
                out.push_back({t.coefficient * t.exponent, t.exponent - 1.0, true});
            out.push_back({t.coefficient, t.exponent - 1.0, false});
        } else if (t.coefficient * t.exponent != 0.0) {
            out.push_back({t.coefficient * t.exponent, t.exponent - 1.0, false});
        }
    }
    return out;
}

inline double eval_terms(const std::vector<poly_term>& terms, double r) {
    double acc = 0.0;
    for (const auto& t : terms) {
        double v = t.coefficient * std::pow(r, t.exponent);
        if (t.log) v *= std::log(r);
        acc += v;
    }
    return acc;
}

} // namespace detail

/// Profile built from power terms, with exact derivatives to order 4 on
/// (0, inf).  Term lists for each derivative order are expanded once at
/// construction.
inline radial_profile make_polynomial_profile(const std::vector<poly_term>& terms) {
    if (terms.empty()) fail(errc::empty_profile, "polynomial profile needs at least one term");
    auto orders = std::make_shared<std::vector<std::vector<poly_term>>>();
    orders->push_back(terms);
    for (int k = 1; k <= 4; ++k)
        orders->push_back(detail::differentiate_terms((*orders)[k - 1]));
    radial_profile p;
    p.eval = [orders](double r, int order) {
        return detail::eval_terms((*orders)[static_cast<size_t>(order)], r);
    };
    p.max_order = 4;
    p.domain = interval{0.0, infinity, false, false};
    return p;
}

/// Profile r -> p(r) + t * v(r); derivative order is the weaker of the two,
/// the domain their intersection.
inline radial_profile perturb_profile(const radial_profile& p, const radial_profile& v,
                                      double t) {
    if (!p.eval || !v.eval) fail(errc::empty_profile, "perturb_profile needs evaluators");
    radial_profile out;
    out.max_order = std::min(p.max_order, v.max_order);
    out.domain.lo = std::max(p.domain.lo, v.domain.lo);
    out.domain.hi = std::min(p.domain.hi, v.domain.hi);
    out.domain.closed_lo = (p.domain.lo == out.domain.lo ? p.domain.closed_lo : true) &&
                           (v.domain.lo == out.domain.lo ? v.domain.closed_lo : true);
    out.domain.closed_hi = (p.domain.hi == out.domain.hi ? p.domain.closed_hi : true) &&
                           (v.domain.hi == out.domain.hi ? v.domain.closed_hi : true);
    auto pe = p.eval, ve = v.eval;
    out.eval = [pe, ve, t](double r, int order) {
        return pe(r, order) + t * ve(r, order);
    };
    return out;
}

/// Sphere eigenmap phi : S^{domain_sphere_dim} -> S^{target_sphere_dim} with
/// |d phi|^2 = energy_density (the "2k" of the reduction formulas).
struct eigenmap_descriptor {
    std::string name;
    int domain_sphere_dim = 0;
    int target_sphere_dim = 0;
    double energy_density = 0.0;
};

/// Closed catalog of eigenmaps addressable by name:
///   identity(d)  S^d -> S^d,   2k = d
///   power(d)     S^1 -> S^1, z -> z^d,  2k = d^2
///   hopf         S^3 -> S^2,   2k = 8
inline eigenmap_descriptor eigenmap_catalog(const std::string& name) {
    auto parse_arg = [&](const std::string& prefix) -> int {
        if (name.size() <= prefix.size() + 1 || name.compare(0, prefix.size(), prefix) != 0 ||
            name[prefix.size()] != '(' || name.back() != ')')
            return -1;
        std::string digits = name.substr(prefix.size() + 1, name.size() - prefix.size() - 2);
        if (digits.empty()) return -1;
        for (char c : digits)
            if (c < '0' || c > '9') return -1;
        return std::stoi(digits);
    };
    if (name == "hopf") return {"hopf", 3, 2, 8.0};
    if (int d = parse_arg("identity"); d >= 1)
        return {"identity(" + std::to_string(d) + ")", d, d, static_cast<double>(d)};
    if (int d = parse_arg("power"); d >= 1)
        return {"power(" + std::to_string(d) + ")", 1, 1, static_cast<double>(d) * d};
    fail(errc::catalog_miss, "unknown eigenmap '" + name +
                                 "'; catalog: identity(d), power(d), hopf");
}

inline bool is_identity_eigenmap(const eigenmap_descriptor& e) {
    return e.domain_sphere_dim == e.target_sphere_dim &&
           e.energy_density == static_cast<double>(e.domain_sphere_dim);
}

/// Equivariant map between model spaces.
struct equivariant_map {
    model_space domain;
    model_space target;
    eigenmap_descriptor eigenmap;
    radial_profile profile;

    equivariant_map(model_space dom, model_space tgt, eigenmap_descriptor phi,
                    radial_profile rho)
        : domain(std::move(dom)), target(std::move(tgt)), eigenmap(std::move(phi)),
          profile(std::move(rho)) {
        if (eigenmap.domain_sphere_dim != domain.dimension - 1)
            fail(errc::domain_error,
                 "eigenmap " + eigenmap.name + " starts on S^" +
                     std::to_string(eigenmap.domain_sphere_dim) + ", domain needs S^" +
                     std::to_string(domain.dimension - 1));
        if (eigenmap.target_sphere_dim != target.dimension - 1)
            fail(errc::domain_error,
                 "eigenmap " + eigenmap.name + " lands in S^" +
                     std::to_string(eigenmap.target_sphere_dim) + ", target needs S^" +
                     std::to_string(target.dimension - 1));
    }
};

/// The map is rotationally symmetric exactly when the sphere part is the
/// identity (so 2k = m - 1).
inline bool rotationally_symmetric(const equivariant_map& map) {
    return is_identity_eigenmap(map.eigenmap);
}

/// Latitude map: theta -> (rho0, phi(theta)) from the round sphere
/// S^{domain_sphere_dim} into a model space, with constant radial
/// coordinate rho0 in the interior of the target warping domain.
struct latitude_map {
    int domain_sphere_dim;
    eigenmap_descriptor eigenmap;
    double rho0;
    model_space target;

    latitude_map(eigenmap_descriptor phi, double rho, model_space tgt)
        : domain_sphere_dim(phi.domain_sphere_dim), eigenmap(std::move(phi)), rho0(rho),
          target(std::move(tgt)) {
        if (eigenmap.target_sphere_dim != target.dimension - 1)
            fail(errc::domain_error,
                 "eigenmap " + eigenmap.name + " lands in S^" +
                     std::to_string(eigenmap.target_sphere_dim) + ", target needs S^" +
                     std::to_string(target.dimension - 1));
        if (!target.warping.domain().contains_interior(rho0)) {
            std::ostringstream os;
            os << "latitude rho0 = " << rho0 << " not interior to target domain "
               << target.warping.domain().str();
            fail(errc::domain_error, os.str());
        }
    }
};

} // namespace bhl
