#pragma once

/// Energy functionals and the second variation of bienergy.
///
/// For equivariant maps, radial variations v(r) d/drho of the profile keep
/// the reduction one-dimensional: the bienergy Hessian restricted to such
/// fields becomes a quadratic form in (v, v', v'') with coefficients built
/// from the tension scalar F and the linearized tension operator
///
///   L v = v'' + (m-1)(sigma'/sigma) v' - 2k (lambda lambda')'(rho)/sigma^2 v.
///
/// On space-form targets (curvature c in {0, +1, -1}) the form reduces to
/// five integrals; hessian_form reports them separately and combines them.
/// hessian_fd_oracle certifies the reduction by differencing bienergy along
/// the perturbed family rho + t v.  stability_index discretizes the form on
/// clamped cubic Hermite elements and counts negative directions.

#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bhl/eigen_jacobi.hpp"
#include "bhl/error.hpp"
#include "bhl/geometry.hpp"
#include "bhl/profiles.hpp"
#include "bhl/quadrature.hpp"
#include "bhl/tension.hpp"

namespace bhl {

/// Sectional curvature of a space-form warping.  Anything custom is
/// rejected: the curvature-term reductions below hold on space forms only.
inline double space_form_curvature(const warping_function& w) {
    switch (w.kind()) {
    case warp_kind::flat: return 0.0;
    case warp_kind::spherical: return 1.0;
    case warp_kind::hyperbolic: return -1.0;
    case warp_kind::custom: break;
    }
    fail(errc::unsupported_target,
         "second variation needs a space-form target (flat, spherical or hyperbolic)");
}

/// Linearized tension operator L applied to a radial field v at r.
/// The Jacobi operator along radial fields acts as J(v d/drho) = -(Lv) d/drho.
inline double radial_jacobi(const equivariant_map& map, const radial_profile& v, double r) {
    const int m = map.domain.dimension;
    const double ed = map.eigenmap.energy_density;
    double s0 = detail::sigma_checked(map.domain.warping, r);
    double g = map.domain.warping(r, 1) / s0;
    double rho = profile_eval(map.profile, r, 0);
    double wwp = detail::target_w_at(map.target.warping, rho).wp;
    return profile_eval(v, r, 2) + (m - 1) * g * profile_eval(v, r, 1) -
           ed * wwp / (s0 * s0) * profile_eval(v, r, 0);
}

/// Energy of an equivariant map over the annulus [a, b]:
///   E = (1/2) Vol(S^{m-1}) int (rho'^2 + 2k lambda^2(rho)/sigma^2) sigma^{m-1} dr.
inline double energy(const equivariant_map& map, double a, double b) {
    const int m = map.domain.dimension;
    const double ed = map.eigenmap.energy_density;
    auto density = [&](double r) {
        double rho = profile_eval(map.profile, r, 0);
        double rho1 = profile_eval(map.profile, r, 1);
        double s0 = detail::sigma_checked(map.domain.warping, r);
        if (!map.target.warping.domain().contains(rho)) {
            std::ostringstream os;
            os << "profile value rho = " << rho << " outside target warping domain "
               << map.target.warping.domain().str();
            fail(errc::range_error, os.str());
        }
        double lam = map.target.warping(rho, 0);
        return (rho1 * rho1 + ed * lam * lam / (s0 * s0)) * std::pow(s0, m - 1);
    };
    double I = quadrature_adaptive(density, a, b);
    return 0.5 * sphere_volume(m - 1) * I;
}

/// Bienergy of an equivariant map over the annulus [a, b]:
///   E2 = (1/2) Vol(S^{m-1}) int F^2 sigma^{m-1} dr.
inline double bienergy(const equivariant_map& map, double a, double b) {
    const int m = map.domain.dimension;
    auto density = [&](double r) {
        double F = tension_F(map, r);
        double s0 = map.domain.warping(r, 0);
        return F * F * std::pow(s0, m - 1);
    };
    double I = quadrature_adaptive(density, a, b);
    return 0.5 * sphere_volume(m - 1) * I;
}

/// Energy of a latitude map: (1/2) 2k lambda^2(rho0) Vol(S^d).
inline double energy(const latitude_map& map) {
    double lam = map.target.warping(map.rho0, 0);
    return 0.5 * map.eigenmap.energy_density * lam * lam *
           sphere_volume(map.domain_sphere_dim);
}

/// Bienergy of a latitude map: (1/2) F^2 Vol(S^d) with F = -2k lambda lambda'(rho0).
inline double bienergy(const latitude_map& map) {
    double F = latitude_residuals(map).F;
    return 0.5 * F * F * sphere_volume(map.domain_sphere_dim);
}

/// Pointwise defect of the stress-divergence identity
///   rho' F' + 2k F lambda lambda'(rho)/sigma^2
///     = (rho' F)' + (m-1)(sigma'/sigma) rho' F - F^2.
/// Returns LHS - RHS; zero for every profile, biharmonic or not, so any
/// drift here indicates an assembly bug rather than a property of the map.
inline double divergence_identity_check(const equivariant_map& map, double r) {
    const int m = map.domain.dimension;
    const double ed = map.eigenmap.energy_density;
    detail::tension_derivs d = detail::tension_with_derivs(map, r);
    double s0 = detail::sigma_checked(map.domain.warping, r);
    double g = map.domain.warping(r, 1) / s0;
    double rho = profile_eval(map.profile, r, 0);
    double rho1 = profile_eval(map.profile, r, 1);
    double rho2 = profile_eval(map.profile, r, 2);
    double ww = detail::target_w_at(map.target.warping, rho).w;
    double lhs = rho1 * d.Fp + ed * d.F * ww / (s0 * s0);
    double rhs = rho2 * d.F + rho1 * d.Fp + (m - 1) * g * rho1 * d.F - d.F * d.F;
    return lhs - rhs;
}

namespace detail {

/// Map data entering the radial second-variation integrand at one radius.
struct variation_point {
    double g;      // sigma'/sigma
    double sm1;    // sigma^{m-1}
    double inv_s2; // sigma^{-2}
    double rho_p;
    double F, Fp;
    double D;        // (rho' F)' + (m-1)(sigma'/sigma) rho' F
    double ww, wwp;  // lambda lambda'(rho), (lambda lambda')'(rho)
};

inline variation_point variation_point_at(const equivariant_map& map, double r) {
    const int m = map.domain.dimension;
    double s0 = sigma_checked(map.domain.warping, r);
    double g = map.domain.warping(r, 1) / s0;
    double rho = profile_eval(map.profile, r, 0);
    double rho1 = profile_eval(map.profile, r, 1);
    double rho2 = profile_eval(map.profile, r, 2);
    target_w W = target_w_at(map.target.warping, rho);
    tension_derivs d = tension_with_derivs(map, r);
    variation_point p;
    p.g = g;
    p.sm1 = std::pow(s0, m - 1);
    p.inv_s2 = 1.0 / (s0 * s0);
    p.rho_p = rho1;
    p.F = d.F;
    p.Fp = d.Fp;
    p.D = rho2 * d.F + rho1 * d.Fp + (m - 1) * g * rho1 * d.F;
    p.ww = W.w;
    p.wwp = W.wp;
    return p;
}

inline void require_biharmonic(const equivariant_map& map, double a, double b,
                               tolerances tol) {
    residual_report_data rep = residual_report(map, a, b, 65, tol);
    if (rep.bitension_sup > tol.tau_b) {
        std::ostringstream os;
        os << "map is not biharmonic on [" << a << ", " << b
           << "]: sup |bitension| = " << rep.bitension_sup << " exceeds " << tol.tau_b;
        fail(errc::precondition_failed, os.str());
    }
}

inline void require_compact_support(const radial_profile& v, double a, double b) {
    if (!(a < b)) fail(errc::domain_error, "variation interval needs a < b");
    for (double r : {a, b}) {
        if (std::abs(profile_eval(v, r, 0)) > 1e-12 ||
            std::abs(profile_eval(v, r, 1)) > 1e-12) {
            std::ostringstream os;
            os << "variation field must vanish to first order at r = " << r;
            fail(errc::precondition_failed, os.str());
        }
    }
}

} // namespace detail

/// Second variation of bienergy at a biharmonic map, split into the five
/// integrals it is assembled from:
///
///   terms[0] = Vol int (Lv)^2 sigma^{m-1} dr
///   terms[1] = Vol int 2 v^2 F^2 sigma^{m-1} dr
///   terms[2] = Vol int 2 v^2 D sigma^{m-1} dr
///   terms[3] = Vol int 2 v F (rho' v' + 2k v lambda lambda'(rho)/sigma^2) sigma^{m-1} dr
///   terms[4] = Vol int 2 v rho' (v F)' sigma^{m-1} dr
///
/// and value = terms[0] - c (terms[1] - terms[2] - terms[3] + terms[4]) with
/// c the target curvature.  The combination is computed from the stored
/// terms, so it reproduces them exactly.
struct hessian_report {
    double value = 0.0;
    std::array<double, 5> terms{};
    int quadrature_panels = 0;
};

inline hessian_report hessian_form(const equivariant_map& map, const radial_profile& v,
                                   double a, double b, tolerances tol = {}) {
    const int m = map.domain.dimension;
    const double ed = map.eigenmap.energy_density;
    const double c = space_form_curvature(map.target.warping);
    detail::require_biharmonic(map, a, b, tol);
    detail::require_compact_support(v, a, b);

    auto pieces = [&](double r) {
        detail::variation_point pt = detail::variation_point_at(map, r);
        double v0 = profile_eval(v, r, 0);
        double v1 = profile_eval(v, r, 1);
        double v2 = profile_eval(v, r, 2);
        double Lv = v2 + (m - 1) * pt.g * v1 - ed * pt.wwp * pt.inv_s2 * v0;
        std::array<double, 5> out;
        out[0] = Lv * Lv * pt.sm1;
        out[1] = 2.0 * v0 * v0 * pt.F * pt.F * pt.sm1;
        out[2] = 2.0 * v0 * v0 * pt.D * pt.sm1;
        out[3] = 2.0 * v0 * pt.F * (pt.rho_p * v1 + ed * v0 * pt.ww * pt.inv_s2) * pt.sm1;
        out[4] = 2.0 * v0 * pt.rho_p * (v1 * pt.F + v0 * pt.Fp) * pt.sm1;
        return out;
    };

    int panels = 0;
    quadrature_adaptive(
        [&](double r) {
            auto p = pieces(r);
            return p[0] - c * (p[1] - p[2] - p[3] + p[4]);
        },
        a, b, 1e-12, 1e-14, &panels);

    const double vol = sphere_volume(m - 1);
    hessian_report rep;
    for (int i = 0; i < 5; ++i)
        rep.terms[static_cast<size_t>(i)] =
            vol * quadrature([&](double r) { return pieces(r)[static_cast<size_t>(i)]; },
                             a, b, panels);
    rep.quadrature_panels = panels;
    rep.value = rep.terms[0] - c * (rep.terms[1] - rep.terms[2] - rep.terms[3] + rep.terms[4]);
    return rep;
}

/// Centered second difference of bienergy along rho + t v, refined once by
/// Richardson extrapolation.  Ground truth for hessian_form: the two agree
/// to O(t^4) plus quadrature noise.
inline double hessian_fd_oracle(const equivariant_map& map, const radial_profile& v,
                                double a, double b, double t_step = 1e-3,
                                tolerances tol = {}) {
    if (!(t_step >= 1e-4 && t_step <= 1e-2))
        fail(errc::domain_error, "t_step must lie in [1e-4, 1e-2]");
    space_form_curvature(map.target.warping);
    detail::require_biharmonic(map, a, b, tol);
    detail::require_compact_support(v, a, b);
    double e0 = bienergy(map, a, b);
    auto second_difference = [&](double t) {
        equivariant_map plus(map.domain, map.target, map.eigenmap,
                             perturb_profile(map.profile, v, t));
        equivariant_map minus(map.domain, map.target, map.eigenmap,
                              perturb_profile(map.profile, v, -t));
        return (bienergy(plus, a, b) - 2.0 * e0 + bienergy(minus, a, b)) / (t * t);
    };
    double full = second_difference(t_step);
    double half = second_difference(0.5 * t_step);
    return (4.0 * half - full) / 3.0;
}

/// Second variation of the bienergy of a latitude map under a constant
/// radial displacement v: with W = lambda lambda' and 2k the eigenmap
/// density,
///   Q(v) = Vol(S^d) v^2 (2k)^2 (W'(rho0)^2 + W(rho0) W''(rho0)).
inline double latitude_hessian_form(const latitude_map& map, double v) {
    const double ed = map.eigenmap.energy_density;
    detail::target_w W = detail::target_w_at(map.target.warping, map.rho0);
    return sphere_volume(map.domain_sphere_dim) * v * v * ed * ed *
           (W.wp * W.wp + W.w * W.wpp);
}

/// Value of the second variation in the direction of the tension field,
///   d^2/dt^2 E2 = -4 c |tau|^4 Vol(S^d),
/// for a latitude map into a space form.  Negative exactly when the target
/// curvature is positive and the map is not harmonic: the variation that
/// flows along tau then decreases bienergy.
inline double tau_variation_value(const latitude_map& map) {
    const double c = space_form_curvature(map.target.warping);
    // |tau|^2 = F^2 is constant over the domain sphere by construction.
    double F = latitude_residuals(map).F;
    return -4.0 * c * F * F * F * F * sphere_volume(map.domain_sphere_dim);
}

/// Equivariant maps live on annuli with boundary, where the tau-direction
/// variation is not admissible; only latitude maps qualify.
inline double tau_variation_value(const equivariant_map&) {
    fail(errc::precondition_failed,
         "tau-direction variation needs a closed domain; use a latitude map");
}

namespace detail {

/// Cubic Hermite shape functions on an element of width h, local t in [0,1].
/// Index 0/1: value/slope at the left node; 2/3: value/slope at the right.
inline void hermite_basis(double t, double h, double* val, double* d1, double* d2) {
    const double t2 = t * t, t3 = t2 * t;
    val[0] = 1.0 - 3.0 * t2 + 2.0 * t3;
    val[1] = h * (t - 2.0 * t2 + t3);
    val[2] = 3.0 * t2 - 2.0 * t3;
    val[3] = h * (t3 - t2);
    d1[0] = (6.0 * t2 - 6.0 * t) / h;
    d1[1] = 1.0 - 4.0 * t + 3.0 * t2;
    d1[2] = (6.0 * t - 6.0 * t2) / h;
    d1[3] = 3.0 * t2 - 2.0 * t;
    d2[0] = (12.0 * t - 6.0) / (h * h);
    d2[1] = (6.0 * t - 4.0) / h;
    d2[2] = (6.0 - 12.0 * t) / (h * h);
    d2[3] = (6.0 * t - 2.0) / h;
}

} // namespace detail

/// Dense matrix of the Hessian quadratic form on cubic Hermite elements over
/// [a, b] with n interior nodes and clamped ends (value and slope pinned to
/// zero at both endpoints).  Degrees of freedom are ordered value, slope per
/// interior node, giving a 2n x 2n symmetric matrix.  Assembly polarizes the
/// same integrand hessian_form uses, so the matrix is exactly symmetric.
inline std::vector<std::vector<double>> stability_matrix(const equivariant_map& map,
                                                         double a, double b, int n,
                                                         tolerances tol = {}) {
    if (n < 16) fail(errc::domain_error, "stability index needs at least 16 interior nodes");
    const int m = map.domain.dimension;
    const double ed = map.eigenmap.energy_density;
    const double c = space_form_curvature(map.target.warping);
    detail::require_biharmonic(map, a, b, tol);

    const double h = (b - a) / (n + 1);
    const double vol = sphere_volume(m - 1);
    const int ndof = 2 * n;
    std::vector<std::vector<double>> B(static_cast<size_t>(ndof),
                                       std::vector<double>(static_cast<size_t>(ndof), 0.0));
    for (int e = 0; e <= n; ++e) {
        const double x0 = a + e * h;
        const int dof[4] = {e > 0 ? 2 * (e - 1) : -1, e > 0 ? 2 * (e - 1) + 1 : -1,
                            e < n ? 2 * e : -1, e < n ? 2 * e + 1 : -1};
        double loc[4][4] = {};
        for (int q = 0; q < 5; ++q) {
            const double t = 0.5 + 0.5 * detail::gl5_nodes[static_cast<size_t>(q)];
            const double wq = 0.5 * h * detail::gl5_weights[static_cast<size_t>(q)];
            detail::variation_point pt = detail::variation_point_at(map, x0 + t * h);
            double val[4], d1[4], d2[4], L[4];
            detail::hermite_basis(t, h, val, d1, d2);
            for (int i = 0; i < 4; ++i)
                L[i] = d2[i] + (m - 1) * pt.g * d1[i] - ed * pt.wwp * pt.inv_s2 * val[i];
            for (int i = 0; i < 4; ++i) {
                if (dof[i] < 0) continue;
                for (int j = 0; j < 4; ++j) {
                    if (dof[j] < 0) continue;
                    double pairing =
                        pt.F * (val[i] * (pt.rho_p * d1[j] + ed * val[j] * pt.ww * pt.inv_s2) +
                                val[j] * (pt.rho_p * d1[i] + ed * val[i] * pt.ww * pt.inv_s2));
                    double transport =
                        pt.rho_p * (val[i] * (d1[j] * pt.F + val[j] * pt.Fp) +
                                    val[j] * (d1[i] * pt.F + val[i] * pt.Fp));
                    double bil = L[i] * L[j] -
                                 c * (2.0 * val[i] * val[j] * pt.F * pt.F -
                                      2.0 * val[i] * val[j] * pt.D - pairing + transport);
                    loc[i][j] += wq * pt.sm1 * bil;
                }
            }
        }
        for (int i = 0; i < 4; ++i) {
            if (dof[i] < 0) continue;
            for (int j = 0; j < 4; ++j)
                if (dof[j] >= 0)
                    B[static_cast<size_t>(dof[i])][static_cast<size_t>(dof[j])] +=
                        vol * loc[i][j];
        }
    }
    return B;
}

/// Spectrum summary of the discretized Hessian.  negative_count counts
/// eigenvalues below -tol_index over the whole spectrum; eigenvalues keeps
/// the smallest ten.
struct index_report {
    int grid_size = 0;
    std::vector<double> eigenvalues;
    int negative_count = 0;
    double tol_index = 0.0; // resolved absolute threshold
};

namespace detail {

inline index_report spectrum_report(std::vector<std::vector<double>> B, int grid_size,
                                    std::optional<double> tol_index) {
    double scale = 0.0;
    for (const auto& row : B)
        for (double x : row) scale = std::max(scale, std::abs(x));
    double thresh = tol_index ? *tol_index : 1e-6 * scale;
    if (thresh < 0.0) fail(errc::domain_error, "tol_index must be nonnegative");
    std::vector<double> ev = symmetric_eigenvalues(std::move(B));
    index_report rep;
    rep.grid_size = grid_size;
    rep.tol_index = thresh;
    for (double lambda : ev) {
        if (lambda < -thresh) ++rep.negative_count;
        if (rep.eigenvalues.size() < 10) rep.eigenvalues.push_back(lambda);
    }
    return rep;
}

} // namespace detail

/// Morse index data for an equivariant biharmonic map on [a, b], computed
/// from the clamped Hermite discretization with n interior nodes.  When
/// tol_index is not given it resolves to 1e-6 times the largest matrix
/// entry in magnitude.
inline index_report stability_index(const equivariant_map& map, double a, double b, int n,
                                    std::optional<double> tol_index = {},
                                    tolerances tol = {}) {
    return detail::spectrum_report(stability_matrix(map, a, b, n, tol), n, tol_index);
}

/// Morse index data for a biharmonic latitude map.  Constant radial
/// displacements span the reduced variation space, so the discretization is
/// the 1 x 1 matrix [latitude_hessian_form(map, 1)].
inline index_report stability_index(const latitude_map& map,
                                    std::optional<double> tol_index = {},
                                    tolerances tol = {}) {
    latitude_residual_data res = latitude_residuals(map);
    if (std::abs(res.bitension) > tol.tau_b) {
        std::ostringstream os;
        os << "latitude map is not biharmonic: |bitension| = " << std::abs(res.bitension)
           << " exceeds " << tol.tau_b;
        fail(errc::precondition_failed, os.str());
    }
    std::vector<std::vector<double>> B{{latitude_hessian_form(map, 1.0)}};
    return detail::spectrum_report(std::move(B), 1, tol_index);
}

} // namespace bhl
