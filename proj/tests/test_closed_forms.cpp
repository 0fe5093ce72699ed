#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "bhl/closed_forms.hpp"
#include "test_support.hpp"

using namespace bhl;
using Catch::Approx;

namespace {

const double pi = std::acos(-1.0);

// wrap a Euclidean family profile in the matching equivariant map; the
// eigenmap is the sphere identity, so 2k = m - 1 must equal the family 2k
equivariant_map euclidean_map(int m, radial_profile rho) {
    model_space dom(m, warping_function::flat());
    return equivariant_map(dom, model_space(m, warping_function::flat()),
                           eigenmap_catalog("identity(" + std::to_string(m - 1) + ")"),
                           std::move(rho));
}

} // namespace

TEST_CASE("indicial exponents", "[closed_forms]") {
    auto e1 = euclidean_exponents(4, 1.5);
    CHECK(e1.k_plus == Approx(1.0).margin(1e-14));
    CHECK(e1.k_minus == Approx(-3.0).margin(1e-14));

    auto e2 = euclidean_exponents(2, 0.5);
    CHECK(e2.k_plus == Approx(1.0).margin(1e-14));
    CHECK(e2.k_minus == Approx(-1.0).margin(1e-14));

    auto e3 = euclidean_exponents(3, 1.0);
    CHECK(e3.k_plus == Approx(1.0).margin(1e-14));
    CHECK(e3.k_minus == Approx(-2.0).margin(1e-14));

    CHECK(error_code_of([] { euclidean_exponents(1, 1.0); }) == errc::domain_error);
    CHECK(error_code_of([] { euclidean_exponents(4, 0.0); }) == errc::domain_error);
}

TEST_CASE("exponent pair satisfies the indicial equation", "[closed_forms]") {
    std::mt19937 rng(20240811);
    std::uniform_int_distribution<int> md(2, 10);
    std::uniform_real_distribution<double> kd(0.01, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
        int m = md(rng);
        double k = kd(rng);
        auto e = euclidean_exponents(m, k);
        CHECK(e.k_plus >= e.k_minus);
        CHECK(e.k_plus + e.k_minus == Approx(-(m - 2.0)).margin(1e-12 * (1.0 + m)));
        CHECK(e.k_plus * e.k_minus == Approx(-2.0 * k).margin(1e-12 * (1.0 + 2.0 * k)));
    }
}

TEST_CASE("harmonic family members have vanishing tension", "[closed_forms]") {
    // c1 r^{k_plus} with (m, 2k) = (4, 3) is the identity profile
    auto id = harmonic_family(4, 1.5, 1.0, 0.0);
    CHECK(profile_eval(id, 0.7) == Approx(0.7).margin(1e-15));

    auto rep1 = residual_report(euclidean_map(4, harmonic_family(4, 1.5, 0.0, 1.0)), 0.5, 2.0, 64);
    CHECK(rep1.classification == verdict::harmonic);
    CHECK(rep1.F_sup <= 1e-9);

    auto rep2 = residual_report(euclidean_map(3, harmonic_family(3, 1.0, 2.0, 5.0)), 0.5, 2.0, 64);
    CHECK(rep2.classification == verdict::harmonic);
    CHECK(rep2.F_sup <= 1e-9);
    CHECK(profile_eval(rep2.grid.empty() ? harmonic_family(3, 1.0, 2.0, 5.0)
                                         : harmonic_family(3, 1.0, 2.0, 5.0),
                       1.0) == Approx(7.0).margin(1e-13));
}

TEST_CASE("biharmonic family members", "[closed_forms]") {
    // (m, 2k) = (4, 3), c1 = 12 gives rho = r^3 with tension 12 r
    auto cubic = biharmonic_family(4, 1.5, {12.0, 0.0, 0.0, 0.0});
    CHECK(profile_eval(cubic, 1.5) == Approx(1.5 * 1.5 * 1.5).margin(1e-13));
    auto cubic_map = euclidean_map(4, cubic);
    CHECK(tension_F(cubic_map, 1.0) == Approx(12.0).epsilon(1e-13));
    auto rep = residual_report(cubic_map, 0.5, 2.0, 64);
    CHECK(rep.classification == verdict::proper_biharmonic);

    // harmonic subfamily: c1 = c2 = 0
    auto harm = residual_report(euclidean_map(4, biharmonic_family(4, 1.5, {0.0, 0.0, 1.0, 1.0})),
                                0.5, 2.0, 64);
    CHECK(harm.classification == verdict::harmonic);

    // m = 2, k = 1/2 resonant branch: r ln r is proper biharmonic
    auto rlogr = biharmonic_family(2, 0.5, {0.0, 1.0, 0.0, 0.0});
    CHECK(profile_eval(rlogr, 2.0) == Approx(2.0 * std::log(2.0)).margin(1e-14));
    auto rep2 = residual_report(euclidean_map(2, rlogr), 1.2, 3.0, 64);
    CHECK(rep2.classification == verdict::proper_biharmonic);
    CHECK(rep2.F_sup > 1e-8);
    CHECK(rep2.bitension_sup <= 1e-6);

    // resonance away from m = 2 has no closed-form branch
    try {
        biharmonic_family(3, 3.0 / 8.0, {1.0, 1.0, 1.0, 1.0});
        FAIL("expected a degenerate family error");
    } catch (const error& e) {
        CHECK(e.code() == errc::degenerate_family);
        CHECK(std::string(e.what()).find("m + 2 k_minus") != std::string::npos);
    }
}

TEST_CASE("random biharmonic members annihilate both residual assemblies", "[closed_forms]") {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> cd(0.1, 2.0);
    struct combo {
        int m;
        double k;
        double lo, hi;
    };
    // (m, k) chosen so the identity eigenmap matches: 2k = m - 1
    for (auto [m, k, lo, hi] : {combo{4, 1.5, 0.5, 2.0}, combo{3, 1.0, 0.5, 2.0},
                                combo{5, 2.0, 0.5, 2.0}, combo{2, 0.5, 1.2, 3.0}}) {
        for (int trial = 0; trial < 5; ++trial) {
            family_coefficients c{cd(rng), cd(rng), cd(rng), cd(rng)};
            // the general branch divides c2 by the negative 2(m + 2 k_minus);
            // flip its sign so every term stays in the flat target chart rho >= 0
            if (m != 2) c.c2 = -c.c2;
            auto map = euclidean_map(m, biharmonic_family(m, k, c));
            auto rep = residual_report(map, lo, hi, 48);
            INFO("m = " << m << ", trial " << trial);
            CHECK(rep.bitension_sup <= 1e-7 * (1.0 + rep.F_sup));
            for (double r : {lo, 0.5 * (lo + hi), hi}) {
                double alt = bitension_residual_alt(map, r);
                CHECK(std::abs(alt) <= 1e-7 * (1.0 + rep.F_sup));
            }
        }
    }
}

TEST_CASE("almansi decomposition", "[closed_forms]") {
    // (4, 2k = 3), c = (12, 0, 0, 1): rho = r^3 + r^{-3} = r^2 * r + r^{-3}
    auto [rho1, rho2] = almansi_decompose(4, 1.5, {12.0, 0.0, 0.0, 1.0});
    CHECK(profile_eval(rho1, 0.9) == Approx(0.9).margin(1e-14));
    CHECK(profile_eval(rho2, 0.9) == Approx(std::pow(0.9, -3.0)).epsilon(1e-14));

    // (3, 2k = 2), c = (1, 1, 0, 0): rho1 = r/10 - r^{-2}/2
    auto [p1, p2] = almansi_decompose(3, 1.0, {1.0, 1.0, 0.0, 0.0});
    CHECK(profile_eval(p1, 1.0) == Approx(0.1 - 0.5).margin(1e-14));
    CHECK(profile_eval(p2, 1.0) == Approx(0.0).margin(1e-14));
    // rho1 > 0 needs r^3 > 5, so test harmonicity on [1.8, 3.5]
    auto q1 = residual_report(euclidean_map(3, p1), 1.8, 3.5, 50);
    CHECK(q1.F_sup <= 1e-9);
    auto q2 = residual_report(euclidean_map(3, p2), 1.8, 3.5, 50);
    CHECK(q2.classification == verdict::harmonic);

    // trivially harmonic members decompose as (0, rho)
    auto [z1, z2] = almansi_decompose(4, 1.5, {0.0, 0.0, 2.0, 3.0});
    CHECK(profile_eval(z1, 1.3) == Approx(0.0).margin(1e-15));
    CHECK(profile_eval(z2, 1.3) == Approx(2.0 * 1.3 + 3.0 * std::pow(1.3, -3.0)).epsilon(1e-14));

    CHECK(error_code_of([] { almansi_decompose(2, 0.5, {1, 0, 0, 0}); }) ==
          errc::not_applicable);
    CHECK(error_code_of([] { almansi_decompose(3, 3.0 / 8.0, {1, 0, 0, 0}); }) ==
          errc::degenerate_family);
}

TEST_CASE("almansi recomposition holds on grids", "[closed_forms]") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> cd(-2.0, 2.0);
    struct combo {
        int m;
        double k;
    };
    for (auto [m, k] : {combo{4, 1.5}, combo{3, 1.0}, combo{6, 2.5}}) {
        for (int trial = 0; trial < 4; ++trial) {
            family_coefficients c{cd(rng), cd(rng), cd(rng), cd(rng)};
            auto rho = biharmonic_family(m, k, c);
            auto [r1, r2] = almansi_decompose(m, k, c);
            for (int i = 0; i < 50; ++i) {
                double r = 0.5 + 1.5 * i / 49.0;
                double whole = profile_eval(rho, r);
                double split = r * r * profile_eval(r1, r) + profile_eval(r2, r);
                CHECK(std::abs(whole - split) <= 1e-12 * (1.0 + std::abs(whole)));
            }
        }
    }
}

TEST_CASE("the three classification maps", "[closed_forms]") {
    auto inv = classification_map(classified_map::inversion);
    CHECK(profile_eval(inv.profile, 2.0) == Approx(0.5).margin(1e-15));

    auto st = classification_map(classified_map::stereographic);
    CHECK(profile_eval(st.profile, 1.0) == Approx(pi / 2).epsilon(1e-14));
    CHECK(st.target.warping.kind() == warp_kind::spherical);

    auto hy = classification_map(classified_map::hyperbolic);
    CHECK(profile_eval(hy.profile, 0.5) == Approx(std::log(3.0)).epsilon(1e-14));
    CHECK(hy.profile.domain.hi == 1.0);

    // string lookup mirrors the enum and rejects unknown names
    CHECK(profile_eval(classification_map("inversion").profile, 2.0) == Approx(0.5));
    CHECK(error_code_of([] { classification_map("frobnicate"); }) == errc::catalog_miss);

    // all three are proper biharmonic and conformal on their natural ranges
    for (auto [map, lo, hi] :
         {std::tuple{inv, 0.5, 2.0}, std::tuple{st, 0.5, 2.0}, std::tuple{hy, 0.1, 0.8}}) {
        auto rep = residual_report(map, lo, hi, 64);
        CHECK(rep.classification == verdict::proper_biharmonic);
        REQUIRE(rep.conformal_sup.has_value());
        CHECK(*rep.conformal_sup <= 1e-10);
    }
}

TEST_CASE("classification profile derivatives agree with differences", "[closed_forms]") {
    auto st = classification_map(classified_map::stereographic).profile;
    auto hy = classification_map(classified_map::hyperbolic).profile;
    const double h = 1e-4;
    for (int i = 0; i < 20; ++i) {
        double r = 0.1 + 0.035 * i; // keeps r + 2h inside (0, 1) for artanh
        for (const auto& p : {st, hy}) {
            for (int order = 0; order <= 2; ++order) {
                double d1 = cd_first([&](double x) { return profile_eval(p, x, order); }, r, h);
                double d2 = cd_second([&](double x) { return profile_eval(p, x, order); }, r, h);
                CHECK(d1 == Approx(profile_eval(p, r, order + 1)).epsilon(1e-6).margin(1e-6));
                CHECK(d2 == Approx(profile_eval(p, r, order + 2)).epsilon(1e-5).margin(1e-3));
            }
        }
    }
}

TEST_CASE("conformal change of variable", "[closed_forms]") {
    CHECK(conformal_change_of_variable(0, 0.0) == Approx(1.0).margin(1e-15));
    CHECK(conformal_change_of_variable(1, 0.0) == Approx(pi / 2).epsilon(1e-14));
    CHECK(conformal_change_of_variable(-1, std::log(0.5)) ==
          Approx(std::log(3.0)).epsilon(1e-14));

    CHECK(error_code_of([] { conformal_change_of_variable(-1, 0.0); }) == errc::domain_error);
    CHECK(error_code_of([] { conformal_change_of_variable(2, 0.0); }) == errc::domain_error);
}

TEST_CASE("conformal factor diagnostics on the classification maps", "[closed_forms]") {
    auto inv = conformal_factor_residual(classification_map(classified_map::inversion), 0.0);
    CHECK(std::abs(inv.A) <= 1e-9);
    CHECK(inv.A_spread <= 1e-9);
    CHECK(inv.residual_sup <= 1e-8);

    auto st = conformal_factor_residual(classification_map(classified_map::stereographic), 0.0);
    CHECK(st.A == Approx(-2.0).margin(1e-9));
    CHECK(st.A_spread <= 1e-9);
    CHECK(st.residual_sup <= 1e-8);

    auto hy = conformal_factor_residual(classification_map(classified_map::hyperbolic), 0.0);
    CHECK(hy.A == Approx(2.0).margin(1e-9));
    CHECK(hy.A_spread <= 1e-9);
    CHECK(hy.residual_sup <= 1e-8);
}

TEST_CASE("conformal factor diagnostics reject bad inputs", "[closed_forms]") {
    // identity of the round 4-sphere is conformal with u = 1 and c = +1
    model_space s4(4, warping_function::spherical());
    equivariant_map sphere_id(s4, s4, eigenmap_catalog("identity(3)"),
                              make_polynomial_profile({{1.0, 1.0, false}}));
    auto rep = conformal_factor_residual(sphere_id, 1.0);
    CHECK(rep.A == Approx(-3.0).margin(1e-9));
    CHECK(rep.residual_sup <= 1e-8);

    // wrong curvature label for the domain
    CHECK(error_code_of([&] { conformal_factor_residual(sphere_id, 0.0); }) ==
          errc::domain_error);

    // non-conformal profile
    model_space f4(4, warping_function::flat());
    equivariant_map skew(f4, f4, eigenmap_catalog("identity(3)"),
                         make_polynomial_profile({{1.0, 1.0, false}, {1.0, 3.0, false}}));
    CHECK(error_code_of([&] { conformal_factor_residual(skew, 0.0); }) == errc::not_conformal);

    // wrong dimension / non-symmetric sphere part
    model_space f3(3, warping_function::flat());
    equivariant_map low(f3, f3, eigenmap_catalog("identity(2)"),
                        make_polynomial_profile({{1.0, 1.0, false}}));
    CHECK(error_code_of([&] { conformal_factor_residual(low, 0.0); }) == errc::not_applicable);

    equivariant_map hopf(model_space(4, warping_function::spherical()),
                         model_space(3, warping_function::spherical()),
                         eigenmap_catalog("hopf"), make_polynomial_profile({{1.0, 1.0, false}}));
    CHECK(error_code_of([&] { conformal_factor_residual(hopf, 1.0); }) == errc::not_applicable);
}

TEST_CASE("classified targets", "[closed_forms]") {
    auto flatw = classify_conformal_target(0.0, 0.0);
    CHECK(flatw(2.0, 0) == Approx(2.0).margin(1e-15));
    CHECK(flatw(2.0, 1) == 1.0);
    CHECK(flatw(2.0, 2) == 0.0);

    auto sinhw = classify_conformal_target(2.0, 0.0, 1.0);
    CHECK(sinhw(1.0, 0) == Approx(1.1752011936438014).epsilon(1e-15));
    CHECK(sinhw(1.0, 1) == Approx(std::cosh(1.0)).epsilon(1e-15));

    auto sinw = classify_conformal_target(-2.0, 0.0, 1.0);
    CHECK(sinw(pi / 2, 0) == Approx(1.0).margin(1e-14));
    CHECK(sinw.domain().hi == Approx(pi).margin(1e-14));
    CHECK(error_code_of([&] { sinw(3.5, 0); }) == errc::domain_error);

    CHECK(error_code_of([] { classify_conformal_target(0.0, -1.5); }) ==
          errc::degenerate_target);
    CHECK(error_code_of([] { classify_conformal_target(2.0, 0.0, -1.0); }) ==
          errc::domain_error);
}

TEST_CASE("classified targets satisfy the squared-warping equation", "[closed_forms]") {
    // (lambda^2)'' - 2 A lambda^2 = 2 (1 + c), with C fixed by (A, c)
    struct triple {
        double A, c, C;
    };
    for (auto [A, c, C] : {triple{0.0, 0.0, 1.0}, triple{0.0, 0.5, 1.0}, triple{0.0, 3.0, 1.0},
                           triple{2.0, 0.0, 1.0}, triple{-2.0, 0.0, 1.0},
                           triple{8.0, 0.0, 0.5}, triple{-8.0, 0.0, 0.5}}) {
        auto w = classify_conformal_target(A, c, C);
        double hi = std::min(w.domain().hi, 2.0);
        for (int i = 0; i < 50; ++i) {
            double rho = 0.05 + (hi - 0.1) * i / 49.0;
            double l0 = w(rho, 0), l1 = w(rho, 1), l2 = w(rho, 2);
            double lhs = 2.0 * (l1 * l1 + l0 * l2) - 2.0 * A * l0 * l0;
            INFO("A = " << A << ", c = " << c << ", rho = " << rho);
            CHECK(lhs == Approx(2.0 * (1.0 + c)).margin(1e-9));
        }
    }
}
