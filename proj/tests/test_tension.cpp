#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "bhl/tension.hpp"
#include "test_support.hpp"

using namespace bhl;
using Catch::Approx;

namespace {

const double pi = std::acos(-1.0);

model_space flat4() { return model_space(4, warping_function::flat()); }

equivariant_map inversion_map() {
    return equivariant_map(flat4(), flat4(), eigenmap_catalog("identity(3)"),
                           make_polynomial_profile({{1.0, -1.0, false}}));
}

equivariant_map identity_map() {
    return equivariant_map(flat4(), flat4(), eigenmap_catalog("identity(3)"),
                           make_polynomial_profile({{1.0, 1.0, false}}));
}

equivariant_map square_map() {
    return equivariant_map(flat4(), flat4(), eigenmap_catalog("identity(3)"),
                           make_polynomial_profile({{1.0, 2.0, false}}));
}

// the S^4 -> S^3 system with the Hopf eigenmap and profile rho(r) = r
equivariant_map hopf_system_linear() {
    return equivariant_map(model_space(4, warping_function::spherical()),
                           model_space(3, warping_function::spherical()),
                           eigenmap_catalog("hopf"),
                           make_polynomial_profile({{1.0, 1.0, false}}));
}

radial_profile order2(radial_profile p) {
    p.max_order = 2;
    return p;
}

} // namespace

TEST_CASE("radial Laplacian on flat four-space", "[tension]") {
    model_space m = flat4();
    auto r2 = make_polynomial_profile({{1.0, 2.0, false}});
    CHECK(radial_laplacian(m, r2, 1.0) == Approx(8.0).margin(1e-13));

    // r^{-2} is harmonic away from the pole when m = 4
    auto rm2 = make_polynomial_profile({{1.0, -2.0, false}});
    for (int i = 0; i < 20; ++i) {
        double r = 0.3 + 0.2 * i;
        CHECK(radial_laplacian(m, rm2, r) == Approx(0.0).margin(1e-10));
    }

    auto constant = make_polynomial_profile({{2.0, 0.0, false}});
    CHECK(radial_laplacian(m, constant, 0.7) == 0.0);

    CHECK(error_code_of([&] { radial_laplacian(m, r2, 0.0); }) == errc::singularity);
}

TEST_CASE("tension scalar on closed-form maps", "[tension]") {
    auto inv = inversion_map();
    CHECK(tension_F(inv, 1.0) == Approx(-4.0).epsilon(1e-13));
    for (int i = 0; i < 30; ++i) {
        double r = 0.5 + 0.05 * i;
        CHECK(tension_F(inv, r) == Approx(-4.0 / (r * r * r)).epsilon(1e-12));
    }

    auto id = identity_map();
    for (int i = 0; i < 30; ++i) {
        double r = 0.5 + 0.05 * i;
        CHECK(tension_F(id, r) == Approx(0.0).margin(1e-13));
    }

    auto hopf = hopf_system_linear();
    CHECK(tension_F(hopf, pi / 3) == Approx(-5.0 * std::sqrt(3.0) / 3.0).epsilon(1e-13));
}

TEST_CASE("tension reports range escapes", "[tension]") {
    equivariant_map bad(flat4(), model_space(4, warping_function::spherical()),
                        eigenmap_catalog("identity(3)"),
                        make_polynomial_profile({{2.0, 1.0, false}}));
    CHECK(error_code_of([&] { tension_F(bad, 2.0); }) == errc::range_error);
    // rho = 2r at r = 1/2: F = 0 + (3/r) 2 - 3 sin(1) cos(1) / r^2 = 12 - 6 sin 2
    CHECK(tension_F(bad, 0.5) == Approx(12.0 - 6.0 * std::sin(2.0)).epsilon(1e-12));
}

TEST_CASE("bitension residual, analytic derivative path", "[tension]") {
    auto inv = inversion_map();
    for (int i = 0; i < 40; ++i) {
        double r = 0.5 + 0.04 * i;
        CHECK(bitension_residual(inv, r) == Approx(0.0).margin(1e-9));
    }

    // rho = r^3 solves the fourth-order system on flat four-space with 2k = 3
    equivariant_map cubic(flat4(), flat4(), eigenmap_catalog("identity(3)"),
                          make_polynomial_profile({{1.0, 3.0, false}}));
    for (int i = 0; i < 40; ++i) {
        double r = 0.5 + 0.04 * i;
        CHECK(tension_F(cubic, r) == Approx(12.0 * r).epsilon(1e-13));
        CHECK(bitension_residual(cubic, r) == Approx(0.0).margin(1e-9));
    }

    // rho = r^2 has constant tension F = 5, so the residual is -15 / r^2
    auto sq = square_map();
    CHECK(tension_F(sq, 1.0) == Approx(5.0).epsilon(1e-14));
    CHECK(bitension_residual(sq, 1.0) == Approx(-15.0).epsilon(1e-12));
    CHECK(bitension_residual(sq, 2.0) == Approx(-15.0 / 4.0).epsilon(1e-12));
}

TEST_CASE("bitension residual, finite-difference path", "[tension]") {
    auto inv = inversion_map();
    equivariant_map inv2(flat4(), flat4(), eigenmap_catalog("identity(3)"),
                         order2(make_polynomial_profile({{1.0, -1.0, false}})));
    REQUIRE(inv2.profile.max_order == 2);
    for (double r : {0.7, 1.0, 1.5, 2.0}) {
        CHECK(bitension_residual(inv2, r) == Approx(0.0).margin(1e-5));
        CHECK(bitension_residual(inv2, r) ==
              Approx(bitension_residual(inv, r)).margin(1e-5));
    }

    // stencil must stay inside the profile domain
    radial_profile narrow = order2(make_polynomial_profile({{1.0, -1.0, false}}));
    narrow.domain = interval{0.9, 1.1, true, true};
    equivariant_map clipped(flat4(), flat4(), eigenmap_catalog("identity(3)"), narrow);
    CHECK(error_code_of([&] { bitension_residual(clipped, 0.9001); }) == errc::stencil_error);
    CHECK(bitension_residual(clipped, 1.0) == Approx(0.0).margin(1e-5));
}

TEST_CASE("the two bitension assemblies agree", "[tension]") {
    auto maps = {inversion_map(), square_map(), hopf_system_linear()};
    for (const auto& map : maps) {
        double lo = 0.5, hi = map.domain.warping.kind() == warp_kind::spherical ? 2.5 : 2.0;
        for (int i = 0; i < 64; ++i) {
            double r = lo + (hi - lo) * i / 63.0;
            double a = bitension_residual(map, r);
            double b = bitension_residual_alt(map, r);
            CHECK(std::abs(a - b) <= 1e-6 * (1.0 + std::abs(a)));
        }
    }
}

TEST_CASE("conformality residual", "[tension]") {
    auto inv = inversion_map();
    for (int i = 0; i < 30; ++i) {
        double r = 0.5 + 0.05 * i;
        CHECK(conformality_residual(inv, r) == Approx(0.0).margin(1e-12));
    }

    // homothety r -> 2r of flat space is conformal
    equivariant_map twice(flat4(), flat4(), eigenmap_catalog("identity(3)"),
                          make_polynomial_profile({{2.0, 1.0, false}}));
    CHECK(conformality_residual(twice, 0.8) == Approx(0.0).margin(1e-14));

    // inline inverse-stereographic profile: rho = 2 arctan r into the sphere
    radial_profile arctan;
    arctan.max_order = 2;
    arctan.domain = interval{0.0, infinity, true, false};
    arctan.eval = [](double r, int k) {
        double q = 1.0 + r * r;
        switch (k) {
        case 0: return 2.0 * std::atan(r);
        case 1: return 2.0 / q;
        default: return -4.0 * r / (q * q);
        }
    };
    equivariant_map stereo(flat4(), model_space(4, warping_function::spherical()),
                           eigenmap_catalog("identity(3)"), arctan);
    CHECK(conformality_residual(stereo, 1.0) == Approx(0.0).margin(1e-14));
    CHECK(conformality_residual(stereo, 0.3) == Approx(0.0).margin(1e-14));

    // r + r^3 is not conformal
    equivariant_map skew(flat4(), flat4(), eigenmap_catalog("identity(3)"),
                         make_polynomial_profile({{1.0, 1.0, false}, {1.0, 3.0, false}}));
    CHECK(std::abs(conformality_residual(skew, 1.0)) > 0.5);

    CHECK(error_code_of([&] { conformality_residual(hopf_system_linear(), 1.0); }) ==
          errc::not_applicable);
}

TEST_CASE("latitude residuals", "[tension]") {
    model_space s3(3, warping_function::spherical());
    auto hopf = eigenmap_catalog("hopf");

    auto at = [&](double rho0) { return latitude_residuals(latitude_map(hopf, rho0, s3)); };

    auto l1 = at(pi / 4);
    CHECK(l1.F == Approx(-4.0).epsilon(1e-14));
    CHECK(l1.bitension == Approx(0.0).margin(1e-13));

    auto l2 = at(pi / 2);
    CHECK(l2.F == Approx(0.0).margin(1e-14));

    auto l3 = at(pi / 3);
    CHECK(l3.F == Approx(-2.0 * std::sqrt(3.0)).epsilon(1e-14));
    CHECK(l3.bitension == Approx(-8.0 * std::sqrt(3.0)).epsilon(1e-13));
}

TEST_CASE("residual report classifies maps", "[tension]") {
    auto inv_rep = residual_report(inversion_map(), 0.5, 2.0, 64);
    CHECK(inv_rep.classification == verdict::proper_biharmonic);
    CHECK(inv_rep.F_sup == Approx(32.0).epsilon(1e-12));
    CHECK(inv_rep.bitension_sup <= 1e-6);
    REQUIRE(inv_rep.conformal_sup.has_value());
    CHECK(*inv_rep.conformal_sup <= 1e-10);
    CHECK(inv_rep.grid.size() == 64);
    CHECK(inv_rep.grid.front() == 0.5);
    CHECK(inv_rep.grid.back() == 2.0);
    CHECK(inv_rep.F_l2 > 0.0);
    CHECK(inv_rep.F_l2 <= inv_rep.F_sup);

    auto id_rep = residual_report(identity_map(), 0.5, 2.0, 64);
    CHECK(id_rep.classification == verdict::harmonic);
    CHECK(id_rep.F_sup <= 1e-13);

    auto sq_rep = residual_report(square_map(), 0.5, 2.0, 64);
    CHECK(sq_rep.classification == verdict::neither);

    auto hopf_rep = residual_report(hopf_system_linear(), 0.5, 2.5, 64);
    CHECK_FALSE(hopf_rep.conformal_sup.has_value());

    CHECK(error_code_of([&] { residual_report(identity_map(), 0.5, 2.0, 7); }) ==
          errc::domain_error);
    CHECK(error_code_of([&] { residual_report(identity_map(), 2.0, 0.5, 16); }) ==
          errc::domain_error);

    // pointwise failures carry the offending radius
    equivariant_map bad(flat4(), model_space(4, warping_function::spherical()),
                        eigenmap_catalog("identity(3)"),
                        make_polynomial_profile({{2.0, 1.0, false}}));
    try {
        residual_report(bad, 0.5, 2.0, 16);
        FAIL("expected range escape");
    } catch (const error& e) {
        CHECK(e.code() == errc::range_error);
        CHECK(std::string(e.what()).find("at r = ") != std::string::npos);
    }
}
