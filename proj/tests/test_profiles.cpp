#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "bhl/profiles.hpp"
#include "test_support.hpp"

using namespace bhl;
using Catch::Approx;

namespace {

const double pi = std::acos(-1.0);

radial_profile cubic_profile() {
    return make_polynomial_profile({{1.0, 1.0, false}, {1.0, 3.0, false}});
}

// (r-1)^2 (2-r)^2 expanded into power terms; vanishes with its first
// derivative at r = 1 and r = 2.
radial_profile unit_bump_12() {
    return make_polynomial_profile(
        {{1.0, 4.0, false}, {-6.0, 3.0, false}, {13.0, 2.0, false}, {-12.0, 1.0, false}, {4.0, 0.0, false}});
}

} // namespace

TEST_CASE("polynomial profiles evaluate exactly", "[profiles]") {
    auto p = cubic_profile();
    CHECK(profile_eval(p, 0.5, 0) == Approx(0.625).margin(1e-16));
    CHECK(profile_eval(p, 0.5, 1) == Approx(1.75).margin(1e-15));
    CHECK(profile_eval(p, 0.5, 2) == Approx(3.0).margin(1e-15));
    CHECK(profile_eval(p, 0.5, 3) == Approx(6.0).margin(1e-15));
    CHECK(profile_eval(p, 0.5, 4) == 0.0);

    auto rlogr = make_polynomial_profile({{1.0, 1.0, true}});
    CHECK(profile_eval(rlogr, 1.0, 0) == 0.0);
    CHECK(profile_eval(rlogr, 1.0, 1) == Approx(1.0).margin(1e-15)); // ln r + 1
    CHECK(profile_eval(rlogr, 2.0, 1) == Approx(std::log(2.0) + 1.0).epsilon(1e-15));

    auto constant = make_polynomial_profile({{3.0, 0.0, false}});
    CHECK(profile_eval(constant, 5.0, 1) == 0.0);

    CHECK(error_code_of([] { make_polynomial_profile({}); }) == errc::empty_profile);
}

TEST_CASE("profile evaluation guards order and domain", "[profiles]") {
    auto inv = make_polynomial_profile({{1.0, -1.0, false}});
    CHECK(profile_eval(inv, 0.5, 0) == Approx(2.0).margin(1e-15));
    CHECK(profile_eval(inv, 0.5, 1) == Approx(-4.0).margin(1e-14));
    CHECK(profile_eval(inv, 0.5, 2) == Approx(16.0).margin(1e-13));

    CHECK(error_code_of([&] { profile_eval(inv, 0.5, 5); }) == errc::unsupported_order);
    CHECK(error_code_of([&] { profile_eval(inv, 0.0, 0); }) == errc::domain_error);
    CHECK(error_code_of([&] { profile_eval(inv, -1.0, 0); }) == errc::domain_error);

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
    CHECK(profile_eval(arctan, 1.0, 1) == Approx(1.0).margin(1e-15));
    CHECK(error_code_of([&] { profile_eval(arctan, 1.0, 3); }) == errc::unsupported_order);
}

TEST_CASE("polynomial derivatives match central differences", "[profiles]") {
    auto p = make_polynomial_profile(
        {{0.7, 2.5, false}, {-1.2, -1.0, false}, {0.3, 2.0, true}, {2.0, 0.0, false}});
    for (int i = 0; i < 40; ++i) {
        double r = 0.5 + i * 0.1;
        double h = 1e-5 * std::max(1.0, r);
        double d1 = cd_first([&](double x) { return profile_eval(p, x, 0); }, r, h);
        double d2 = cd_second([&](double x) { return profile_eval(p, x, 0); }, r, h);
        CHECK(d1 == Approx(profile_eval(p, r, 1)).epsilon(1e-6).margin(1e-8));
        CHECK(d2 == Approx(profile_eval(p, r, 2)).epsilon(1e-5).margin(1e-5));
    }
}

TEST_CASE("eigenmap catalog", "[profiles]") {
    auto hopf = eigenmap_catalog("hopf");
    CHECK(hopf.domain_sphere_dim == 3);
    CHECK(hopf.target_sphere_dim == 2);
    CHECK(hopf.energy_density == 8.0);

    auto id3 = eigenmap_catalog("identity(3)");
    CHECK(id3.domain_sphere_dim == 3);
    CHECK(id3.target_sphere_dim == 3);
    CHECK(id3.energy_density == 3.0);

    auto pow2 = eigenmap_catalog("power(2)");
    CHECK(pow2.domain_sphere_dim == 1);
    CHECK(pow2.target_sphere_dim == 1);
    CHECK(pow2.energy_density == 4.0);

    CHECK(error_code_of([] { eigenmap_catalog("frobnicate"); }) == errc::catalog_miss);
    CHECK(error_code_of([] { eigenmap_catalog("identity()"); }) == errc::catalog_miss);
    CHECK(error_code_of([] { eigenmap_catalog("power(x)"); }) == errc::catalog_miss);

    // energy density >= domain sphere dimension, equality on identities
    for (int d = 1; d <= 6; ++d) {
        auto e = eigenmap_catalog("identity(" + std::to_string(d) + ")");
        CHECK(e.energy_density == static_cast<double>(e.domain_sphere_dim));
        CHECK(is_identity_eigenmap(e));
    }
    for (int d = 2; d <= 5; ++d) {
        auto e = eigenmap_catalog("power(" + std::to_string(d) + ")");
        CHECK(e.energy_density > e.domain_sphere_dim);
        CHECK_FALSE(is_identity_eigenmap(e));
    }
    CHECK(hopf.energy_density > hopf.domain_sphere_dim);
    CHECK(is_identity_eigenmap(eigenmap_catalog("power(1)")));
}

TEST_CASE("profile perturbation", "[profiles]") {
    auto p = make_polynomial_profile({{1.0, -1.0, false}});
    auto bump = unit_bump_12();

    // t = 0 leaves the profile untouched
    auto same = perturb_profile(p, bump, 0.0);
    for (int i = 0; i < 50; ++i) {
        double r = 0.2 + i * 0.1;
        CHECK(profile_eval(same, r, 0) == profile_eval(p, r, 0));
    }

    auto lin = perturb_profile(make_polynomial_profile({{1.0, 1.0, false}}),
                               make_polynomial_profile({{1.0, 2.0, false}}), 1.0);
    CHECK(profile_eval(lin, 2.0, 0) == Approx(6.0).margin(1e-14));

    // hand oracle: 1/1.5 + 1e-3 * (0.5^2 * 0.5^2)
    double expected = 2.0 / 3.0 + 1e-3 * 0.0625;
    auto pert = perturb_profile(p, bump, 1e-3);
    CHECK(profile_eval(pert, 1.5, 0) == Approx(expected).epsilon(1e-15));

    // linear in t: applying t1 then t2 equals applying t1 + t2
    auto two_step = perturb_profile(perturb_profile(p, bump, 0.4), bump, 0.35);
    auto one_step = perturb_profile(p, bump, 0.75);
    for (int i = 0; i < 30; ++i) {
        double r = 1.05 + i * 0.03;
        for (int k = 0; k <= 2; ++k)
            CHECK(profile_eval(two_step, r, k) ==
                  Approx(profile_eval(one_step, r, k)).epsilon(1e-14).margin(1e-14));
    }
}

TEST_CASE("equivariant map wiring", "[profiles]") {
    model_space s4(4, warping_function::spherical());
    model_space s3(3, warping_function::spherical());
    model_space e4(4, warping_function::flat());

    equivariant_map hopf_map(s4, s3, eigenmap_catalog("hopf"),
                             make_polynomial_profile({{1.0, 1.0, false}}));
    CHECK_FALSE(rotationally_symmetric(hopf_map));

    equivariant_map id_map(e4, e4, eigenmap_catalog("identity(3)"),
                           make_polynomial_profile({{1.0, 1.0, false}}));
    CHECK(rotationally_symmetric(id_map));

    CHECK(error_code_of([&] {
              equivariant_map(s3, s3, eigenmap_catalog("hopf"),
                              make_polynomial_profile({{1.0, 1.0, false}}));
          }) == errc::domain_error);
    CHECK(error_code_of([&] {
              equivariant_map(s4, s4, eigenmap_catalog("hopf"),
                              make_polynomial_profile({{1.0, 1.0, false}}));
          }) == errc::domain_error);
}

TEST_CASE("latitude map wiring", "[profiles]") {
    model_space s3(3, warping_function::spherical());
    latitude_map lat(eigenmap_catalog("hopf"), pi / 4, s3);
    CHECK(lat.domain_sphere_dim == 3);

    CHECK(error_code_of([&] { latitude_map(eigenmap_catalog("hopf"), pi, s3); }) ==
          errc::domain_error);
    CHECK(error_code_of([&] { latitude_map(eigenmap_catalog("hopf"), -0.5, s3); }) ==
          errc::domain_error);
    CHECK(error_code_of([&] {
              latitude_map(eigenmap_catalog("identity(3)"), 0.5, s3);
          }) == errc::domain_error);
}
