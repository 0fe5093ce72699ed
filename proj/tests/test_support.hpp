#pragma once

#include <catch2/catch_amalgamated.hpp>

#include "bhl/error.hpp"

/// Runs fn, expecting it to throw bhl::error, and returns the error code.
template <class Fn>
bhl::errc error_code_of(Fn&& fn) {
    try {
        fn();
    } catch (const bhl::error& e) {
        return e.code();
    }
    FAIL("expected a bhl::error to be thrown");
    return bhl::errc::domain_error;
}

/// Central-difference derivative oracles, independent of any library code.
template <class Fn>
double cd_first(Fn&& f, double r, double h) {
    return (f(r + h) - f(r - h)) / (2.0 * h);
}

template <class Fn>
double cd_second(Fn&& f, double r, double h) {
    return (f(r + h) - 2.0 * f(r) + f(r - h)) / (h * h);
}
