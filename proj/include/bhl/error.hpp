#pragma once

#include <stdexcept>
#include <string>

namespace bhl {

/// Failure categories surfaced by the library.  Every throwing path uses
/// bhl::error so callers (and the CLI) can map failures to exit codes
/// without string matching.
enum class errc {
    domain_error,        // argument outside the declared domain
    unsupported_order,   // derivative order not provided by the object
    singularity,         // division by a vanishing warping value
    evaluation_error,    // non-finite value produced during evaluation
    catalog_miss,        // unknown eigenmap name
    empty_profile,       // profile constructed from no terms
    range_error,         // profile value escapes the target warping domain
    not_applicable,      // operation undefined for these inputs
    stencil_error,       // finite-difference stencil leaves the domain
    degenerate_family,   // closed-form family denominator vanishes
    not_conformal,       // conformality residual too large for the operation
    degenerate_target,   // target classification has no valid member
    stiffness,           // adaptive step size underflowed h_min
    range_escape,        // trajectory left the admissible region
    no_convergence,      // iteration failed to meet its tolerance
    unsupported_start,   // regular-pole expansion not available
    precondition_failed, // documented precondition violated
    unsupported_target,  // target space is not a recognized space form
    spectral_failure,    // eigenvalue iteration did not converge
    config_invalid,      // configuration rejected by validation
    io_error,            // filesystem failure while writing outputs
};

inline const char* errc_name(errc c) {
    switch (c) {
    case errc::domain_error: return "domain_error";
    case errc::unsupported_order: return "unsupported_order";
    case errc::singularity: return "singularity";
    case errc::evaluation_error: return "evaluation_error";
    case errc::catalog_miss: return "catalog_miss";
    case errc::empty_profile: return "empty_profile";
    case errc::range_error: return "range_error";
    case errc::not_applicable: return "not_applicable";
    case errc::stencil_error: return "stencil_error";
    case errc::degenerate_family: return "degenerate_family";
    case errc::not_conformal: return "not_conformal";
    case errc::degenerate_target: return "degenerate_target";
    case errc::stiffness: return "stiffness";
    case errc::range_escape: return "range_escape";
    case errc::no_convergence: return "no_convergence";
    case errc::unsupported_start: return "unsupported_start";
    case errc::precondition_failed: return "precondition_failed";
    case errc::unsupported_target: return "unsupported_target";
    case errc::spectral_failure: return "spectral_failure";
    case errc::config_invalid: return "config_invalid";
    case errc::io_error: return "io_error";
    }
    return "unknown";
}

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) {
    throw error(code, what);
}

} // namespace bhl
