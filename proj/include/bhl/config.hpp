#pragma once

/// Run configuration: parsing, validation and map construction.
///
/// A run is described by a single JSON document.  Parsing and validation
/// collect diagnostics instead of throwing so a config with several problems
/// reports all of them at once; validation performs catalog and interval
/// checks only, never numerics.

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bhl/closed_forms.hpp"
#include "bhl/error.hpp"
#include "bhl/geometry.hpp"
#include "bhl/profiles.hpp"
#include "bhl/solver.hpp"
#include "bhl/tension.hpp"

namespace bhl {

struct diagnostic {
    std::string field; // dotted config path, or "line N" for parse errors
    std::string message;
};

enum class profile_kind { none, classification, terms, family, latitude, pole };

struct family_spec {
    std::string name; // harmonic | biharmonic
    family_coefficients coeffs;
};

/// Profile of the regular-at-the-pole starting family C1 r + C2 r^3.
struct pole_spec {
    double C1 = 1.0;
    double C2 = 0.0;
};

struct profile_spec {
    profile_kind kind = profile_kind::none;
    std::string classification;
    std::vector<poly_term> terms;
    family_spec family;
    double latitude = 0.0;
    pole_spec pole;
};

struct map_spec {
    std::string domain = "flat"; // flat | spherical | hyperbolic | sphere (latitude)
    std::string target = "flat"; // flat | spherical | hyperbolic
    int m = 0;                   // domain dimension; ignored for latitude maps
    std::string eigenmap;
    profile_spec profile;
};

inline bool is_latitude(const map_spec& spec) {
    return spec.profile.kind == profile_kind::latitude;
}

struct sweep_spec {
    std::string param; // rho0 | c1..c4 | C1 | C2
    double from = 0.0;
    double to = 0.0;
    int steps = 1;
};

enum class solve_kind { ivp, pole_bvp, state_bvp };

struct solve_spec {
    solve_kind kind = solve_kind::ivp;
    ode_state start;     // ivp
    double r_end = 0.0;  // ivp
    pole_shot pole;      // pole_bvp
    state_shot left;     // state_bvp
    shoot_target target; // both bvp modes
    solver_config solver;
};

struct output_spec {
    std::string json; // empty: <command>.json
    std::string csv;  // empty: <command>.csv
};

struct run_config {
    std::string command;
    map_spec map;
    double a = 0.0, b = 0.0;
    bool has_interval = false;
    int grid_n = 0; // 0: per-command default
    tolerances tol;
    std::optional<double> tol_index;
    std::optional<sweep_spec> sweep;
    std::optional<solve_spec> solve;
    std::optional<std::vector<poly_term>> variation;
    output_spec output;
};

inline int default_grid_n(const std::string& command) {
    if (command == "solve") return 101;
    if (command == "stability") return 32;
    if (command == "classify") return 50;
    return 64;
}

inline int effective_grid_n(const run_config& cfg) {
    return cfg.grid_n > 0 ? cfg.grid_n : default_grid_n(cfg.command);
}

namespace detail {

using njson = nlohmann::json;

inline void note(std::vector<diagnostic>& diags, const std::string& field,
                 const std::string& message) {
    diags.push_back({field, message});
}

inline const njson* member(const njson& parent, const std::string& key) {
    auto it = parent.find(key);
    return it == parent.end() ? nullptr : &*it;
}

inline void check_keys(const njson& obj, const std::string& field,
                       std::initializer_list<const char*> allowed,
                       std::vector<diagnostic>& diags) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) known = true;
        if (!known) note(diags, field + "." + it.key(), "unknown key");
    }
}

inline double get_double(const njson& parent, const std::string& key,
                         const std::string& field, std::vector<diagnostic>& diags,
                         bool required, double fallback = 0.0) {
    const njson* j = member(parent, key);
    if (!j) {
        if (required) note(diags, field, "missing required number");
        return fallback;
    }
    if (!j->is_number()) {
        note(diags, field, "expected a number");
        return fallback;
    }
    return j->get<double>();
}

inline int get_int(const njson& parent, const std::string& key, const std::string& field,
                   std::vector<diagnostic>& diags, bool required, int fallback = 0) {
    const njson* j = member(parent, key);
    if (!j) {
        if (required) note(diags, field, "missing required integer");
        return fallback;
    }
    if (!j->is_number_integer()) {
        note(diags, field, "expected an integer");
        return fallback;
    }
    return j->get<int>();
}

inline std::string get_string(const njson& parent, const std::string& key,
                              const std::string& field, std::vector<diagnostic>& diags,
                              bool required, const std::string& fallback = "") {
    const njson* j = member(parent, key);
    if (!j) {
        if (required) note(diags, field, "missing required string");
        return fallback;
    }
    if (!j->is_string()) {
        note(diags, field, "expected a string");
        return fallback;
    }
    return j->get<std::string>();
}

inline std::vector<poly_term> parse_terms(const njson& arr, const std::string& field,
                                          std::vector<diagnostic>& diags) {
    std::vector<poly_term> terms;
    if (!arr.is_array() || arr.empty()) {
        note(diags, field, "expected a non-empty array of terms");
        return terms;
    }
    for (size_t i = 0; i < arr.size(); ++i) {
        const njson& t = arr[i];
        std::string tf = field + "[" + std::to_string(i) + "]";
        if (!t.is_object()) {
            note(diags, tf, "expected an object with coefficient/exponent");
            continue;
        }
        check_keys(t, tf, {"coefficient", "exponent", "log"}, diags);
        poly_term term;
        term.coefficient = get_double(t, "coefficient", tf + ".coefficient", diags, true);
        term.exponent = get_double(t, "exponent", tf + ".exponent", diags, true);
        const njson* lg = member(t, "log");
        if (lg) {
            if (!lg->is_boolean()) note(diags, tf + ".log", "expected a boolean");
            else term.log = lg->get<bool>();
        }
        terms.push_back(term);
    }
    return terms;
}

inline profile_spec parse_profile(const njson& j, const std::string& field,
                                  std::vector<diagnostic>& diags) {
    profile_spec p;
    if (!j.is_object()) {
        note(diags, field, "expected an object");
        return p;
    }
    check_keys(j, field, {"classification", "terms", "family", "latitude", "pole"}, diags);
    int forms = 0;
    if (member(j, "classification")) ++forms;
    if (member(j, "terms")) ++forms;
    if (member(j, "family")) ++forms;
    if (member(j, "latitude")) ++forms;
    if (member(j, "pole")) ++forms;
    if (forms != 1) {
        note(diags, field,
             "exactly one of classification, terms, family, latitude, pole is required");
        return p;
    }
    if (const njson* c = member(j, "classification")) {
        p.kind = profile_kind::classification;
        if (!c->is_string()) note(diags, field + ".classification", "expected a string");
        else p.classification = c->get<std::string>();
    } else if (const njson* t = member(j, "terms")) {
        p.kind = profile_kind::terms;
        p.terms = parse_terms(*t, field + ".terms", diags);
    } else if (const njson* f = member(j, "family")) {
        p.kind = profile_kind::family;
        std::string ff = field + ".family";
        if (!f->is_object()) {
            note(diags, ff, "expected an object");
        } else {
            check_keys(*f, ff, {"name", "c1", "c2", "c3", "c4"}, diags);
            p.family.name = get_string(*f, "name", ff + ".name", diags, true);
            p.family.coeffs.c1 = get_double(*f, "c1", ff + ".c1", diags, false);
            p.family.coeffs.c2 = get_double(*f, "c2", ff + ".c2", diags, false);
            p.family.coeffs.c3 = get_double(*f, "c3", ff + ".c3", diags, false);
            p.family.coeffs.c4 = get_double(*f, "c4", ff + ".c4", diags, false);
        }
    } else if (member(j, "latitude")) {
        p.kind = profile_kind::latitude;
        p.latitude = get_double(j, "latitude", field + ".latitude", diags, true);
    } else if (const njson* pl = member(j, "pole")) {
        p.kind = profile_kind::pole;
        std::string pf = field + ".pole";
        if (!pl->is_object()) {
            note(diags, pf, "expected an object");
        } else {
            check_keys(*pl, pf, {"C1", "C2"}, diags);
            p.pole.C1 = get_double(*pl, "C1", pf + ".C1", diags, false, 1.0);
            p.pole.C2 = get_double(*pl, "C2", pf + ".C2", diags, false, 0.0);
        }
    }
    return p;
}

inline map_spec parse_map(const njson& j, std::vector<diagnostic>& diags) {
    map_spec spec;
    if (!j.is_object()) {
        note(diags, "map", "expected an object");
        return spec;
    }
    check_keys(j, "map", {"domain", "target", "m", "eigenmap", "profile"}, diags);
    spec.domain = get_string(j, "domain", "map.domain", diags, true, "flat");
    spec.target = get_string(j, "target", "map.target", diags, true, "flat");
    spec.m = get_int(j, "m", "map.m", diags, false, 0);
    spec.eigenmap = get_string(j, "eigenmap", "map.eigenmap", diags, true);
    if (const njson* p = member(j, "profile"))
        spec.profile = parse_profile(*p, "map.profile", diags);
    return spec;
}

inline solve_spec parse_solve(const njson& j, std::vector<diagnostic>& diags) {
    solve_spec s;
    if (!j.is_object()) {
        note(diags, "solve", "expected an object");
        return s;
    }
    check_keys(j, "solve",
               {"kind", "start", "r_end", "pole", "left", "target", "rel_tol", "abs_tol",
                "h_max"},
               diags);
    std::string kind = get_string(j, "kind", "solve.kind", diags, true);
    if (kind == "ivp") {
        s.kind = solve_kind::ivp;
        const njson* st = member(j, "start");
        if (!st || !st->is_object()) {
            note(diags, "solve.start", "ivp solves need a start state object");
        } else {
            check_keys(*st, "solve.start", {"r", "rho", "rho_p", "F", "F_p"}, diags);
            s.start.r = get_double(*st, "r", "solve.start.r", diags, true);
            s.start.rho = get_double(*st, "rho", "solve.start.rho", diags, true);
            s.start.rho_p = get_double(*st, "rho_p", "solve.start.rho_p", diags, true);
            s.start.F = get_double(*st, "F", "solve.start.F", diags, true);
            s.start.F_p = get_double(*st, "F_p", "solve.start.F_p", diags, true);
        }
        s.r_end = get_double(j, "r_end", "solve.r_end", diags, true);
    } else if (kind == "pole_bvp" || kind == "state_bvp") {
        const njson* tg = member(j, "target");
        if (!tg || !tg->is_object()) {
            note(diags, "solve.target", "shooting solves need a target object");
        } else {
            check_keys(*tg, "solve.target", {"r", "rho", "rho_p"}, diags);
            s.target.r_b = get_double(*tg, "r", "solve.target.r", diags, true);
            s.target.rho = get_double(*tg, "rho", "solve.target.rho", diags, true);
            s.target.rho_p = get_double(*tg, "rho_p", "solve.target.rho_p", diags, true);
        }
        if (kind == "pole_bvp") {
            s.kind = solve_kind::pole_bvp;
            if (const njson* pl = member(j, "pole")) {
                if (!pl->is_object()) {
                    note(diags, "solve.pole", "expected an object");
                } else {
                    check_keys(*pl, "solve.pole", {"C1_guess", "C2_guess", "eps"}, diags);
                    s.pole.C1_guess =
                        get_double(*pl, "C1_guess", "solve.pole.C1_guess", diags, false, 1.0);
                    s.pole.C2_guess =
                        get_double(*pl, "C2_guess", "solve.pole.C2_guess", diags, false, 0.0);
                    s.pole.eps = get_double(*pl, "eps", "solve.pole.eps", diags, false, 1e-3);
                }
            }
        } else {
            s.kind = solve_kind::state_bvp;
            const njson* lf = member(j, "left");
            if (!lf || !lf->is_object()) {
                note(diags, "solve.left", "state shooting needs a left state object");
            } else {
                check_keys(*lf, "solve.left", {"r", "rho", "rho_p", "F_guess", "F_p_guess"},
                           diags);
                s.left.r_a = get_double(*lf, "r", "solve.left.r", diags, true);
                s.left.rho = get_double(*lf, "rho", "solve.left.rho", diags, true);
                s.left.rho_p = get_double(*lf, "rho_p", "solve.left.rho_p", diags, true);
                s.left.F_guess =
                    get_double(*lf, "F_guess", "solve.left.F_guess", diags, false, 0.0);
                s.left.F_p_guess =
                    get_double(*lf, "F_p_guess", "solve.left.F_p_guess", diags, false, 0.0);
            }
        }
    } else {
        note(diags, "solve.kind", "expected one of ivp, pole_bvp, state_bvp");
    }
    s.solver.rel_tol = get_double(j, "rel_tol", "solve.rel_tol", diags, false, 1e-10);
    s.solver.abs_tol = get_double(j, "abs_tol", "solve.abs_tol", diags, false, 1e-12);
    s.solver.h_max = get_double(j, "h_max", "solve.h_max", diags, false, 1e-3);
    return s;
}

} // namespace detail

/// Builds a run_config from parsed JSON, appending structural diagnostics.
inline run_config parse_config(const nlohmann::json& j, std::vector<diagnostic>& diags) {
    run_config cfg;
    if (!j.is_object()) {
        detail::note(diags, "", "config root must be a JSON object");
        return cfg;
    }
    detail::check_keys(j, "",
                       {"command", "map", "interval", "grid_n", "tolerances", "sweep",
                        "solve", "variation", "output"},
                       diags);
    cfg.command = detail::get_string(j, "command", "command", diags, true);
    if (const auto* m = detail::member(j, "map")) cfg.map = detail::parse_map(*m, diags);
    else detail::note(diags, "map", "missing required object");

    if (const auto* iv = detail::member(j, "interval")) {
        if (!iv->is_object()) {
            detail::note(diags, "interval", "expected an object with a and b");
        } else {
            detail::check_keys(*iv, "interval", {"a", "b"}, diags);
            cfg.a = detail::get_double(*iv, "a", "interval.a", diags, true);
            cfg.b = detail::get_double(*iv, "b", "interval.b", diags, true);
            cfg.has_interval = true;
        }
    }
    cfg.grid_n = detail::get_int(j, "grid_n", "grid_n", diags, false, 0);
    if (const auto* t = detail::member(j, "tolerances")) {
        if (!t->is_object()) {
            detail::note(diags, "tolerances", "expected an object");
        } else {
            detail::check_keys(*t, "tolerances", {"tau_h", "tau_b", "tol_index"}, diags);
            cfg.tol.tau_h =
                detail::get_double(*t, "tau_h", "tolerances.tau_h", diags, false, 1e-8);
            cfg.tol.tau_b =
                detail::get_double(*t, "tau_b", "tolerances.tau_b", diags, false, 1e-6);
            if (detail::member(*t, "tol_index"))
                cfg.tol_index = detail::get_double(*t, "tol_index", "tolerances.tol_index",
                                                   diags, false);
        }
    }
    if (const auto* s = detail::member(j, "sweep")) {
        if (!s->is_object()) {
            detail::note(diags, "sweep", "expected an object");
        } else {
            detail::check_keys(*s, "sweep", {"param", "from", "to", "steps"}, diags);
            sweep_spec sw;
            sw.param = detail::get_string(*s, "param", "sweep.param", diags, true);
            sw.from = detail::get_double(*s, "from", "sweep.from", diags, true);
            sw.to = detail::get_double(*s, "to", "sweep.to", diags, true);
            sw.steps = detail::get_int(*s, "steps", "sweep.steps", diags, true, 1);
            cfg.sweep = sw;
        }
    }
    if (const auto* s = detail::member(j, "solve")) cfg.solve = detail::parse_solve(*s, diags);
    if (const auto* v = detail::member(j, "variation")) {
        if (!v->is_object()) {
            detail::note(diags, "variation", "expected an object with terms");
        } else {
            detail::check_keys(*v, "variation", {"terms"}, diags);
            if (const auto* vt = detail::member(*v, "terms"))
                cfg.variation = detail::parse_terms(*vt, "variation.terms", diags);
            else detail::note(diags, "variation.terms", "missing required array");
        }
    }
    if (const auto* o = detail::member(j, "output")) {
        if (!o->is_object()) {
            detail::note(diags, "output", "expected an object");
        } else {
            detail::check_keys(*o, "output", {"json", "csv"}, diags);
            cfg.output.json = detail::get_string(*o, "json", "output.json", diags, false);
            cfg.output.csv = detail::get_string(*o, "csv", "output.csv", diags, false);
        }
    }
    return cfg;
}

/// Parses JSON text, reporting syntax errors with a line-number field.
inline run_config parse_config_text(const std::string& text,
                                    std::vector<diagnostic>& diags) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        size_t line = 1;
        for (size_t i = 0; i < e.byte && i < text.size(); ++i)
            if (text[i] == '\n') ++line;
        detail::note(diags, "line " + std::to_string(line), e.what());
        return {};
    }
    return parse_config(j, diags);
}

namespace detail {

inline bool space_form_kind(const std::string& kind) {
    return kind == "flat" || kind == "spherical" || kind == "hyperbolic";
}

inline warping_function warping_from_kind(const std::string& kind) {
    if (kind == "flat") return warping_function::flat();
    if (kind == "spherical") return warping_function::spherical();
    if (kind == "hyperbolic") return warping_function::hyperbolic();
    fail(errc::config_invalid, "unknown space kind '" + kind + "'");
}

/// Interval the configured profile is defined on, without evaluating it.
inline interval profile_domain(const profile_spec& p) {
    if (p.kind == profile_kind::classification && p.classification == "hyperbolic")
        return interval{0.0, 1.0, true, false};
    return interval{0.0, infinity, true, false};
}

} // namespace detail

/// Semantic validation: catalog resolution, dimension bookkeeping and
/// interval containment.  Returns an empty list exactly when run() would
/// pass its precondition checks; performs no numerical work.
inline std::vector<diagnostic> validate(const run_config& cfg) {
    std::vector<diagnostic> diags;
    auto note = [&](const std::string& f, const std::string& m) {
        detail::note(diags, f, m);
    };

    const bool command_known = cfg.command == "verify" || cfg.command == "solve" ||
                               cfg.command == "stability" || cfg.command == "families" ||
                               cfg.command == "classify" || cfg.command == "sweep";
    if (!command_known) {
        note("command",
             "expected one of verify, solve, stability, families, classify, sweep");
        return diags;
    }

    const map_spec& map = cfg.map;
    const bool latitude = is_latitude(map);

    // eigenmap catalog
    eigenmap_descriptor phi;
    bool have_phi = false;
    if (map.eigenmap.empty()) {
        note("map.eigenmap", "missing eigenmap name");
    } else {
        try {
            phi = eigenmap_catalog(map.eigenmap);
            have_phi = true;
        } catch (const error& e) {
            note("map.eigenmap", std::string("catalog miss: ") + e.what());
        }
    }

    // space kinds
    if (latitude) {
        if (map.domain != "sphere")
            note("map.domain", "latitude maps need domain \"sphere\"");
    } else if (!detail::space_form_kind(map.domain)) {
        note("map.domain", "expected one of flat, spherical, hyperbolic");
    }
    if (!detail::space_form_kind(map.target))
        note("map.target", "expected one of flat, spherical, hyperbolic");

    // dimensions
    if (!latitude) {
        if (map.m < 2) note("map.m", "domain dimension m >= 2 is required");
        else if (have_phi && phi.domain_sphere_dim != map.m - 1)
            note("map.eigenmap", "eigenmap " + phi.name + " starts on S^" +
                                     std::to_string(phi.domain_sphere_dim) +
                                     ", but m = " + std::to_string(map.m) + " needs S^" +
                                     std::to_string(map.m - 1));
    }

    // profile
    const profile_spec& prof = map.profile;
    if (prof.kind == profile_kind::none) {
        if (cfg.command != "solve") note("map.profile", "missing profile");
    } else if (prof.kind == profile_kind::classification) {
        const std::string& c = prof.classification;
        if (c != "inversion" && c != "stereographic" && c != "hyperbolic") {
            note("map.profile.classification",
                 "catalog miss: unknown classification '" + c +
                     "'; expected inversion, stereographic or hyperbolic");
        } else {
            const char* wanted = c == "inversion" ? "flat"
                                 : c == "stereographic" ? "spherical"
                                                        : "hyperbolic";
            if (map.domain != "flat")
                note("map.domain", "classification maps have a flat domain");
            if (map.target != wanted)
                note("map.target", "classification '" + c + "' lands in a " + wanted +
                                       " target");
            if (map.m != 4) note("map.m", "classification maps need m = 4");
            if (have_phi && !is_identity_eigenmap(phi))
                note("map.eigenmap", "classification maps use identity(3)");
        }
    } else if (prof.kind == profile_kind::family) {
        if (prof.family.name != "harmonic" && prof.family.name != "biharmonic")
            note("map.profile.family.name", "expected harmonic or biharmonic");
        if (map.domain != "flat" || map.target != "flat")
            note("map.domain", "closed families live on flat domain and target");
        // No degeneracy probe: catalog eigenmaps tie k to m, so the vanishing
        // denominators of the closed family are out of reach here; m = 2 with
        // unit density takes the log branch instead.
    } else if (prof.kind == profile_kind::latitude) {
        if (detail::space_form_kind(map.target)) {
            interval dom = detail::warping_from_kind(map.target).domain();
            if (!dom.contains_interior(prof.latitude)) {
                std::ostringstream os;
                os << "latitude rho0 = " << prof.latitude
                   << " not interior to target domain " << dom.str();
                note("map.profile.latitude", os.str());
            }
        }
    }

    // interval checks
    const bool needs_interval =
        cfg.command == "verify" || cfg.command == "stability" ||
        cfg.command == "families" || cfg.command == "classify" ||
        cfg.command == "solve" || (cfg.command == "sweep" && !latitude);
    if (needs_interval && !latitude) {
        if (!cfg.has_interval) {
            note("interval", "missing interval {a, b}");
        } else if (!(cfg.a < cfg.b)) {
            std::ostringstream os;
            if (cfg.a == cfg.b) os << "interval is empty: a = b = " << cfg.a;
            else os << "interval needs a < b, got [" << cfg.a << ", " << cfg.b << "]";
            note("interval", os.str());
        } else {
            if (prof.kind != profile_kind::none) {
                interval pd = detail::profile_domain(prof);
                if (!pd.contains(cfg.a) || !pd.contains(cfg.b)) {
                    note("interval", "interval exceeds profile domain " + pd.str());
                }
            }
            if (detail::space_form_kind(map.domain)) {
                interval wd = detail::warping_from_kind(map.domain).domain();
                if (!wd.contains_interior(cfg.a) || !wd.contains_interior(cfg.b))
                    note("interval",
                         "interval must be interior to the domain model " + wd.str());
            }
        }
    }

    // grid size
    int n = effective_grid_n(cfg);
    if (cfg.command == "stability" && !latitude && n < 16)
        note("grid_n", "stability needs at least 16 interior nodes");
    else if ((cfg.command == "verify" || cfg.command == "families" ||
              cfg.command == "classify" || cfg.command == "sweep") &&
             n < 8)
        note("grid_n", "needs at least 8 grid points");
    else if (cfg.command == "solve" && n < 2)
        note("grid_n", "needs at least 2 sample points");

    // tolerances
    if (!(cfg.tol.tau_h > 0.0)) note("tolerances.tau_h", "must be positive");
    if (!(cfg.tol.tau_b > 0.0)) note("tolerances.tau_b", "must be positive");
    if (cfg.tol_index && !(*cfg.tol_index >= 0.0))
        note("tolerances.tol_index", "must be nonnegative");

    // command-specific blocks
    if (cfg.command == "solve") {
        if (!cfg.solve) {
            note("solve", "solve command needs a solve block");
        } else if (latitude) {
            note("map.profile", "solve applies to equivariant maps, not latitude maps");
        } else {
            const solve_spec& s = *cfg.solve;
            double lo = 0.0, hi = 0.0;
            bool span_known = false;
            if (s.kind == solve_kind::ivp) {
                if (s.start.r == s.r_end)
                    note("solve.r_end", "integration span is empty");
                lo = std::min(s.start.r, s.r_end);
                hi = std::max(s.start.r, s.r_end);
                span_known = true;
            } else if (s.kind == solve_kind::pole_bvp) {
                if (!(s.pole.eps > 0.0 && s.pole.eps <= 1e-2))
                    note("solve.pole.eps", "eps must lie in (0, 1e-2]");
                if (map.m != 4 || (have_phi && !is_identity_eigenmap(phi)))
                    note("map", "pole shooting is available for m = 4 with identity(3)");
                if (!(s.pole.eps < s.target.r_b))
                    note("solve.target.r", "target radius must exceed eps");
                lo = s.pole.eps;
                hi = s.target.r_b;
                span_known = true;
            } else {
                if (!(s.left.r_a < s.target.r_b))
                    note("solve.target.r", "target radius must exceed the left end");
                lo = s.left.r_a;
                hi = s.target.r_b;
                span_known = true;
            }
            if (span_known && cfg.has_interval && cfg.a < cfg.b &&
                !(cfg.a >= lo && cfg.b <= hi)) {
                std::ostringstream os;
                os << "sample interval [" << cfg.a << ", " << cfg.b
                   << "] leaves the integrated span [" << lo << ", " << hi << "]";
                note("interval", os.str());
            }
            if (!(s.solver.rel_tol > 0.0)) note("solve.rel_tol", "must be positive");
            if (!(s.solver.abs_tol > 0.0)) note("solve.abs_tol", "must be positive");
            if (!(s.solver.h_max > 0.0)) note("solve.h_max", "must be positive");
        }
    } else if (cfg.solve) {
        note("solve", "solve block is only used by the solve command");
    }

    if (cfg.command == "sweep") {
        if (!cfg.sweep) {
            note("sweep", "sweep command needs a sweep block");
        } else {
            const sweep_spec& sw = *cfg.sweep;
            if (sw.steps < 1) note("sweep.steps", "needs at least one step");
            bool param_ok = false;
            if (sw.param == "rho0") param_ok = latitude;
            else if (sw.param == "c1" || sw.param == "c2" || sw.param == "c3" ||
                     sw.param == "c4")
                param_ok = prof.kind == profile_kind::family;
            else if (sw.param == "C1" || sw.param == "C2")
                param_ok = prof.kind == profile_kind::pole;
            else {
                note("sweep.param",
                     "unknown parameter '" + sw.param +
                         "'; expected rho0, c1..c4, C1 or C2");
                param_ok = true; // already reported
            }
            if (!param_ok)
                note("sweep.param",
                     "parameter '" + sw.param + "' does not apply to this profile");
        }
    } else if (cfg.sweep) {
        note("sweep", "sweep block is only used by the sweep command");
    }

    if (cfg.command == "families") {
        if (prof.kind != profile_kind::none && prof.kind != profile_kind::family)
            note("map.profile", "families command needs a family profile");
    }
    if (cfg.command == "classify") {
        if (latitude) note("map.profile", "classify applies to equivariant maps");
        if (!latitude && map.m != 4)
            note("map.m", "conformal classification is specific to m = 4");
    }
    if (cfg.command == "stability" && cfg.variation && latitude)
        note("variation", "variation fields apply to equivariant stability only");
    if (cfg.variation && cfg.command != "stability")
        note("variation", "variation block is only used by the stability command");

    return diags;
}

/// Constructs the configured equivariant map.  Callers validate first.
inline equivariant_map build_equivariant(const map_spec& spec) {
    if (is_latitude(spec))
        fail(errc::config_invalid, "latitude profile cannot build an equivariant map");
    if (spec.profile.kind == profile_kind::classification)
        return classification_map(spec.profile.classification);
    eigenmap_descriptor phi = eigenmap_catalog(spec.eigenmap);
    model_space dom(spec.m, detail::warping_from_kind(spec.domain));
    model_space tgt(phi.target_sphere_dim + 1, detail::warping_from_kind(spec.target));
    radial_profile rho;
    switch (spec.profile.kind) {
    case profile_kind::terms: rho = make_polynomial_profile(spec.profile.terms); break;
    case profile_kind::family: {
        double k = 0.5 * phi.energy_density;
        if (spec.profile.family.name == "harmonic")
            rho = harmonic_family(spec.m, k, spec.profile.family.coeffs.c1,
                                  spec.profile.family.coeffs.c2);
        else rho = biharmonic_family(spec.m, k, spec.profile.family.coeffs);
        break;
    }
    case profile_kind::pole:
        rho = make_polynomial_profile(
            {{spec.profile.pole.C1, 1.0, false}, {spec.profile.pole.C2, 3.0, false}});
        break;
    default: fail(errc::config_invalid, "map has no usable profile");
    }
    return equivariant_map(std::move(dom), std::move(tgt), std::move(phi), std::move(rho));
}

inline latitude_map build_latitude(const map_spec& spec) {
    if (!is_latitude(spec))
        fail(errc::config_invalid, "map profile does not describe a latitude map");
    eigenmap_descriptor phi = eigenmap_catalog(spec.eigenmap);
    model_space tgt(phi.target_sphere_dim + 1, detail::warping_from_kind(spec.target));
    return latitude_map(std::move(phi), spec.profile.latitude, std::move(tgt));
}

} // namespace bhl
