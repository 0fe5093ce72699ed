#pragma once

/// Command execution: builds the configured map, runs the requested command
/// and writes one JSON report plus one CSV data file per run.  All numeric
/// output goes through format_double, so identical configs produce
/// byte-identical files.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "bhl/closed_forms.hpp"
#include "bhl/config.hpp"
#include "bhl/io.hpp"
#include "bhl/solver.hpp"
#include "bhl/tension.hpp"
#include "bhl/variation.hpp"

namespace bhl {

struct run_result {
    int exit_code = 0;
    std::vector<std::string> written; // paths of the emitted report files
    std::string summary;              // one-line status for stdout
    std::string stderr_json;          // machine-readable diagnostic on failure
};

namespace detail {

inline std::string join_path(const std::string& out_dir, const std::string& name) {
    return (std::filesystem::path(out_dir) / name).string();
}

inline std::string json_path(const run_config& cfg, const std::string& out_dir) {
    std::string name = cfg.output.json.empty() ? cfg.command + ".json" : cfg.output.json;
    return join_path(out_dir, name);
}

inline std::string csv_path(const run_config& cfg, const std::string& out_dir) {
    std::string name = cfg.output.csv.empty() ? cfg.command + ".csv" : cfg.output.csv;
    return join_path(out_dir, name);
}

inline json_value terms_json(const std::vector<poly_term>& terms) {
    json_value arr = json_value::make_array();
    for (const poly_term& t : terms) {
        json_value obj = json_value::make_object();
        obj.set("coefficient", t.coefficient);
        obj.set("exponent", t.exponent);
        obj.set("log", t.log);
        arr.push(std::move(obj));
    }
    return arr;
}

inline csv_table index_csv(const index_report& rep) {
    csv_table table({"index", "eigenvalue"});
    for (size_t i = 0; i < rep.eigenvalues.size(); ++i)
        table.add_row({std::to_string(i), format_double(rep.eigenvalues[i])});
    return table;
}

inline verdict latitude_verdict(const latitude_residual_data& res, tolerances tol) {
    if (std::abs(res.F) <= tol.tau_h) return verdict::harmonic;
    if (std::abs(res.bitension) <= tol.tau_b) return verdict::proper_biharmonic;
    return verdict::neither;
}

struct report_files {
    json_value json = json_value::make_object();
    csv_table csv{{}};
    std::string summary;
};

inline report_files run_verify(const run_config& cfg) {
    report_files out;
    out.json.set("command", "verify");
    if (is_latitude(cfg.map)) {
        latitude_map map = build_latitude(cfg.map);
        latitude_residual_data res = latitude_residuals(map);
        verdict v = latitude_verdict(res, cfg.tol);
        out.json.set("rho0", map.rho0);
        out.json.set("F", res.F);
        out.json.set("bitension", res.bitension);
        out.json.set("classification", verdict_name(v));
        out.csv = csv_table({"rho0", "F", "bitension"});
        out.csv.add_row({format_double(map.rho0), format_double(res.F),
                         format_double(res.bitension)});
        out.summary = std::string("verify: latitude map is ") + verdict_name(v);
        return out;
    }
    equivariant_map map = build_equivariant(cfg.map);
    residual_report_data rep =
        residual_report(map, cfg.a, cfg.b, effective_grid_n(cfg), cfg.tol);
    json_value iv = json_value::make_object();
    iv.set("a", rep.a);
    iv.set("b", rep.b);
    out.json.set("interval", std::move(iv));
    out.json.set("grid_n", static_cast<int>(rep.grid.size()));
    out.json.set("classification", verdict_name(rep.classification));
    out.json.set("F_sup", rep.F_sup);
    out.json.set("F_l2", rep.F_l2);
    out.json.set("bitension_sup", rep.bitension_sup);
    out.json.set("bitension_l2", rep.bitension_l2);
    out.json.set("conformal_sup",
                 rep.conformal_sup ? json_value(*rep.conformal_sup) : json_value(nullptr));
    out.csv = csv_table({"r", "F", "bitension", "conformal"});
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (size_t i = 0; i < rep.grid.size(); ++i) {
        double conf = rep.conformal_values.empty() ? nan : rep.conformal_values[i];
        out.csv.add_row({format_double(rep.grid[i]), format_double(rep.F_values[i]),
                         format_double(rep.bitension_values[i]), format_double(conf)});
    }
    out.summary = std::string("verify: ") + verdict_name(rep.classification) +
                  ", bitension_sup = " + format_double(rep.bitension_sup);
    return out;
}

inline report_files run_solve(const run_config& cfg) {
    const solve_spec& spec = *cfg.solve;
    eigenmap_descriptor phi = eigenmap_catalog(cfg.map.eigenmap);
    const int m = cfg.map.m;
    const double k = 0.5 * phi.energy_density;
    warping_function sigma = warping_from_kind(cfg.map.domain);
    warping_function lambda = warping_from_kind(cfg.map.target);

    report_files out;
    out.json.set("command", "solve");
    trajectory traj = [&]() -> trajectory {
        if (spec.kind == solve_kind::ivp) {
            out.json.set("kind", "ivp");
            out.json.set("iterations", nullptr);
            out.json.set("mismatch", nullptr);
            out.json.set("p1", nullptr);
            out.json.set("p2", nullptr);
            out.summary = "solve: integrated initial value problem";
            return integrate_ivp(m, k, sigma, lambda, spec.start, spec.r_end,
                                 spec.solver);
        }
        shoot_result shot =
            spec.kind == solve_kind::pole_bvp
                ? shoot_bvp(m, k, sigma, lambda, spec.pole, spec.target, spec.solver)
                : shoot_bvp(m, k, sigma, lambda, spec.left, spec.target, spec.solver);
        out.json.set("kind", spec.kind == solve_kind::pole_bvp ? "pole_bvp" : "state_bvp");
        out.json.set("iterations", shot.iterations);
        out.json.set("mismatch", shot.mismatch);
        out.json.set("p1", shot.p1);
        out.json.set("p2", shot.p2);
        out.summary = "solve: shooting converged in " + std::to_string(shot.iterations) +
                      " iterations, mismatch = " + format_double(shot.mismatch);
        return std::move(shot.traj);
    }();
    out.json.set("states", traj.states().size());
    out.json.set("r_first", traj.r_front());
    out.json.set("r_last", traj.r_back());

    const int n = effective_grid_n(cfg);
    const double lo = std::min(traj.r_front(), traj.r_back());
    const double hi = std::max(traj.r_front(), traj.r_back());
    out.csv = csv_table({"r", "rho", "rho_p", "F", "F_p"});
    for (int i = 0; i < n; ++i) {
        double r = cfg.a + (cfg.b - cfg.a) * i / (n - 1);
        r = std::clamp(r, lo, hi);
        ode_state s = traj.at(r);
        out.csv.add_row({format_double(s.r), format_double(s.rho),
                         format_double(s.rho_p), format_double(s.F),
                         format_double(s.F_p)});
    }
    return out;
}

inline report_files run_stability(const run_config& cfg) {
    report_files out;
    out.json.set("command", "stability");
    if (is_latitude(cfg.map)) {
        latitude_map map = build_latitude(cfg.map);
        index_report rep = stability_index(map, cfg.tol_index, cfg.tol);
        out.json.set("grid_size", rep.grid_size);
        out.json.set("negative_count", rep.negative_count);
        out.json.set("tol_index", rep.tol_index);
        json_value eig = json_value::make_array();
        for (double v : rep.eigenvalues) eig.push(v);
        out.json.set("eigenvalues", std::move(eig));
        out.json.set("tau_variation", tau_variation_value(map));
        out.csv = index_csv(rep);
        out.summary =
            "stability: negative_count = " + std::to_string(rep.negative_count);
        return out;
    }
    equivariant_map map = build_equivariant(cfg.map);
    index_report rep =
        stability_index(map, cfg.a, cfg.b, effective_grid_n(cfg), cfg.tol_index, cfg.tol);
    out.json.set("grid_size", rep.grid_size);
    out.json.set("negative_count", rep.negative_count);
    out.json.set("tol_index", rep.tol_index);
    json_value eig = json_value::make_array();
    for (double v : rep.eigenvalues) eig.push(v);
    out.json.set("eigenvalues", std::move(eig));
    if (cfg.variation) {
        radial_profile v = make_polynomial_profile(*cfg.variation);
        hessian_report h = hessian_form(map, v, cfg.a, cfg.b, cfg.tol);
        json_value hess = json_value::make_object();
        hess.set("value", h.value);
        json_value terms = json_value::make_array();
        for (double t : h.terms) terms.push(t);
        hess.set("terms", std::move(terms));
        hess.set("quadrature_panels", h.quadrature_panels);
        out.json.set("hessian", std::move(hess));
    }
    out.csv = index_csv(rep);
    out.summary = "stability: negative_count = " + std::to_string(rep.negative_count);
    return out;
}

inline report_files run_families(const run_config& cfg) {
    const profile_spec& prof = cfg.map.profile;
    eigenmap_descriptor phi = eigenmap_catalog(cfg.map.eigenmap);
    const int m = cfg.map.m;
    const double k = 0.5 * phi.energy_density;
    exponent_pair expo = euclidean_exponents(m, k);
    const family_coefficients& c = prof.family.coeffs;
    const bool biharmonic = prof.family.name == "biharmonic";

    std::vector<poly_term> terms =
        biharmonic ? biharmonic_family_terms(m, k, c)
                   : harmonic_family_terms(m, k, c.c1, c.c2);
    std::vector<poly_term> tension_terms;
    if (biharmonic) tension_terms = biharmonic_family_tension_terms(m, k, c);

    bool have_almansi = false;
    std::vector<poly_term> rho1_terms, rho2_terms;
    std::string almansi_note;
    if (biharmonic) {
        try {
            std::tie(rho1_terms, rho2_terms) = almansi_terms(m, k, c);
            have_almansi = true;
        } catch (const error& e) {
            if (e.code() != errc::not_applicable) throw;
            almansi_note = e.what();
        }
    }

    report_files out;
    out.json.set("command", "families");
    out.json.set("family", prof.family.name);
    out.json.set("m", m);
    out.json.set("k", k);
    out.json.set("k_plus", expo.k_plus);
    out.json.set("k_minus", expo.k_minus);
    json_value coeffs = json_value::make_object();
    coeffs.set("c1", c.c1);
    coeffs.set("c2", c.c2);
    coeffs.set("c3", c.c3);
    coeffs.set("c4", c.c4);
    out.json.set("coefficients", std::move(coeffs));
    out.json.set("terms", terms_json(terms));
    out.json.set("tension_terms", terms_json(tension_terms));
    if (have_almansi) {
        json_value alm = json_value::make_object();
        alm.set("rho1", terms_json(rho1_terms));
        alm.set("rho2", terms_json(rho2_terms));
        out.json.set("almansi", std::move(alm));
    } else {
        out.json.set("almansi", nullptr);
        if (!almansi_note.empty()) out.json.set("almansi_note", almansi_note);
    }

    radial_profile rho = make_polynomial_profile(terms);
    radial_profile rho1, rho2;
    if (have_almansi) {
        rho1 = make_polynomial_profile(rho1_terms);
        rho2 = make_polynomial_profile(rho2_terms);
    }
    const int n = effective_grid_n(cfg);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.csv = csv_table({"r", "rho", "rho1", "rho2"});
    for (int i = 0; i < n; ++i) {
        double r = cfg.a + (cfg.b - cfg.a) * i / (n - 1);
        double v1 = have_almansi ? profile_eval(rho1, r, 0) : nan;
        double v2 = have_almansi ? profile_eval(rho2, r, 0) : nan;
        out.csv.add_row({format_double(r), format_double(profile_eval(rho, r, 0)),
                         format_double(v1), format_double(v2)});
    }
    out.summary = "families: " + prof.family.name + " member with exponents " +
                  format_double(expo.k_plus) + ", " + format_double(expo.k_minus);
    return out;
}

inline report_files run_classify(const run_config& cfg) {
    equivariant_map map = build_equivariant(cfg.map);
    const double c = space_form_curvature(map.domain.warping);
    conformal_factor_report rep =
        conformal_factor_residual(map, c, cfg.a, cfg.b, effective_grid_n(cfg));
    // Snap the grid mean to the exact branch point before classifying.
    const double A = std::abs(rep.A) <= 1e-8 ? 0.0 : rep.A;
    const char* branch = A == 0.0 ? "flat" : (A > 0.0 ? "hyperbolic" : "spherical");
    const double constant =
        A == 0.0 ? std::sqrt(1.0 + c) : std::sqrt(2.0 * (1.0 + c) / std::abs(A));

    report_files out;
    out.json.set("command", "classify");
    out.json.set("A", rep.A);
    out.json.set("A_spread", rep.A_spread);
    out.json.set("residual_sup", rep.residual_sup);
    out.json.set("domain_curvature", c);
    out.json.set("target_branch", branch);
    out.json.set("target_constant", constant);

    const int n = effective_grid_n(cfg);
    out.csv = csv_table({"r", "u"});
    for (int i = 0; i < n; ++i) {
        double r = cfg.a + (cfg.b - cfg.a) * i / (n - 1);
        double u = map.target.warping(profile_eval(map.profile, r, 0), 0) /
                   map.domain.warping(r, 0);
        out.csv.add_row({format_double(r), format_double(u)});
    }
    out.summary = std::string("classify: ") + branch + " target, A = " +
                  format_double(rep.A);
    return out;
}

inline report_files run_sweep(const run_config& cfg) {
    const sweep_spec& sw = *cfg.sweep;
    const int steps = sw.steps;
    auto value_at = [&](int i) {
        if (steps == 1) return sw.from;
        return sw.from + (sw.to - sw.from) * i / (steps - 1);
    };
    const double nan = std::numeric_limits<double>::quiet_NaN();

    report_files out;
    out.json.set("command", "sweep");
    out.json.set("param", sw.param);
    out.json.set("from", sw.from);
    out.json.set("to", sw.to);
    out.json.set("steps", steps);

    int failures = 0;
    if (is_latitude(cfg.map)) {
        eigenmap_descriptor phi = eigenmap_catalog(cfg.map.eigenmap);
        out.csv = csv_table({"rho0", "F", "bitension", "bienergy", "error"});
        for (int i = 0; i < steps; ++i) {
            double v = value_at(i);
            try {
                map_spec spec = cfg.map;
                spec.profile.latitude = v;
                latitude_map map = build_latitude(spec);
                latitude_residual_data res = latitude_residuals(map);
                out.csv.add_row({format_double(v), format_double(res.F),
                                 format_double(res.bitension),
                                 format_double(bienergy(map)), ""});
            } catch (const error& e) {
                ++failures;
                out.csv.add_row({format_double(v), format_double(nan),
                                 format_double(nan), format_double(nan), e.what()});
            }
        }
    } else {
        out.csv = csv_table({sw.param, "F_sup", "bitension_sup", "energy", "bienergy",
                             "error"});
        const int n = effective_grid_n(cfg);
        for (int i = 0; i < steps; ++i) {
            double v = value_at(i);
            try {
                map_spec spec = cfg.map;
                if (sw.param == "c1") spec.profile.family.coeffs.c1 = v;
                else if (sw.param == "c2") spec.profile.family.coeffs.c2 = v;
                else if (sw.param == "c3") spec.profile.family.coeffs.c3 = v;
                else if (sw.param == "c4") spec.profile.family.coeffs.c4 = v;
                else if (sw.param == "C1") spec.profile.pole.C1 = v;
                else spec.profile.pole.C2 = v;
                equivariant_map map = build_equivariant(spec);
                residual_report_data rep = residual_report(map, cfg.a, cfg.b, n, cfg.tol);
                out.csv.add_row({format_double(v), format_double(rep.F_sup),
                                 format_double(rep.bitension_sup),
                                 format_double(energy(map, cfg.a, cfg.b)),
                                 format_double(bienergy(map, cfg.a, cfg.b)), ""});
            } catch (const error& e) {
                ++failures;
                out.csv.add_row({format_double(v), format_double(nan),
                                 format_double(nan), format_double(nan),
                                 format_double(nan), e.what()});
            }
        }
    }
    out.json.set("rows", out.csv.row_count());
    out.json.set("failures", failures);
    out.summary = "sweep: " + std::to_string(out.csv.row_count()) + " rows, " +
                  std::to_string(failures) + " failures";
    return out;
}

} // namespace detail

/// Executes a validated config; returns exit code and the written paths.
/// Exit 2 flags config problems, exit 3 numerical or filesystem failure.
inline run_result run(const run_config& cfg, const std::string& out_dir = ".") {
    run_result result;
    std::vector<diagnostic> diags = validate(cfg);
    if (!diags.empty()) {
        json_value err = json_value::make_object();
        err.set("error", "config_invalid");
        json_value list = json_value::make_array();
        for (const diagnostic& d : diags) {
            json_value item = json_value::make_object();
            item.set("field", d.field);
            item.set("message", d.message);
            list.push(std::move(item));
        }
        err.set("diagnostics", std::move(list));
        result.exit_code = 2;
        result.stderr_json = err.dump();
        return result;
    }
    try {
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec) fail(errc::io_error, "cannot create output directory " + out_dir);

        detail::report_files files;
        if (cfg.command == "verify") files = detail::run_verify(cfg);
        else if (cfg.command == "solve") files = detail::run_solve(cfg);
        else if (cfg.command == "stability") files = detail::run_stability(cfg);
        else if (cfg.command == "families") files = detail::run_families(cfg);
        else if (cfg.command == "classify") files = detail::run_classify(cfg);
        else files = detail::run_sweep(cfg);

        std::string jpath = detail::json_path(cfg, out_dir);
        std::string cpath = detail::csv_path(cfg, out_dir);
        write_text_file(jpath, files.json.dump());
        result.written.push_back(jpath);
        write_text_file(cpath, files.csv.dump());
        result.written.push_back(cpath);
        result.summary = files.summary;
    } catch (const error& e) {
        json_value err = json_value::make_object();
        err.set("error", errc_name(e.code()));
        err.set("message", e.what());
        result.exit_code = 3;
        result.stderr_json = err.dump();
    }
    return result;
}

/// Reads, parses and runs a config file.  Parse failures exit 2 with the
/// same diagnostics shape as validation failures.
inline run_result run_config_file(const std::string& config_path,
                                  const std::string& out_dir = ".") {
    std::string text;
    try {
        text = read_text_file(config_path);
    } catch (const error& e) {
        run_result result;
        json_value err = json_value::make_object();
        err.set("error", "config_invalid");
        json_value list = json_value::make_array();
        json_value item = json_value::make_object();
        item.set("field", "--config");
        item.set("message", e.what());
        list.push(std::move(item));
        err.set("diagnostics", std::move(list));
        result.exit_code = 2;
        result.stderr_json = err.dump();
        return result;
    }
    std::vector<diagnostic> diags;
    run_config cfg = parse_config_text(text, diags);
    if (!diags.empty()) {
        run_result result;
        json_value err = json_value::make_object();
        err.set("error", "config_invalid");
        json_value list = json_value::make_array();
        for (const diagnostic& d : diags) {
            json_value item = json_value::make_object();
            item.set("field", d.field);
            item.set("message", d.message);
            list.push(std::move(item));
        }
        err.set("diagnostics", std::move(list));
        result.exit_code = 2;
        result.stderr_json = err.dump();
        return result;
    }
    return run(cfg, out_dir);
}

} // namespace bhl
