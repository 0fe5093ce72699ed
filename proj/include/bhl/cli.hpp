#pragma once

/// Command-line front end: argument parsing, exit codes and stdio plumbing.
/// Kept separate from run.hpp so library users never pull in CLI11.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "bhl/run.hpp"

namespace bhl {

inline int cli_main(int argc, char** argv) {
    CLI::App app{"evaluate, solve and stability-test rotationally symmetric "
                 "biharmonic maps between model spaces"};
    std::string config_path;
    std::string out_dir = ".";
    bool quiet = false;
    app.add_option("--config", config_path, "path to a JSON run configuration")
        ->required();
    app.add_option("--out-dir", out_dir, "directory for the report files");
    app.add_flag("--quiet", quiet, "suppress the status lines on stdout");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        json_value err = json_value::make_object();
        err.set("error", "config_invalid");
        json_value list = json_value::make_array();
        json_value item = json_value::make_object();
        item.set("field", "arguments");
        item.set("message", e.what());
        list.push(std::move(item));
        err.set("diagnostics", std::move(list));
        std::fputs(err.dump().c_str(), stderr);
        return 2;
    }

    run_result result = run_config_file(config_path, out_dir);
    if (!result.stderr_json.empty()) std::fputs(result.stderr_json.c_str(), stderr);
    if (!quiet) {
        for (const std::string& path : result.written)
            std::printf("wrote %s\n", path.c_str());
        if (!result.summary.empty()) std::printf("%s\n", result.summary.c_str());
    }
    return result.exit_code;
}

} // namespace bhl
