// Command-line driver: run / verify / presets.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "phase/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"thermal and generalized Berry phases of a driven two-level system"};
    app.require_subcommand(1);

    std::string config_path;
    bool run_allow_undefined = false;
    CLI::App* run = app.add_subcommand("run", "evaluate a sweep described by a config file");
    run->add_option("config", config_path, "config file path")->required();
    run->add_flag("--allow-undefined", run_allow_undefined,
                  "exit 0 even when some rows have no defined phase");

    std::string suite = "two-level";
    bool verify_allow_undefined = false;
    int segments = 512;
    CLI::App* verify =
        app.add_subcommand("verify", "compare numeric phases against closed forms");
    verify->add_option("--suite", suite, "check suite name")->capture_default_str();
    verify->add_flag("--allow-undefined", verify_allow_undefined,
                     "skip checks whose phase is undefined instead of failing");
    verify->add_option("--segments", segments, "loop discretization used by the checks")
        ->capture_default_str();

    std::string preset_name;
    CLI::App* presets =
        app.add_subcommand("presets", "print a bundled config (fig1, example51, null-theorem)");
    presets->add_option("name", preset_name, "preset name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (run->parsed())
        return phase::run_command(config_path, run_allow_undefined, std::cerr);
    if (verify->parsed())
        return phase::verify_command(suite, verify_allow_undefined, segments, std::cout);
    return phase::presets_command(preset_name, std::cout, std::cerr);
}
