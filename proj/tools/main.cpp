#include "torusric/cli.hpp"
#include "torusric/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <utility>

using namespace torusric;

int main(int argc, char** argv) {
    CLI::App app{"torusric: build and certify torus-invariant metrics from a config file"};
    app.require_subcommand(1);
    std::string config_path;
    const std::pair<const char*, const char*> commands[] = {
        {"validate", "check the weighted disk and its subtorus; names small cases"},
        {"build", "solve the profile and Gauss-Bonnet condition, assemble the polygon"},
        {"certify", "build, then sample the Ricci bounds (and the smoothed metric on success)"},
        {"mollify-report", "build, certify, and run the smoothing ladder regardless of the outcome"},
    };
    for (const auto& [name, help] : commands)
        app.add_subcommand(name, help)->add_option("config", config_path, "JSON config file")->required();
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitPass : kExitConfig;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        const Config c = load_config(config_path);
        const RunReport rep = run_command(command, c);
        for (const auto& s : rep.stages) {
            std::cout << s.name << ": " << s.status;
            const auto& d = s.details;
            if (d.contains("small_case"))
                std::cout << " (small case: " << d["small_case"]["model"].get<std::string>() << ")";
            if (d.contains("summary")) std::cout << " (" << d["summary"].get<std::string>() << ")";
            if (d.contains("min_ric_X"))
                std::cout << " (min ric_X " << d["min_ric_X"] << " in " << d["argmin_X_region"].get<std::string>()
                          << " at " << d["argmin_X"].dump() << ", min ric_U " << d["min_ric_U"] << " in "
                          << d["argmin_U_region"].get<std::string>() << " at " << d["argmin_U"].dump() << ")";
            std::cout << '\n';
        }
        std::cout << "report: " << c.output.dir << '/' << c.output.report << '\n';
        return rep.exit_code;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}
