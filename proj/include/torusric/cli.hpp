#pragma once

#include "torusric/curvature.hpp"
#include "torusric/mollify.hpp"
#include "torusric/orbit_space.hpp"
#include "torusric/quadrangle.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <string>
#include <vector>

namespace torusric {

// Process exit codes.
enum ExitCode : int { kExitPass = 0, kExitConfig = 1, kExitInfeasible = 2, kExitPositivity = 3 };

// Version of the CSV column layouts written by the commands.
inline constexpr int kCsvSchema = 1;

struct MollifyConfig {
    std::vector<double> ladder{1e-2, 1e-3, 1e-4};
    double sigma = 0.0;  // 0: 4 lambda
    double beta = 0.0;   // 0: default_beta
    ChartMode charts = ChartMode::Recompute;
};

struct OutputConfig {
    std::string dir = "out";
    std::string polygon_csv = "polygon.csv";
    std::string samples_csv = "samples.csv";
    std::string ladder_csv = "ladder.csv";
    std::string report = "report.json";
    std::string timings = "timings.json";
};

struct Config {
    WeightedDisk disk;
    MetricParams params;    // epsilon, delta, nu, mu, mu1, Delta (initial), branch
    GaussBonnetOptions gb;  // k2 ladder, apex offset, tolerance
    GridSpec grid;
    MollifyConfig mollify;
    OutputConfig output;

    // m = 5, n = 3 disk with the reference profile parameters.
    static Config defaults();
};

// Throws PreconditionError naming the offending key; unknown keys are rejected.
Config config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const Config& c);
// Parse errors carry the line and column.
Config load_config(const std::string& path);
Config parse_config(const std::string& text);

struct StageReport {
    std::string name;
    std::string status;  // pass, fail, skipped
    nlohmann::json details = nlohmann::json::object();
};

struct RunReport {
    std::string command;
    int exit_code = kExitPass;
    std::vector<StageReport> stages;
    std::vector<std::string> files;
    std::map<std::string, double> timings;  // seconds per stage; written separately

    const StageReport* stage(const std::string& name) const;
    // Everything except timings, so that reruns compare byte for byte.
    nlohmann::json to_json() const;
};

RunReport cmd_validate(const Config& c);
RunReport cmd_build(const Config& c);
RunReport cmd_certify(const Config& c);
RunReport cmd_mollify_report(const Config& c);

// Dispatches on the command name and writes report/timings files.
RunReport run_command(const std::string& command, const Config& c);

std::string ladder_csv(const std::vector<SmoothResult>& rows);

}  // namespace torusric
