#include "torusric/cli.hpp"
#include "torusric/errors.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace torusric;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

Config quick(const std::string& dir) {
    Config c = Config::defaults();
    c.grid.rows = 6;
    c.grid.cols = 6;
    c.mollify.ladder = {1e-3};
    c.output.dir = (fs::temp_directory_path() / "torusric_test_cli" / dir).string();
    fs::remove_all(c.output.dir);
    return c;
}

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const PreconditionError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("config round trip") {
    Config c = Config::defaults();
    c.params.branch = Branch::Principal;
    c.mollify.charts = ChartMode::Reuse;
    c.mollify.ladder = {0.003, 0.0007};
    c.grid.tube_depths = {0.1, 0.7};
    c.output.dir = "elsewhere";
    const nlohmann::json j = config_to_json(c);
    const Config back = config_from_json(j);
    CHECK(config_to_json(back) == j);
    CHECK(config_to_json(parse_config(j.dump())) == j);
    CHECK(back.disk == c.disk);
}

TEST_CASE("config errors name their location") {
    CHECK(error_of("{\"disk\": {\"n\": 2,\n \"m\": 5,,}}").find("line 2") != std::string::npos);
    const nlohmann::json base = config_to_json(Config::defaults());

    nlohmann::json j = base;
    j["params"]["epsilon_typo"] = 1;
    CHECK(error_of(j.dump()).find("params: unknown key 'epsilon_typo'") != std::string::npos);

    j = base;
    j["disk"]["weights"][3] = {2, 2, 0};
    CHECK(error_of(j.dump()).find("weight 4 not primitive") != std::string::npos);

    j = base;
    j["params"]["nu"] = 0.0;
    CHECK(error_of(j.dump()).find("nu must be positive") != std::string::npos);

    j = base;
    j["grid"]["rows"] = "many";
    CHECK(error_of(j.dump()).find("grid.rows") != std::string::npos);

    j = base;
    j["mollify"]["lambda_ladder"] = {0.03};
    CHECK(error_of(j.dump()).find("mollify.lambda_ladder") != std::string::npos);

    j = base;
    j.erase("disk");
    CHECK(error_of(j.dump()).find("disk") != std::string::npos);
}

TEST_CASE("validate and the small-case path") {
    Config c = quick("small");
    c.disk = WeightedDisk::from_ll(3, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}});
    const RunReport r = cmd_validate(c);
    CHECK(r.exit_code == kExitPass);
    REQUIRE(r.stage("disk validation"));
    CHECK(r.stage("disk validation")->details["small_case"]["model"] == "S^2 x S^3 or S^2 x~ S^3");
    CHECK(r.stage("profile") == nullptr);
    CHECK_THROWS_AS(cmd_build(c), PreconditionError);

    const RunReport ok = cmd_validate(quick("v5"));
    CHECK(ok.exit_code == kExitPass);
    CHECK(ok.stage("lattice")->details["kernel_rank"] == 2);
    CHECK(ok.stage("lattice")->details["isotropy_mismatches"].empty());
}

TEST_CASE("build: shifted solves, principal reports infeasibility") {
    const Config c = quick("build");
    const RunReport r = cmd_build(c);
    CHECK(r.exit_code == kExitPass);
    const auto& gb = r.stage("gauss-bonnet")->details;
    CHECK(gb["target_error"].get<double>() < 1e-6);
    CHECK(fs::exists(fs::path(c.output.dir) / c.output.polygon_csv));

    Config p = quick("principal");
    p.params.branch = Branch::Principal;
    const RunReport rp = cmd_build(p);
    CHECK(rp.exit_code == kExitInfeasible);
    CHECK(rp.stage("gauss-bonnet")->status == "fail");
    CHECK(rp.stage("gauss-bonnet")->details["summary"].get<std::string>().find("Delta*sinh(nu)") !=
          std::string::npos);
}

TEST_CASE("certify: stage order, short circuit and determinism") {
    const Config c = quick("cert_a");
    const RunReport a = run_command("certify", c);
    const std::vector<std::string> order{"disk validation", "lattice", "profile",
                                         "gauss-bonnet", "certification", "mollified certification"};
    REQUIRE(a.stages.size() == order.size());
    for (std::size_t i = 0; i < order.size(); ++i) CHECK(a.stages[i].name == order[i]);
    const std::string cert = a.stage("certification")->status;
    if (cert == "fail") {
        CHECK(a.exit_code == kExitPositivity);
        CHECK(a.stage("mollified certification")->status == "skipped");
        CHECK(a.stage("certification")->details.contains("argmin_X"));
    }

    Config c2 = c;
    c2.output.dir = quick("cert_b").output.dir;
    c2.grid.threads = 2;
    run_command("certify", c2);
    for (const std::string& f : {c.output.samples_csv, c.output.report, c.output.polygon_csv})
        CHECK(slurp(fs::path(c.output.dir) / f) == slurp(fs::path(c2.output.dir) / f));
    const auto rep = nlohmann::json::parse(slurp(fs::path(c.output.dir) / c.output.report));
    CHECK_FALSE(rep.contains("timings"));
    CHECK(nlohmann::json::parse(slurp(fs::path(c.output.dir) / c.output.timings)).contains("certification"));
}

TEST_CASE("mollify-report writes the ladder") {
    const Config c = quick("ladder");
    const RunReport r = cmd_mollify_report(c);
    CHECK(r.stage("mollified certification")->status != "skipped");
    const std::string csv = slurp(fs::path(c.output.dir) / c.output.ladder_csv);
    CHECK(csv.rfind("lambda,sup_distance,bad_measure,min_ricci\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
    CHECK_THROWS_AS(run_command("explode", c), PreconditionError);
}
