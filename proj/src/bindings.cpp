#include "torusric/cli.hpp"
#include "torusric/errors.hpp"
#include "torusric/orbit_space.hpp"
#include "torusric/profile.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace torusric;

namespace {

// Dicts cross the boundary as JSON text; the Python wrapper does the conversion.
std::string report_text(const RunReport& r) {
    nlohmann::json j = r.to_json();
    j["timings"] = r.timings;
    return j.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<InconsistencyError>(m, "InconsistencyError", PyExc_RuntimeError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

    m.attr("EXIT_PASS") = int(kExitPass);
    m.attr("EXIT_CONFIG") = int(kExitConfig);
    m.attr("EXIT_INFEASIBLE") = int(kExitInfeasible);
    m.attr("EXIT_POSITIVITY") = int(kExitPositivity);
    m.attr("CSV_SCHEMA") = kCsvSchema;

    m.def("default_config", [] { return config_to_json(Config::defaults()).dump(); });
    m.def("normalize_config", [](const std::string& text) { return config_to_json(parse_config(text)).dump(); });

    m.def(
        "run",
        [](const std::string& command, const std::string& config_text, bool write_files) {
            const Config c = parse_config(config_text);
            py::gil_scoped_release release;
            RunReport r;
            if (write_files) r = run_command(command, c);
            else if (command == "validate") r = cmd_validate(c);
            else if (command == "build") r = cmd_build(c);
            else if (command == "certify") r = cmd_certify(c);
            else if (command == "mollify-report") r = cmd_mollify_report(c);
            else throw PreconditionError("unknown command " + command);
            return report_text(r);
        },
        py::arg("command"), py::arg("config"), py::arg("write_files") = true);

    m.def(
        "validate_disk",
        [](std::size_t n, const std::vector<std::vector<long long>>& w) {
            const WeightedDisk d = WeightedDisk::from_ll(n, w);
            const DiskValidation v = validate_disk(d);
            nlohmann::json j{{"pass", v.pass}, {"errors", v.errors}};
            if (v.pass) {
                j["simply_connected"] = is_simply_connected(d);
                j["free_action"] = check_free_action(d);
                j["kernel_rank"] = subtorus_lattice(d).rank();
            }
            return j.dump();
        },
        py::arg("n"), py::arg("weights"));

    m.def("small_case", [](std::size_t mm, std::size_t n) {
        const SmallCaseResult r = small_case(mm, n);
        return py::make_tuple(r.model_name, r.action_description);
    });

    m.def("solve_k1", &solve_k1, py::arg("epsilon"), py::arg("delta"), py::arg("nu"));
    m.def(
        "solve_x0",
        [](double eps, double nu, double k2, const std::string& branch) {
            return solve_x0(eps, nu, k2, branch_from_string(branch)).x0;
        },
        py::arg("epsilon"), py::arg("nu"), py::arg("k2"), py::arg("branch") = "shifted");

    m.def(
        "profile",
        [](double eps, double delta, double nu, double k2, const std::string& branch, const std::vector<double>& xs) {
            MetricParams p;
            p.epsilon = eps;
            p.delta = delta;
            p.nu = nu;
            p.k2 = k2;
            p.branch = branch_from_string(branch);
            const ProfileG g = ProfileG::solve(p);
            std::vector<std::tuple<double, double, double, double>> out;
            for (double x : xs) {
                const ProfileSample s = g.eval(x);
                out.emplace_back(s.g, s.dg, s.ddg, g.gauss_curvature(x));
            }
            return out;
        },
        py::arg("epsilon"), py::arg("delta"), py::arg("nu"), py::arg("k2"), py::arg("branch"), py::arg("xs"));
}
