#include "torusric/cli.hpp"

#include "torusric/errors.hpp"
#include "torusric/metric_total.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

namespace torusric {

using nlohmann::json;

namespace {

// Reads the keys of one config section; unknown keys are an error.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw PreconditionError(path_ + ": expected an object");
    }

    template <class T>
    void read(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        const json& v = j_[key];
        try {
            if constexpr (std::is_same_v<T, double>) {
                if (!v.is_number()) throw PreconditionError("expected a number");
                out = v.get<double>();
            } else if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, unsigned>) {
                if (!v.is_number_unsigned()) throw PreconditionError("expected a non-negative integer");
                out = v.get<T>();
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string()) throw PreconditionError("expected a string");
                out = v.get<std::string>();
            } else {
                if (!v.is_array()) throw PreconditionError("expected a list of numbers");
                std::vector<double> xs;
                for (const auto& e : v) {
                    if (!e.is_number()) throw PreconditionError("expected a list of numbers");
                    xs.push_back(e.get<double>());
                }
                out = xs;
            }
        } catch (const PreconditionError& e) {
            throw PreconditionError(where(key) + ": " + e.what());
        }
    }

    std::string where(const char* key) const { return path_ + "." + key; }

    void mark(const char* key) { seen_.insert(key); }

    // Nested section, or nullptr when absent.
    const json* sub(const char* key) {
        seen_.insert(key);
        return j_.contains(key) ? &j_[key] : nullptr;
    }

    void finish() const {
        for (const auto& [k, v] : j_.items())
            if (!seen_.count(k)) throw PreconditionError(path_ + ": unknown key '" + k + "'");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string& msg) {
    if (!ok) throw PreconditionError(msg);
}

std::string charts_name(ChartMode m) { return m == ChartMode::Recompute ? "recompute" : "reuse"; }

ChartMode charts_from_string(const std::string& s) {
    if (s == "recompute") return ChartMode::Recompute;
    if (s == "reuse") return ChartMode::Reuse;
    throw PreconditionError("mollify.charts: expected 'recompute' or 'reuse', got '" + s + "'");
}

json point_json(Point2 p) { return {{"x", p.x}, {"y", p.y}}; }

using Clock = std::chrono::steady_clock;

// Shared state of one command run.
struct Run {
    const Config& c;
    RunReport rep;
    std::optional<GaussBonnetResult> gb;
    std::shared_ptr<const PolygonD> polygon;
    KernelLattice kernel;
    std::optional<CertificationReport> cert;

    Run(const Config& cfg, std::string command) : c(cfg) { rep.command = std::move(command); }

    std::filesystem::path out_path(const std::string& name) const { return std::filesystem::path(c.output.dir) / name; }

    void write(const std::string& name, const std::string& text) {
        std::filesystem::create_directories(c.output.dir);
        std::ofstream os(out_path(name), std::ios::binary);
        if (!os) throw PreconditionError("output: cannot write " + out_path(name).string());
        os << text;
        rep.files.push_back(name);
    }

    StageReport& stage(const std::string& name, const std::function<bool(json&)>& body) {
        const auto t0 = Clock::now();
        StageReport s;
        s.name = name;
        s.status = body(s.details) ? "pass" : "fail";
        rep.timings[name] = std::chrono::duration<double>(Clock::now() - t0).count();
        rep.stages.push_back(std::move(s));
        return rep.stages.back();
    }

    void skip(const std::vector<std::string>& names, const std::string& why) {
        for (const auto& n : names) rep.stages.push_back({n, "skipped", {{"reason", why}}});
    }
};

bool stage_disk(Run& run, json& out) {
    const WeightedDisk& d = run.c.disk;
    const DiskValidation v = validate_disk(d);
    json pairs = json::array();
    for (const auto& p : v.pairs) pairs.push_back(p.message);
    out["disk"] = disk_to_json(d);
    out["pairs"] = pairs;
    out["errors"] = v.errors;
    const bool sc = v.pass && is_simply_connected(d);
    out["simply_connected"] = sc;
    out["free_action"] = sc && check_free_action(d);
    return v.pass && sc && out["free_action"].get<bool>();
}

bool stage_lattice(Run& run, json& out) {
    const WeightedDisk& d = run.c.disk;
    run.kernel = subtorus_lattice(d);
    json basis = json::array();
    for (const auto& b : run.kernel.integer_kernel_basis) basis.push_back(to_ll(b));
    out["kernel_rank"] = run.kernel.rank();
    out["integer_kernel_basis"] = basis;
    std::size_t checked = 0;
    json mismatches = json::array();
    for (std::size_t i = 0; i < d.m; ++i)
        for (IsotropyKind k : {IsotropyKind::Edge, IsotropyKind::Vertex}) {
            ++checked;
            try {
                induced_isotropy(d, k, i);
            } catch (const InconsistencyError& e) {
                mismatches.push_back(e.what());
            }
        }
    out["isotropy_checked"] = checked;
    out["isotropy_mismatches"] = mismatches;
    return mismatches.empty();
}

bool stage_profile(Run& run, json& out) {
    const MetricParams& p = run.c.params;
    const double k1 = solve_k1(p.epsilon, p.delta, p.nu);
    out["k1"] = k1;
    out["branch"] = to_string(p.branch);
    json rows = json::array();
    for (double k2 : run.c.gb.k2_ladder) {
        MetricParams q = p;
        q.k2 = k2;
        std::optional<ProfileG> solved;
        try {
            solved = ProfileG::solve(q);
        } catch (const Error& e) {
            rows.push_back({{"k2", k2}, {"error", e.what()}});
            continue;
        }
        const ProfileG& g = *solved;
        const ContinuityReport cr = continuity_report(g);
        rows.push_back({{"k2", k2},
                        {"x0", g.params().x0},
                        {"domain_end", g.domain_end()},
                        {"value_jump_eps", cr.value_jump_eps},
                        {"deriv_jump_eps", cr.deriv_jump_eps},
                        {"value_jump_2eps", cr.value_jump_2eps},
                        {"kink_2eps", cr.kink}});
    }
    out["ladder"] = rows;
    return true;
}

bool stage_gauss_bonnet(Run& run, json& out) {
    const Config& c = run.c;
    const ProfileFactory factory = [&](double k2) -> std::shared_ptr<const SurfaceProfile> {
        MetricParams q = c.params;
        q.k2 = k2;
        return std::make_shared<const ProfileG>(ProfileG::solve(q));
    };
    run.gb = solve_gauss_bonnet(c.params, factory, c.gb);
    const GaussBonnetResult& gb = *run.gb;
    out["feasible"] = gb.feasible;
    out["summary"] = gb.summary;
    json attempts = json::array();
    for (const auto& a : gb.attempts) {
        json scan = json::array();
        for (const auto& s : a.scan) {
            json row = {{"Delta", s.Delta}, {"r", s.r}, {"total", s.total_ode}, {"bound", s.bound}};
            if (!std::isnan(s.total_quadrature)) row["total_quadrature"] = s.total_quadrature;
            scan.push_back(row);
        }
        attempts.push_back({{"k2", a.k2},
                            {"feasible", a.feasible},
                            {"reason", a.reason},
                            {"min_total_minus_bound", a.min_total_minus_bound},
                            {"scan", scan}});
    }
    out["attempts"] = attempts;
    if (!gb.feasible) {
        out["identity"] = "total = -int_0^Delta G'(X(y)) dy >= Delta*sinh(nu)";
        return false;
    }
    const MetricParams& p = gb.params;
    out["k2"] = p.k2;
    out["k1"] = p.k1;
    out["x0"] = p.x0;
    out["Delta"] = p.Delta;
    out["r"] = p.r;
    out["total"] = gb.total;
    out["total_closed_form"] = gb.total_closed_form;
    out["target_error"] = std::abs(gb.total - c.gb.target);
    out["corner_angles"] = {gb.angles.bottom, gb.angles.top};
    out["closest_approach"] = gb.min_distance;
    out["endpoint_error"] = gb.endpoint_error;
    run.polygon = std::make_shared<const PolygonD>(assemble_polygon(gb, c.disk.m));
    json verts = json::array();
    for (const auto& v : run.polygon->vertices)
        verts.push_back({{"label", v.label}, {"x", v.p.x}, {"y", v.p.y}, {"angle", v.angle}});
    out["vertices"] = verts;
    run.write(c.output.polygon_csv, polygon_csv(*run.polygon));
    return true;
}

json cert_json(const CertificationReport& r) {
    return {{"base_points", r.base_points},
            {"samples", r.samples},
            {"min_ric_X", r.min_X},
            {"argmin_X", point_json(r.argmin_X)},
            {"argmin_X_region", r.argmin_X_region},
            {"min_ric_U", r.min_U},
            {"argmin_U", point_json(r.argmin_U)},
            {"argmin_U_region", r.argmin_U_region},
            {"deep_interior_count", r.deep_interior_count},
            {"deep_interior_max_dev", r.deep_interior_max_dev},
            {"c_min", r.c_min},
            {"errors", r.errors},
            {"flagged", r.flagged}};
}

bool stage_certify(Run& run, json& out) {
    const TotalMetric tm(run.polygon);
    run.cert = certify(tm, run.kernel, run.c.grid);
    out = cert_json(*run.cert);
    run.write(run.c.output.samples_csv, certification_csv(*run.cert));
    return run.cert->pass;
}

bool stage_mollified(Run& run, json& out) {
    const Config& c = run.c;
    const double piecewise_min = std::min(run.cert->min_X, run.cert->min_U);
    std::vector<SmoothResult> rows;
    json lad = json::array();
    bool ok = true;
    for (double lam : c.mollify.ladder) {
        SmoothOptions opt;
        opt.lambda = lam;
        opt.sigma = c.mollify.sigma;
        opt.beta = c.mollify.beta;
        opt.charts = c.mollify.charts;
        opt.gb = c.gb;
        opt.grid = c.grid;
        SmoothResult r = smooth_pipeline(*run.gb, piecewise_min, c.disk.m, run.kernel, opt);
        const MollifierKernel kern(lam);
        json row = {{"lambda", lam},
                    {"sigma", r.sigma},
                    {"beta", r.beta},
                    {"kernel_mass_error", std::abs(kern.mass() - 1.0)},
                    {"sup_distance", r.sup_distance},
                    {"bad_measure", r.bad_measure},
                    {"bad_measure_bound", 4.0 * lam},
                    {"gauss_bonnet", r.gb.summary},
                    {"feasible", r.gb.feasible}};
        if (r.gb.feasible) {
            row["rel_change_k2"] = r.rel_change_k2;
            row["rel_change_Delta"] = r.rel_change_Delta;
            row["radial_sup"] = {r.radial_sup.value, r.radial_sup.d1, r.radial_sup.d2};
            row["radial_bounds_ok"] = r.radial_bounds_ok;
            row["certification"] = cert_json(r.cert);
            row["min_bound"] = r.min_bound;
            row["within_20_percent"] = r.within_20;
            row["pass"] = r.pass;
            const auto* mp = dynamic_cast<const MollifiedProfile*>(r.gb.profile.get());
            if (mp) row["commutation_error"] = commutation_error(mp->function());
        }
        ok = ok && r.gb.feasible && r.pass;
        lad.push_back(row);
        rows.push_back(std::move(r));
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < rows.size(); ++i)
        decreasing = decreasing && rows[i].sup_distance < rows[i - 1].sup_distance;
    out["ladder"] = lad;
    out["sup_distance_strictly_decreasing"] = decreasing;
    run.write(c.output.ladder_csv, ladder_csv(rows));
    return ok;
}

const std::vector<std::string> kStages{"disk validation", "lattice", "profile",
                                       "gauss-bonnet", "certification", "mollified certification"};

std::vector<std::string> stages_after(const std::string& name, std::size_t count) {
    const auto it = std::find(kStages.begin(), kStages.end(), name);
    std::vector<std::string> out(it + 1, kStages.begin() + static_cast<std::ptrdiff_t>(count));
    return out;
}

// Runs the first `count` stages, stopping at the first failure. The mollified
// stage runs even after a failed piecewise certification when `force_mollify`.
void run_stages(Run& run, std::size_t count, bool force_mollify = false) {
    using StageFn = bool (*)(Run&, json&);
    const StageFn fns[] = {stage_disk, stage_lattice, stage_profile, stage_gauss_bonnet, stage_certify,
                           stage_mollified};
    for (std::size_t i = 0; i < count; ++i) {
        const StageReport& s = run.stage(kStages[i], [&](json& d) { return fns[i](run, d); });
        if (s.status == "pass") continue;
        if (i == 4 && force_mollify) continue;
        if (i <= 1) run.rep.exit_code = kExitConfig;
        if (i == 3) run.rep.exit_code = kExitInfeasible;
        if (i >= 4) run.rep.exit_code = kExitPositivity;
        run.skip(stages_after(kStages[i], count), "earlier stage failed");
        return;
    }
    if (count == kStages.size() && run.rep.stages.back().status != "pass") run.rep.exit_code = kExitPositivity;
}

void require_general_case(const Config& c) {
    if (c.disk.m < 5)
        throw PreconditionError("m = " + std::to_string(c.disk.m) +
                                ": the construction needs m >= 5; run `validate` for the small-case result");
}

}  // namespace

Config Config::defaults() {
    Config c;
    c.disk = WeightedDisk::from_ll(3, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {0, 1, 1}});
    return c;
}

Config config_from_json(const json& j) {
    Config c;
    Section top(j, "config");
    if (!j.is_object() || !j.contains("disk")) throw PreconditionError("config: missing key 'disk'");
    top.mark("disk");
    c.disk = disk_from_json(j["disk"]);

    if (const json* v = top.sub("params")) {
        Section s(*v, "params");
        MetricParams& p = c.params;
        s.read("epsilon", p.epsilon);
        s.read("delta", p.delta);
        s.read("nu", p.nu);
        s.read("mu", p.mu);
        s.read("mu1", p.mu1);
        s.read("Delta_init", p.Delta);
        std::string branch = to_string(p.branch);
        s.read("branch", branch);
        try {
            p.branch = branch_from_string(branch);
        } catch (const PreconditionError& e) {
            throw PreconditionError(std::string("params.") + e.what());
        }
        s.read("k2_ladder", c.gb.k2_ladder);
        s.read("apex_offset", c.gb.apex_offset);
        s.finish();
    }
    if (const json* v = top.sub("grid")) {
        Section s(*v, "grid");
        GridSpec& g = c.grid;
        s.read("rows", g.rows);
        s.read("cols", g.cols);
        s.read("directions", g.directions);
        s.read("tube_feet", g.tube_feet);
        s.read("tube_depths", g.tube_depths);
        s.read("breakpoint_offset", g.breakpoint_offset);
        s.read("breakpoint_rows", g.breakpoint_rows);
        s.read("boundary_margin", g.boundary_margin);
        s.read("break_margin", g.break_margin);
        s.read("threads", g.threads);
        s.finish();
    }
    if (const json* v = top.sub("mollify")) {
        Section s(*v, "mollify");
        s.read("lambda_ladder", c.mollify.ladder);
        s.read("sigma", c.mollify.sigma);
        s.read("beta", c.mollify.beta);
        std::string charts = charts_name(c.mollify.charts);
        s.read("charts", charts);
        c.mollify.charts = charts_from_string(charts);
        s.finish();
    }
    if (const json* v = top.sub("tolerances")) {
        Section s(*v, "tolerances");
        s.read("gauss_bonnet", c.gb.total_tol);
        s.finish();
    }
    if (const json* v = top.sub("output")) {
        Section s(*v, "output");
        OutputConfig& o = c.output;
        s.read("dir", o.dir);
        s.read("polygon_csv", o.polygon_csv);
        s.read("samples_csv", o.samples_csv);
        s.read("ladder_csv", o.ladder_csv);
        s.read("report", o.report);
        s.read("timings", o.timings);
        s.finish();
    }
    top.finish();

    try {
        c.params.k2 = c.gb.k2_ladder.empty() ? 0.0 : c.gb.k2_ladder.front();
        c.params.validate();
    } catch (const PreconditionError& e) {
        throw PreconditionError(std::string("params: ") + e.what());
    }
    require(!c.gb.k2_ladder.empty(), "params.k2_ladder: must not be empty");
    for (double k2 : c.gb.k2_ladder) require(k2 > 0, "params.k2_ladder: entries must be positive");
    require(c.gb.total_tol > 0, "tolerances.gauss_bonnet: must be positive");
    require(c.grid.rows >= 2 && c.grid.cols >= 2, "grid.rows, grid.cols: need at least 2");
    require(c.grid.directions >= 1 && c.grid.tube_feet >= 1, "grid.directions, grid.tube_feet: need at least 1");
    for (double lam : c.mollify.ladder)
        require(lam > 0 && lam < c.params.epsilon / 4.0,
                "mollify.lambda_ladder: entries must lie in (0, epsilon/4)");
    require(c.mollify.sigma == 0.0 || c.mollify.sigma > 0.0, "mollify.sigma: must be non-negative");
    for (double lam : c.mollify.ladder)
        require(c.mollify.sigma == 0.0 || c.mollify.sigma > lam, "mollify.sigma: must exceed every lambda");
    require(c.mollify.beta == 0.0 || c.mollify.beta >= 2.0 * c.params.epsilon,
            "mollify.beta: must be 0 (default) or at least 2*epsilon");
    require(!c.output.dir.empty(), "output.dir: must not be empty");
    return c;
}

json config_to_json(const Config& c) {
    const MetricParams& p = c.params;
    const GridSpec& g = c.grid;
    return {{"disk", disk_to_json(c.disk)},
            {"params",
             {{"epsilon", p.epsilon},
              {"delta", p.delta},
              {"nu", p.nu},
              {"mu", p.mu},
              {"mu1", p.mu1},
              {"Delta_init", p.Delta},
              {"branch", to_string(p.branch)},
              {"k2_ladder", c.gb.k2_ladder},
              {"apex_offset", c.gb.apex_offset}}},
            {"grid",
             {{"rows", g.rows},
              {"cols", g.cols},
              {"directions", g.directions},
              {"tube_feet", g.tube_feet},
              {"tube_depths", g.tube_depths},
              {"breakpoint_offset", g.breakpoint_offset},
              {"breakpoint_rows", g.breakpoint_rows},
              {"boundary_margin", g.boundary_margin},
              {"break_margin", g.break_margin},
              {"threads", g.threads}}},
            {"mollify",
             {{"lambda_ladder", c.mollify.ladder},
              {"sigma", c.mollify.sigma},
              {"beta", c.mollify.beta},
              {"charts", charts_name(c.mollify.charts)}}},
            {"tolerances", {{"gauss_bonnet", c.gb.total_tol}}},
            {"output",
             {{"dir", c.output.dir},
              {"polygon_csv", c.output.polygon_csv},
              {"samples_csv", c.output.samples_csv},
              {"ladder_csv", c.output.ladder_csv},
              {"report", c.output.report},
              {"timings", c.output.timings}}}};
}

Config parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw PreconditionError(std::string("config: ") + e.what());
    }
    return config_from_json(j);
}

Config load_config(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw PreconditionError("config: cannot open " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

const StageReport* RunReport::stage(const std::string& name) const {
    for (const auto& s : stages)
        if (s.name == name) return &s;
    return nullptr;
}

json RunReport::to_json() const {
    json st = json::array();
    for (const auto& s : stages) st.push_back({{"name", s.name}, {"status", s.status}, {"details", s.details}});
    return {{"command", command}, {"exit_code", exit_code}, {"csv_schema", kCsvSchema}, {"stages", st},
            {"files", files}};
}

std::string ladder_csv(const std::vector<SmoothResult>& rows) {
    std::ostringstream os;
    os.precision(12);
    os << "lambda,sup_distance,bad_measure,min_ricci\n";
    for (const auto& r : rows) {
        os << r.lambda << ',' << r.sup_distance << ',' << r.bad_measure << ',';
        if (r.gb.feasible) os << r.min_bound;
        os << '\n';
    }
    return os.str();
}

RunReport cmd_validate(const Config& c) {
    Run run(c, "validate");
    run_stages(run, 2);
    if (run.rep.exit_code == kExitPass && c.disk.m <= 4) {
        const SmallCaseResult sc = small_case(c.disk.m, c.disk.n);
        run.rep.stages.front().details["small_case"] = {{"model", sc.model_name},
                                                        {"action", sc.action_description}};
    }
    return run.rep;
}

RunReport cmd_build(const Config& c) {
    require_general_case(c);
    Run run(c, "build");
    run_stages(run, 4);
    return run.rep;
}

RunReport cmd_certify(const Config& c) {
    require_general_case(c);
    Run run(c, "certify");
    run_stages(run, 6);
    return run.rep;
}

RunReport cmd_mollify_report(const Config& c) {
    require_general_case(c);
    Run run(c, "mollify-report");
    run_stages(run, 6, true);
    return run.rep;
}

RunReport run_command(const std::string& command, const Config& c) {
    RunReport rep;
    if (command == "validate")
        rep = cmd_validate(c);
    else if (command == "build")
        rep = cmd_build(c);
    else if (command == "certify")
        rep = cmd_certify(c);
    else if (command == "mollify-report")
        rep = cmd_mollify_report(c);
    else
        throw PreconditionError("unknown command '" + command + "'");

    std::filesystem::create_directories(c.output.dir);
    const auto dir = std::filesystem::path(c.output.dir);
    rep.files.push_back(c.output.report);
    rep.files.push_back(c.output.timings);
    {
        std::ofstream os(dir / c.output.report, std::ios::binary);
        os << rep.to_json().dump(2) << '\n';
    }
    json t = json::object();
    for (const auto& [k, v] : rep.timings) t[k] = v;
    std::ofstream os(dir / c.output.timings, std::ios::binary);
    os << t.dump(2) << '\n';
    return rep;
}

}  // namespace torusric
