#include "torusric/quadrangle.hpp"

#include "torusric/errors.hpp"
#include "torusric/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace torusric {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Arclengths along the path where x crosses a profile feature.
std::vector<double> feature_crossings(const GeodesicPath& path) {
    std::vector<double> out;
    const auto feats = path.profile->features();
    for (std::size_t k = 0; k + 1 < path.samples.size(); ++k) {
        const auto& a = path.samples[k];
        const auto& b = path.samples[k + 1];
        for (double f : feats) {
            if ((a.x - f) * (b.x - f) < 0) {
                try {
                    out.push_back(bracket_root([&](double s) { return path.at(s).x - f; }, a.s, b.s));
                } catch (const ConvergenceError&) {
                }
            }
        }
    }
    return out;
}

}  // namespace

double total_curvature(const QuadrangleSpec& q, double* error_estimate) {
    const SurfaceProfile& g = *q.profile;
    const double left = g.domain_start();
    const auto integrand = [&](double s) {
        const GeodesicSample p = q.gamma.at(s);
        return g.strip_density(left, p.x) * p.dy;
    };
    return integrate(integrand, 0.0, q.gamma.length(), 1e-12, feature_crossings(q.gamma), error_estimate);
}

double rectangle_curvature(const SurfaceProfile& g, double a, double b, double height) {
    const auto feats = g.features();
    const auto inner = [&](double) {
        return integrate([&](double x) { return -g.eval(x).ddg; }, a, b, 1e-13, feats);
    };
    const double smooth = integrate(inner, 0.0, height, 1e-13);
    return smooth - g.kink_sum(a, b) * height;
}

double total_curvature_closed_form(const QuadrangleSpec& q) {
    const SurfaceProfile& g = *q.profile;
    const double left_slope = g.eval(g.domain_start()).dg;
    const double height = q.gamma.samples.back().y - q.gamma.samples.front().y;
    const double y0 = q.gamma.samples.front().y;
    const auto f = [&](double y) {
        const GeodesicSample p = q.gamma.at(q.gamma.s_at_y(y0 + y));
        return left_slope - g.eval(p.x, p.dx >= 0 ? Side::Right : Side::Left).dg;
    };
    return integrate(f, 0.0, height, 1e-12);
}

CornerAngles corner_angles(const QuadrangleSpec& q) {
    const GeodesicSample a = q.gamma.samples.front();
    const GeodesicSample b = q.gamma.samples.back();
    // Horizontal edges leave the corners in the -x direction.
    return {std::acos(std::clamp(-a.dx, -1.0, 1.0)), std::acos(std::clamp(b.dx, -1.0, 1.0))};
}

namespace {

using Geo5 = DormandPrince<5>;

struct ApexShot {
    std::vector<Geo5::Step> steps;
    double s_end = 0.0;
    Geo5::State end{};
    bool hit_target = false;
    std::string stop_reason;
};

// Shoots from the apex (x_t, 0) along +y, accumulating half of the total
// curvature of the quadrangle whose corners sit at the current point.
ApexShot apex_shot(const SurfaceProfile& g, const MetricParams& p, double x_t, double target, double max_len) {
    const double left = g.domain_start();
    const double two_eps = 2.0 * p.epsilon;
    // Strip integral of K dA from the left edge to x, in closed form G'(left) - G'(x);
    // the verification route integrates K G over the strip numerically instead.
    const double left_slope = g.eval(left).dg;
    const Geo5::Rhs rhs = [&g, left_slope](double, const Geo5::State& y, Geo5::State& d) {
        const ProfileSample s = g.eval(y[0], y[2] >= 0 ? Side::Right : Side::Left);
        d[0] = y[2];
        d[1] = y[3];
        d[2] = s.g * s.dg * y[3] * y[3];
        d[3] = -2.0 * s.dg / s.g * y[2] * y[3];
        d[4] = (left_slope - s.dg) * y[3];
    };
    const double g0 = g.eval(x_t).g;
    Geo5::State y0{x_t, 0.0, 0.0, 1.0 / g0, 0.0};
    std::vector<Geo5::Event> events;
    events.push_back({[target](double, const Geo5::State& y) { return 2.0 * y[4] - target; }, true, {}});
    events.push_back({[two_eps](double, const Geo5::State& y) { return y[0] - two_eps; }, true, {}});
    events.push_back({[](double, const Geo5::State& y) { return y[2]; }, true, {}});
    for (double b : g.features()) events.push_back({[b](double, const Geo5::State& y) { return y[0] - b; }, false, {}});
    Geo5::Options o;
    o.rtol = 1e-12;
    o.atol = 1e-12;
    o.h_max = 0.05;
    const auto res = Geo5().integrate(rhs, 0.0, y0, max_len, events, o, true);
    ApexShot shot;
    shot.steps = res.steps;
    shot.s_end = res.t;
    shot.end = res.y;
    if (res.event == 0) {
        shot.hit_target = true;
        shot.stop_reason = "target reached";
    } else if (res.event == 1) {
        shot.stop_reason = "corner reached x = 2*epsilon (r must exceed 2*epsilon)";
    } else if (res.event == 2) {
        shot.stop_reason = "geodesic turned back before reaching the target";
    } else if (res.domain_exit) {
        shot.stop_reason = "geodesic left the profile domain";
    } else {
        shot.stop_reason = "maximum half-length reached without reaching the target";
    }
    return shot;
}

Geo5::State apex_state(const ApexShot& shot, double s) {
    if (shot.steps.empty()) return shot.end;
    auto it = std::upper_bound(shot.steps.begin(), shot.steps.end(), s,
                               [](double v, const Geo5::Step& st) { return v < st.t0; });
    const Geo5::Step& st = it == shot.steps.begin() ? shot.steps.front() : *(it - 1);
    return Geo5::dense(st, s);
}

// gamma from (r, 0) to (r, Delta) for the quadrangle whose apex half ends at s.
GeodesicPath gamma_for(const std::shared_ptr<const SurfaceProfile>& g, const Geo5::State& corner) {
    const double r = corner[0];
    const double Delta = 2.0 * corner[1];
    const double gr = g->eval(r).g;
    // Mirror of the apex tangent: (-x', y') at the bottom corner.
    const double hint = std::atan2(gr * corner[3], -corner[2]);
    return connect_geodesic(g, {r, 0.0}, {r, Delta}, hint);
}

std::string fmt(double v, int prec = 8) {
    std::ostringstream os;
    os.precision(prec);
    os << v;
    return os.str();
}

}  // namespace

GaussBonnetResult solve_gauss_bonnet(const MetricParams& params, const ProfileFactory& factory,
                                     const GaussBonnetOptions& opt) {
    GaussBonnetResult out;
    out.params = params;
    const double two_eps = 2.0 * params.epsilon;
    const double offset = opt.apex_offset >= 0 ? opt.apex_offset : 0.5 * params.mu1;
    const double x_t = two_eps + offset;
    const double sinh_nu = std::sinh(params.nu);

    for (double k2 : opt.k2_ladder) {
        GaussBonnetAttempt att;
        att.k2 = k2;
        std::shared_ptr<const SurfaceProfile> g;
        try {
            g = factory(k2);
        } catch (const Error& e) {
            att.reason = std::string("profile construction failed: ") + e.what();
            out.attempts.push_back(att);
            continue;
        }
        if (x_t >= g->domain_end()) {
            att.reason = "apex lies beyond the positivity domain of G";
            out.attempts.push_back(att);
            continue;
        }
        const ApexShot shot = apex_shot(*g, params, x_t, opt.target, opt.max_length);

        // Scan record along the shot: each point is the corner of an admissible quadrangle.
        const int nscan = 40;
        double min_gap = std::numeric_limits<double>::infinity();
        for (int i = 1; i <= nscan; ++i) {
            const double s = shot.s_end * i / nscan;
            const Geo5::State st = apex_state(shot, s);
            ScanSample sm;
            sm.Delta = 2.0 * st[1];
            sm.r = st[0];
            sm.total_ode = 2.0 * st[4];
            sm.total_quadrature = kNaN;
            sm.bound = sm.Delta * sinh_nu;
            min_gap = std::min(min_gap, sm.total_ode - sm.bound);
            att.scan.push_back(sm);
        }
        att.min_total_minus_bound = min_gap;

        if (!shot.hit_target) {
            att.reason = shot.stop_reason;
            // Independent quadrature confirmation on a subset of the scanned quadrangles.
            const int stride = std::max(1, nscan / static_cast<int>(opt.scan_samples));
            for (int i = stride - 1; i < nscan; i += stride) {
                const double s = shot.s_end * (i + 1) / nscan;
                const Geo5::State st = apex_state(shot, s);
                if (st[0] <= two_eps || st[1] <= 1e-6) continue;
                try {
                    QuadrangleSpec q{params, g, gamma_for(g, st)};
                    att.scan[static_cast<std::size_t>(i)].total_quadrature = total_curvature(q);
                } catch (const Error&) {
                }
            }
            out.attempts.push_back(att);
            continue;
        }

        // Candidate: verify with an independent boundary-value solve and quadrature.
        MetricParams p = params;
        p.k2 = k2;
        p.k1 = solve_k1(p.epsilon, p.delta, p.nu);
        p.x0 = solve_x0(p.epsilon, p.nu, k2, p.branch).x0;
        p.r = shot.end[0];
        p.Delta = 2.0 * shot.end[1];
        GeodesicPath gamma;
        try {
            gamma = gamma_for(g, shot.end);
        } catch (const ConvergenceError& e) {
            att.reason = std::string("boundary-value solve failed: ") + e.what();
            out.attempts.push_back(att);
            continue;
        }
        QuadrangleSpec q{p, g, gamma};
        const double total = total_curvature(q);
        const GeodesicSample end = gamma.samples.back();
        const double g_end = g->eval(end.x).g;
        const double endpoint_error = std::hypot(end.x - p.r, g_end * (end.y - p.Delta));
        double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
        for (const auto& sm : gamma.samples) {
            dmin = std::min(dmin, std::abs(sm.x - two_eps));
            dmax = std::max(dmax, std::abs(sm.x - two_eps));
        }
        // Dense check around the apex, where the closest approach sits.
        for (int i = 0; i <= 200; ++i) {
            const double d = std::abs(gamma.at(gamma.length() * i / 200.0).x - two_eps);
            dmin = std::min(dmin, d);
            dmax = std::max(dmax, d);
        }
        const bool total_ok = std::abs(total - opt.target) < opt.total_tol;
        const bool near_ok = dmin < params.mu1;
        if (!total_ok || !near_ok) {
            att.reason = !total_ok ? "verification quadrature off target: " + fmt(total)
                                   : "closest approach " + fmt(dmin) + " not below mu1";
            out.attempts.push_back(att);
            continue;
        }
        att.feasible = true;
        att.reason = "feasible";
        out.attempts.push_back(att);
        out.feasible = true;
        out.params = p;
        out.profile = g;
        out.apex_x = x_t;
        out.half_length = shot.s_end;
        out.total = total;
        out.total_closed_form = total_curvature_closed_form(q);
        out.endpoint_error = endpoint_error;
        out.angles = corner_angles(q);
        out.min_distance = dmin;
        out.max_distance = dmax;
        out.gamma = std::move(gamma);
        break;
    }

    std::ostringstream s;
    if (out.feasible) {
        s << "feasible at k2=" << out.params.k2 << ": Delta=" << fmt(out.params.Delta, 12)
          << " r=" << fmt(out.params.r, 12) << " total=" << fmt(out.total, 12)
          << " corner angles=(" << fmt(out.angles.bottom, 10) << ", " << fmt(out.angles.top, 10) << ")";
    } else {
        s << "infeasible over k2 ladder:";
        for (const auto& a : out.attempts)
            s << " [k2=" << a.k2 << ": " << a.reason << "; min(total - Delta*sinh(nu)) = "
              << fmt(a.min_total_minus_bound) << "]";
        s << "; total = -int G'(X(y)) dy >= Delta*sinh(nu) > 0 whenever G' <= -sinh(nu) right of 2*epsilon";
    }
    out.summary = s.str();
    return out;
}

}  // namespace torusric
