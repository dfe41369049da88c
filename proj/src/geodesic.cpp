#include "torusric/errors.hpp"
#include "torusric/numerics.hpp"
#include "torusric/quadrangle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace torusric {

namespace {

constexpr double kPi = std::numbers::pi;

Geo4::Rhs geodesic_rhs(const SurfaceProfile& g) {
    return [&g](double, const Geo4::State& y, Geo4::State& d) {
        const ProfileSample s = g.eval(y[0], y[2] >= 0 ? Side::Right : Side::Left);
        d[0] = y[2];
        d[1] = y[3];
        d[2] = s.g * s.dg * y[3] * y[3];
        d[3] = -2.0 * s.dg / s.g * y[2] * y[3];
    };
}

GeodesicSample sample_of(double s, const Geo4::State& y) { return {s, y[0], y[1], y[2], y[3]}; }

}  // namespace

int profile_piece(const MetricParams& p, double x) {
    if (x < p.epsilon) return 0;
    if (x < 2.0 * p.epsilon) return 1;
    return 2;
}

GeodesicSample GeodesicPath::at(double s) const {
    if (steps.empty()) return samples.empty() ? GeodesicSample{} : samples.front();
    s = std::clamp(s, 0.0, length());
    auto it = std::upper_bound(steps.begin(), steps.end(), s, [](double v, const Geo4::Step& st) { return v < st.t0; });
    const Geo4::Step& st = (it == steps.begin()) ? steps.front() : *(it - 1);
    return sample_of(s, Geo4::dense(st, s));
}

double GeodesicPath::tangent_angle(const GeodesicSample& q) const {
    return std::atan2(profile->eval(q.x).g * q.dy, q.dx);
}

double GeodesicPath::s_at_y(double y) const {
    if (samples.empty()) throw PreconditionError("GeodesicPath: empty path");
    const bool up = samples.back().y >= samples.front().y;
    std::size_t k = 0;
    while (k + 1 < samples.size() && (up ? samples[k + 1].y < y : samples[k + 1].y > y)) ++k;
    if (k + 1 >= samples.size()) return length();
    const double lo = samples[k].s, hi = samples[k + 1].s;
    const auto f = [&](double s) { return at(s).y - y; };
    if (f(lo) == 0.0) return lo;
    if ((f(lo) > 0) == (f(hi) > 0)) return std::abs(f(lo)) < std::abs(f(hi)) ? lo : hi;
    return bracket_root(f, lo, hi);
}

double GeodesicPath::max_speed_error() const {
    double e = 0.0;
    for (const auto& q : samples) {
        const double g = profile->eval(q.x).g;
        e = std::max(e, std::abs(std::sqrt(q.dx * q.dx + g * g * q.dy * q.dy) - 1.0));
    }
    return e;
}

double GeodesicPath::max_clairaut_drift() const {
    double e = 0.0;
    for (const auto& q : samples) {
        const double g = profile->eval(q.x).g;
        e = std::max(e, std::abs(g * g * q.dy - clairaut));
    }
    return e;
}

GeodesicPath GeodesicPath::reversed() const {
    const GeodesicSample end = samples.back();
    const double g = profile->eval(end.x).g;
    const double angle = std::atan2(-g * end.dy, -end.dx);
    return shoot_geodesic(profile, {end.x, end.y}, angle, length());
}

GeodesicPath shoot_geodesic(std::shared_ptr<const SurfaceProfile> g, Point2 start, double angle, double length,
                            const GeodesicOptions& opt) {
    const ProfileSample s0 = g->eval(start.x);
    Geo4::State y0{start.x, start.y, std::cos(angle), std::sin(angle) / s0.g};
    std::vector<Geo4::Event> events;
    for (double b : g->features()) events.push_back({[b](double, const Geo4::State& y) { return y[0] - b; }, false, {}});
    const double left = g->domain_start();
    events.push_back({[left](double, const Geo4::State& y) { return y[0] - left; }, true, {}});

    Geo4::Options o;
    o.rtol = opt.rtol;
    o.atol = opt.atol;
    o.h_max = opt.h_max;
    const auto res = Geo4().integrate(geodesic_rhs(*g), 0.0, y0, length, events, o, true);

    GeodesicPath path;
    path.profile = g;
    path.clairaut = s0.g * s0.g * y0[3];
    path.steps = res.steps;
    path.samples.push_back(sample_of(0.0, y0));
    for (const auto& st : res.steps) path.samples.push_back(sample_of(st.t0 + st.h, Geo4::dense(st, st.t0 + st.h)));
    if (!res.steps.empty()) path.samples.back() = sample_of(res.t, res.y);
    if (res.domain_exit) {
        path.truncated = true;
        path.flag = "domain exit";
    } else if (res.event == static_cast<int>(events.size()) - 1) {
        path.truncated = true;
        path.flag = "crossed x = -delta";
    } else if (!res.completed) {
        path.truncated = true;
        path.flag = "step limit";
    }
    return path;
}

namespace {

// Shoots from p at `angle` until y reaches q.y; returns x-residual (NaN if never reached).
struct YShot {
    double residual = std::numeric_limits<double>::quiet_NaN();
    GeodesicPath path;
};

YShot shoot_to_level(const std::shared_ptr<const SurfaceProfile>& g, Point2 p, double angle, double y_target,
                     double x_target, double max_len, const GeodesicOptions& opt) {
    const ProfileSample s0 = g->eval(p.x);
    Geo4::State y0{p.x, p.y, std::cos(angle), std::sin(angle) / s0.g};
    std::vector<Geo4::Event> events;
    events.push_back({[y_target](double, const Geo4::State& y) { return y[1] - y_target; }, true, {}});
    for (double b : g->features()) events.push_back({[b](double, const Geo4::State& y) { return y[0] - b; }, false, {}});
    const double left = g->domain_start();
    events.push_back({[left](double, const Geo4::State& y) { return y[0] - left; }, true, {}});
    Geo4::Options o;
    o.rtol = opt.rtol;
    o.atol = opt.atol;
    o.h_max = opt.h_max;
    const auto res = Geo4().integrate(geodesic_rhs(*g), 0.0, y0, max_len, events, o, true);
    YShot shot;
    shot.path.profile = g;
    shot.path.clairaut = s0.g * s0.g * y0[3];
    shot.path.steps = res.steps;
    shot.path.samples.push_back(sample_of(0.0, y0));
    for (const auto& st : res.steps)
        shot.path.samples.push_back(sample_of(st.t0 + st.h, Geo4::dense(st, st.t0 + st.h)));
    if (!res.steps.empty()) shot.path.samples.back() = sample_of(res.t, res.y);
    if (res.event == 0) {
        shot.residual = res.y[0] - x_target;
        // Snap the end onto the target level (event bracket is at rounding level).
        shot.path.samples.back().y = y_target;
    }
    return shot;
}

}  // namespace

GeodesicPath connect_geodesic(std::shared_ptr<const SurfaceProfile> g, Point2 p, Point2 q,
                              std::optional<double> angle_hint, const GeodesicOptions& opt) {
    if (std::abs(q.y - p.y) < 1e-14) {
        // Horizontal: the x-line through p is a geodesic.
        const double angle = q.x >= p.x ? 0.0 : kPi;
        return shoot_geodesic(g, p, angle, std::abs(q.x - p.x), opt);
    }
    const double dir = q.y > p.y ? 1.0 : -1.0;
    const double gp = g->eval(p.x).g;
    const double gq = g->eval(q.x).g;
    const double span = std::abs(q.x - p.x) + std::max(gp, gq) * std::abs(q.y - p.y);
    const double max_len = 20.0 * span + 10.0;
    const double lo = dir > 0 ? 1e-9 : -kPi + 1e-9;
    const double hi = dir > 0 ? kPi - 1e-9 : -1e-9;

    double a0 = angle_hint ? *angle_hint : std::atan2(gp * (q.y - p.y), q.x - p.x);
    a0 = std::clamp(a0, lo, hi);
    int evals = 0;
    double best_res = std::numeric_limits<double>::infinity();
    YShot best;
    const auto eval = [&](double a) {
        ++evals;
        YShot s = shoot_to_level(g, p, a, q.y, q.x, max_len, opt);
        if (std::isfinite(s.residual) && std::abs(s.residual) < best_res) {
            best_res = std::abs(s.residual);
            best = s;
        }
        return s.residual;
    };
    const double tol = 1e-11;

    // Secant from the hint.
    double a_prev = a0, r_prev = eval(a0);
    double a_cur = std::clamp(a0 + 1e-5 * (a0 < 0.5 * (lo + hi) ? 1.0 : -1.0), lo, hi);
    double r_cur = eval(a_cur);
    for (int it = 0; it < 60 && std::isfinite(r_prev) && std::isfinite(r_cur); ++it) {
        if (std::abs(r_cur) < tol) break;
        if (r_cur == r_prev) break;
        double a_next = a_cur - r_cur * (a_cur - a_prev) / (r_cur - r_prev);
        // Limit the step to keep the iteration near the seeded branch.
        const double step_cap = 0.2;
        a_next = a_cur + std::clamp(a_next - a_cur, -step_cap, step_cap);
        a_next = std::clamp(a_next, lo, hi);
        a_prev = a_cur;
        r_prev = r_cur;
        a_cur = a_next;
        r_cur = eval(a_cur);
    }
    if (best_res < tol) return best.path;

    // Fallback: scan for a bracket nearest the seed, then TOMS 748.
    const int n = 64;
    std::vector<double> as(n + 1), rs(n + 1);
    for (int i = 0; i <= n && evals < 200; ++i) {
        as[i] = lo + (hi - lo) * i / n;
        rs[i] = eval(as[i]);
    }
    int pick = -1;
    double pick_dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(rs[i]) || !std::isfinite(rs[i + 1])) continue;
        if ((rs[i] > 0) == (rs[i + 1] > 0)) continue;
        const double d = std::abs(0.5 * (as[i] + as[i + 1]) - a0);
        if (d < pick_dist) {
            pick_dist = d;
            pick = i;
        }
    }
    if (pick >= 0 && evals < 200) {
        try {
            const double root = bracket_root([&](double a) { return eval(a); }, as[pick], as[pick + 1], 200 - evals);
            eval(root);
        } catch (const ConvergenceError&) {
        }
    }
    if (best_res < tol) return best.path;
    throw ConvergenceError("connect_geodesic: no convergence after " + std::to_string(evals) +
                           " shots, best residual " + std::to_string(best_res));
}

}  // namespace torusric
