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

using Geo6 = DormandPrince<6>;

Vec2 rot(Vec2 v) { return {-v.b, v.a}; }

}  // namespace

FermiChart::FermiChart(const PolygonD& d, std::size_t edge, double tube_radius)
    : d_(&d), edge_(edge), tube_(tube_radius) {
    if (edge >= d.edges.size()) throw PreconditionError("fermi_chart: edge index out of range");
    if (!(tube_radius > 0)) throw PreconditionError("fermi_chart: tube radius must be positive");
    const SurfaceProfile& g = *d.profile;
    const double hi = std::min(g.domain_end(), d.r + 2.0);
    double lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 400; ++i) lo = std::min(lo, g.eval(-d.params.delta + (hi + d.params.delta) * i / 400.0).g);
    g_lower_ = 0.9 * lo;
}

NormalShot FermiChart::exp_normal(double psi, double rho) const {
    const PolygonD& d = *d_;
    const SurfaceProfile& g = *d.profile;
    const EdgeInfo& e = d.edges[edge_];
    const GeodesicSample foot = d.edge_point(edge_, psi);
    const double G0 = g.eval(foot.x).g;
    Vec2 t{foot.dx, G0 * foot.dy};
    const double tn = std::hypot(t.a, t.b);
    t = {t.a / tn, t.b / tn};
    const Vec2 rn = rot(t);
    const Vec2 n{e.inward_sign * rn.a, e.inward_sign * rn.b};
    if (rho == 0.0) return {{foot.x, foot.y}, n, 1.0, 0.0};

    // (x, y, x', y', h, h') along the normal geodesic; h solves the Jacobi equation.
    const Geo6::Rhs rhs = [&g](double, const Geo6::State& y, Geo6::State& dy) {
        const ProfileSample s = g.eval(y[0], y[2] >= 0 ? Side::Right : Side::Left);
        dy[0] = y[2];
        dy[1] = y[3];
        dy[2] = s.g * s.dg * y[3] * y[3];
        dy[3] = -2.0 * s.dg / s.g * y[2] * y[3];
        dy[4] = y[5];
        dy[5] = s.ddg / s.g * y[4];
    };
    std::vector<Geo6::Event> events;
    for (double b : g.features()) {
        const double jump = g.derivative_jump(b);
        Geo6::Event ev{[b](double, const Geo6::State& y) { return y[0] - b; }, false, {}};
        // The curvature has a line mass -jump/G at a kink of G'.
        const double dir = rho >= 0 ? 1.0 : -1.0;
        if (jump != 0.0)
            ev.apply = [&g, b, jump, dir](double, Geo6::State& y) {
                y[5] += dir * jump * y[4] / (g.eval(b).g * std::max(std::abs(y[2]), 1e-300));
            };
        events.push_back(ev);
    }
    Geo6::Options o;
    const int steps = g.substeps(foot.x, std::abs(rho), 16);
    o.fixed_step = std::abs(rho) / steps;
    const Geo6::State y0{foot.x, foot.y, n.a, n.b / G0, 1.0, 0.0};
    const auto res = Geo6().integrate(rhs, 0.0, y0, rho, events, o);
    if (res.domain_exit) throw DomainError("exp_normal: left the profile domain");
    const double G1 = g.eval(res.y[0]).g;
    return {{res.y[0], res.y[1]}, {res.y[2], G1 * res.y[3]}, res.y[4], res.y[5]};
}

std::optional<double> FermiChart::seed_psi(Point2 p) const {
    const PolygonD& d = *d_;
    const SurfaceProfile& g = *d.profile;
    const EdgeInfo& e = d.edges[edge_];
    if (e.kind == EdgeKind::Top || e.kind == EdgeKind::Bottom) {
        const double Y = e.kind == EdgeKind::Top ? d.H : 0.0;
        if (0.7 * g.eval(p.x).g * std::abs(p.y - Y) > tube_) return std::nullopt;
        return p.x + d.params.delta;
    }
    // Arc: nearest checkpoint within the y-band reachable from the tube, then Brent.
    const double yhat = p.y - e.apex_y;
    const double band = 2.0 * tube_ / g_lower_;
    const double Gp = g.eval(p.x).g;
    const auto approx = [&](double x, double y) { return std::hypot(p.x - x, Gp * (yhat - y)); };
    const auto& cps = d.arc.checkpoints();
    double best = std::numeric_limits<double>::infinity();
    double best_psi = 0.0;
    for (const auto& c : cps) {
        for (double sgn : {1.0, -1.0}) {
            const double cy = sgn * c.y;
            if (std::abs(cy - yhat) > band) continue;
            const double dist = approx(c.x, cy);
            if (dist < best) {
                best = dist;
                best_psi = sgn * c.s;
            }
        }
    }
    if (best > 2.0 * tube_) return std::nullopt;
    const double lim = d.arc.psi_max();
    const double a = std::max(-lim, best_psi - d.arc.spacing());
    const double b = std::min(lim, best_psi + d.arc.spacing());
    return minimize(
        [&](double s) {
            const GeodesicSample q = d.arc.at(s);
            return approx(q.x, q.y);
        },
        a, b);
}

std::optional<FermiCoords> FermiChart::try_locate(Point2 p) const {
    const PolygonD& d = *d_;
    const SurfaceProfile& g = *d.profile;
    const EdgeInfo& e = d.edges[edge_];
    if (e.kind == EdgeKind::Left) {
        const double rho = p.x + d.params.delta;
        if (rho > tube_ || rho < -1e-9) return std::nullopt;
        const ProfileSample s = g.eval(p.x);
        FermiCoords c;
        c.rho = rho;
        c.psi = p.y;
        c.h = s.g;
        c.h_rho = s.dg;
        c.e_rho = {1.0, 0.0};
        c.e_psi = {0.0, 1.0};
        c.piece = profile_piece(d.params, p.x);
        return c;
    }
    const auto seed = seed_psi(p);
    if (!seed) return std::nullopt;
    double psi = *seed;
    const double Gp = g.eval(p.x).g;
    double rho;
    {
        const GeodesicSample foot = d.edge_point(edge_, psi);
        const NormalShot s0 = exp_normal(psi, 0.0);
        rho = s0.T.a * (p.x - foot.x) + s0.T.b * Gp * (p.y - foot.y);
    }
    if (rho > 1.5 * tube_) return std::nullopt;

    NormalShot shot;
    double res_norm = std::numeric_limits<double>::infinity();
    int extra = 0;
    for (int it = 0; it < 60; ++it) {
        shot = exp_normal(psi, rho);
        const double rx = shot.p.x - p.x;
        const double ry = Gp * (shot.p.y - p.y);
        res_norm = std::hypot(rx, ry);
        // One step past the tolerance puts the result at rounding level, so nearby
        // queries see a smooth map.
        if (res_norm < 1e-13 && ++extra > 1) break;
        const Vec2 E = rot(shot.T);
        const double s_in = e.inward_sign;
        const Vec2 cpsi{-s_in * E.a * shot.h, -s_in * E.b * shot.h};
        const double det = cpsi.a * shot.T.b - cpsi.b * shot.T.a;
        if (std::abs(det) < 1e-14) throw ConvergenceError("fermi: singular normal map (focal point)");
        double dpsi = -(rx * shot.T.b - ry * shot.T.a) / det;
        double drho = -(cpsi.a * ry - cpsi.b * rx) / det;
        const double cap = std::max(tube_, 0.05);
        const double scale = std::max({1.0, std::abs(dpsi) / cap, std::abs(drho) / cap});
        psi += dpsi / scale;
        rho += drho / scale;
        if (rho > 3.0 * tube_) return std::nullopt;
    }
    if (res_norm >= 1e-12) throw ConvergenceError("fermi: foot not resolved, residual " + std::to_string(res_norm));
    if (rho > tube_ || rho < -1e-9) return std::nullopt;

    FermiCoords c;
    c.rho = rho;
    c.psi = psi;
    c.h = shot.h;
    c.h_rho = shot.h_rho;
    c.e_rho = shot.T;
    const Vec2 E = rot(shot.T);
    c.e_psi = {-e.inward_sign * E.a, -e.inward_sign * E.b};
    c.piece = profile_piece(d.params, p.x);
    return c;
}

FermiCoords FermiChart::locate(Point2 p) const {
    const auto c = try_locate(p);
    if (!c) throw DomainError("fermi: point outside the tube of edge " + std::to_string(d_->edges[edge_].label));
    return *c;
}

FermiChart fermi_chart(const PolygonD& d, std::size_t edge, double tube_radius) {
    return FermiChart(d, edge, tube_radius);
}

double default_tube_radius(const PolygonD& d, double mu_i) {
    const double k_min = std::min(d.params.k1 > 0 ? d.params.k1 : d.params.k2, d.params.k2);
    return std::min(1.05 * 0.5 * kPi * mu_i, 0.9 * 0.5 * kPi * k_min);
}

}  // namespace torusric
