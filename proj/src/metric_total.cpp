#include "torusric/metric_total.hpp"

#include "torusric/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace torusric {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kZero = 1e-10;

}  // namespace

RadialValue radial_profile(double mu, double rho) {
    if (rho >= 0.5 * kPi * mu) return {mu, 0.0, 0.0};
    const double u = rho / mu;
    return {mu * std::sin(u), std::cos(u), -std::sin(u) / mu};
}

FiberProfile::FiberProfile(std::shared_ptr<const PolygonD> d, std::size_t index, double scale, double tube,
                           RadialOverride radial)
    : d_(std::move(d)), index_(index), mu_(scale), chart_(*d_, index - 1, tube), radial_(std::move(radial)) {
    if (index == 0 || index > d_->edges.size()) throw PreconditionError("FiberProfile: index out of range");
    if (!(scale > 0)) throw PreconditionError("FiberProfile: scale must be positive");
    if (tube < breakpoint() + radial_.plateau_shift)
        throw PreconditionError("FiberProfile: tube radius below the end of the sine branch");
}

double FiberProfile::breakpoint() const { return 0.5 * kPi * mu_; }

FiberEval FiberProfile::eval(Point2 p, double break_margin) const {
    FiberEval out;
    out.f = mu_;
    const auto c = chart_.try_locate(p);
    if (!c) return out;
    out.fermi = c;
    const double plateau_from = breakpoint() + radial_.plateau_shift;
    out.near_break = std::abs(c->rho - breakpoint()) < break_margin;
    if (c->rho >= plateau_from) return out;
    const RadialValue r = radial_.fn ? radial_.fn(mu_, c->rho) : radial_profile(mu_, c->rho);
    out.f = r.f;
    out.plateau = false;
    // grad f = F' e_rho; Hess f = F'' e_rho (x) e_rho + F' (h'/h) e_psi (x) e_psi.
    const Vec2 er = c->e_rho, ep = c->e_psi;
    const double k = r.df * c->h_rho / c->h;
    out.grad = {r.df * er.a, r.df * er.b};
    out.h_aa = r.ddf * er.a * er.a + k * ep.a * ep.a;
    out.h_ab = r.ddf * er.a * er.b + k * ep.a * ep.b;
    out.h_bb = r.ddf * er.b * er.b + k * ep.b * ep.b;
    const ProfileSample g = d_->profile->eval(p.x);
    out.fx = out.grad.a;
    out.fy = g.g * out.grad.b;
    out.fxx = out.h_aa;
    out.fxy = g.g * out.h_ab + g.dg / g.g * out.fy;
    out.fyy = g.g * g.g * out.h_bb - g.g * g.dg * out.fx;
    return out;
}

TotalMetric::TotalMetric(std::shared_ptr<const PolygonD> d, const RadialOverride& radial) : d_(std::move(d)) {
    const MetricParams& p = d_->params;
    for (std::size_t i = 1; i <= d_->m; ++i) {
        const double mu = i == 1 ? 4.0 * p.epsilon : p.mu;
        const double tube = i == 1 ? 1.05 * (0.5 * kPi * mu + radial.plateau_shift)
                                   : std::max(default_tube_radius(*d_, mu), 1.01 * (0.5 * kPi * mu + radial.plateau_shift));
        fibers_.emplace_back(d_, i, mu, tube, radial);
    }
}

std::vector<FiberEval> TotalMetric::eval_all(Point2 p, double break_margin) const {
    std::vector<FiberEval> out;
    out.reserve(fibers_.size());
    for (const auto& f : fibers_) out.push_back(f.eval(p, break_margin));
    return out;
}

FiberEval eval_f(const FiberProfile& fp, Point2 p) { return fp.eval(p); }

MetricCoefficients metric_at(const TotalMetric& tm, Point2 p) {
    MetricCoefficients c;
    const double G = tm.base().eval(p.x).g;
    c.diag = {1.0, G * G};
    for (const auto& f : tm.eval_all(p)) c.diag.push_back(f.f * f.f);
    return c;
}

MetricCoefficients metric_at_fermi(const TotalMetric& tm, std::size_t k, Point2 p) {
    const FermiCoords fc = tm.fiber(k).chart().locate(p);
    MetricCoefficients c;
    c.diag = {1.0, fc.h * fc.h};
    for (const auto& f : tm.eval_all(p)) c.diag.push_back(f.f * f.f);
    return c;
}

Coframe coframe_at(const TotalMetric& tm, Point2 p) {
    Coframe c;
    c.scales = {1.0, tm.base().eval(p.x).g};
    for (const auto& f : tm.eval_all(p)) c.scales.push_back(f.f);
    return c;
}

DescentReport descent_check(const TotalMetric& tm, std::size_t samples_per_edge) {
    const PolygonD& d = tm.polygon();
    DescentReport rep;
    const auto kernel_of = [&](Point2 p) {
        std::vector<std::size_t> k;
        const auto c = metric_at(tm, p);
        for (std::size_t i = 2; i < c.diag.size(); ++i)
            if (c.diag[i] < kZero * kZero) k.push_back(i - 1);
        if (c.diag[0] <= 0 || c.diag[1] <= 0) k.push_back(0);
        return k;
    };
    const auto record = [&](std::string where, Point2 p, std::vector<std::size_t> expected) {
        DescentSample s;
        s.where = std::move(where);
        s.p = p;
        s.expected_kernel = std::move(expected);
        s.kernel = kernel_of(p);
        s.ok = s.kernel == s.expected_kernel;
        if (!s.ok) ++rep.failures;
        rep.samples.push_back(std::move(s));
    };
    for (std::size_t i = 0; i < d.edges.size(); ++i) {
        const EdgeInfo& e = d.edges[i];
        for (std::size_t k = 1; k <= samples_per_edge; ++k) {
            const double t = static_cast<double>(k) / static_cast<double>(samples_per_edge + 1);
            const GeodesicSample q = d.edge_point(i, e.psi_min + t * (e.psi_max - e.psi_min));
            record("edge " + std::to_string(e.label), {q.x, q.y}, {e.label});
        }
    }
    for (const auto& v : d.vertices) {
        std::vector<std::size_t> exp{v.label, v.label % d.m + 1};
        std::sort(exp.begin(), exp.end());
        record("vertex " + std::to_string(v.label), v.p, exp);
    }
    // Interior: a few rows across the polygon, away from the boundary.
    for (std::size_t j = 1; j <= samples_per_edge; ++j) {
        const double y = d.H * static_cast<double>(j) / static_cast<double>(samples_per_edge + 1);
        const double xr = d.right_boundary(y);
        for (double t : {0.25, 0.5, 0.75}) {
            const Point2 p{-d.params.delta + t * (xr + d.params.delta), y};
            if (d.contains(p, 1e-3)) record("interior", p, {});
        }
    }
    rep.pass = rep.failures == 0;
    return rep;
}

}  // namespace torusric
