#include "torusric/errors.hpp"
#include "torusric/numerics.hpp"
#include "torusric/quadrangle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace torusric {

namespace {

Geo4::Rhs geodesic_rhs(const SurfaceProfile& g) {
    return [&g](double, const Geo4::State& y, Geo4::State& d) {
        const ProfileSample s = g.eval(y[0], y[2] >= 0 ? Side::Right : Side::Left);
        d[0] = y[2];
        d[1] = y[3];
        d[2] = s.g * s.dg * y[3] * y[3];
        d[3] = -2.0 * s.dg / s.g * y[2] * y[3];
    };
}

double on_dot(const SurfaceProfile& g, const GeodesicSample& p, double ax, double ay, double bx, double by) {
    const double G = g.eval(p.x).g;
    return ax * bx + G * G * ay * by;
}

double angle_between(const SurfaceProfile& g, const GeodesicSample& at, double ax, double ay, double bx, double by) {
    const double na = std::sqrt(on_dot(g, at, ax, ay, ax, ay));
    const double nb = std::sqrt(on_dot(g, at, bx, by, bx, by));
    return std::acos(std::clamp(on_dot(g, at, ax, ay, bx, by) / (na * nb), -1.0, 1.0));
}

}  // namespace

// Fixed-step integration keeps psi -> point a smooth map (no adaptive step
// pattern changes), which the finite-difference checks rely on.
GeodesicSample ApexGeodesic::advance(const GeodesicSample& from, double ds) const {
    if (ds <= 0.0) return from;
    const int n = g_->substeps(from.x, spacing_, 4);
    Geo4::State y0{from.x, from.y, from.dx, from.dy};
    std::vector<Geo4::Event> events;
    for (double b : g_->features()) events.push_back({[b](double, const Geo4::State& y) { return y[0] - b; }, false, {}});
    Geo4::Options o;
    o.fixed_step = ds / n;
    const auto res = Geo4().integrate(geodesic_rhs(*g_), from.s, y0, from.s + ds, events, o);
    if (res.domain_exit) throw DomainError("ApexGeodesic: left the profile domain");
    return {from.s + ds, res.y[0], res.y[1], res.y[2], res.y[3]};
}

ApexGeodesic::ApexGeodesic(std::shared_ptr<const SurfaceProfile> g, double apex_x, double psi_max)
    : g_(std::move(g)), psi_max_(psi_max) {
    if (!(psi_max > 0)) throw PreconditionError("ApexGeodesic: psi_max must be positive");
    const double G0 = g_->eval(apex_x).g;
    cps_.push_back({0.0, apex_x, 0.0, 0.0, 1.0 / G0});
    const auto cells = static_cast<std::size_t>(std::ceil(psi_max / spacing_));
    for (std::size_t k = 1; k <= cells; ++k) cps_.push_back(advance(cps_.back(), spacing_));
}

GeodesicSample ApexGeodesic::at(double psi) const {
    const double a = std::abs(psi);
    if (a > psi_max_ + 1e-12) throw DomainError("ApexGeodesic: |psi| beyond psi_max");
    const std::size_t k = std::min(static_cast<std::size_t>(a / spacing_), cps_.size() - 2);
    GeodesicSample q = advance(cps_[k], a - cps_[k].s);
    q.s = a;
    if (psi < 0) {
        q.s = psi;
        q.y = -q.y;
        q.dx = -q.dx;
    }
    return q;
}

double ApexGeodesic::psi_at_y(double yhat) const {
    if (yhat <= 0.0) return 0.0;
    std::size_t k = 0;
    while (k + 1 < cps_.size() && cps_[k + 1].y < yhat) ++k;
    if (k + 1 >= cps_.size()) throw DomainError("ApexGeodesic: y beyond the computed arc");
    return bracket_root([&](double s) { return at(s).y - yhat; }, cps_[k].s, cps_[k + 1].s);
}

GeodesicSample PolygonD::edge_point(std::size_t i, double psi) const {
    const EdgeInfo& e = edges.at(i);
    switch (e.kind) {
        case EdgeKind::Left: {
            const double G = profile->eval(-params.delta).g;
            return {psi, -params.delta, psi, 0.0, 1.0 / G};
        }
        case EdgeKind::Top:
            return {psi, psi - params.delta, H, 1.0, 0.0};
        case EdgeKind::Bottom:
            return {psi, psi - params.delta, 0.0, 1.0, 0.0};
        case EdgeKind::Arc: {
            GeodesicSample q = arc.at(psi);
            q.y += e.apex_y;
            return q;
        }
    }
    return {};
}

double PolygonD::right_boundary(double y) const {
    if (y < -1e-12 || y > H + 1e-12) throw DomainError("right_boundary: y outside [0, H]");
    const double yhat = std::abs(y - Delta * std::round(y / Delta));
    return arc.at(arc.psi_at_y(yhat)).x;
}

bool PolygonD::contains(Point2 p, double margin) const {
    if (p.y < margin || p.y > H - margin) return false;
    if (p.x < -params.delta + margin) return false;
    return p.x <= right_boundary(p.y) - margin;
}

PolygonD assemble_polygon(const GaussBonnetResult& gb, std::size_t m) {
    if (m < 5) throw PreconditionError("assemble_polygon: m < 5 has no polygon; use small_case for m <= 4");
    if (!gb.feasible) throw PreconditionError("assemble_polygon: Gauss-Bonnet not solved");
    PolygonD d;
    d.params = gb.params;
    d.profile = gb.profile;
    d.m = m;
    d.Delta = gb.params.Delta;
    d.H = static_cast<double>(m - 4) * d.Delta;
    d.r = gb.params.r;
    d.apex_x = gb.apex_x;
    d.half_length = gb.half_length;
    // Past the joints the arc is only used by Fermi charts near vertices.
    d.arc = ApexGeodesic(gb.profile, gb.apex_x, gb.half_length + 1.0);

    const double L = d.half_length;
    const double psi_top = d.apex_x + d.params.delta;
    d.edges.push_back({1, EdgeKind::Left, 0.0, d.H, 0.0, 1});
    d.edges.push_back({2, EdgeKind::Top, 0.0, psi_top, d.H, -1});
    d.edges.push_back({3, EdgeKind::Arc, -L, 0.0, d.H, 1});
    for (std::size_t k = 1; k + 4 < m; ++k)
        d.edges.push_back({3 + k, EdgeKind::Arc, -L, L, d.H - static_cast<double>(k) * d.Delta, 1});
    d.edges.push_back({m - 1, EdgeKind::Arc, 0.0, L, 0.0, 1});
    d.edges.push_back({m, EdgeKind::Bottom, 0.0, psi_top, 0.0, 1});

    const SurfaceProfile& g = *d.profile;
    // F_j sits between Gamma_j and Gamma_{j+1}: angle between the directions leaving
    // the vertex along each edge.
    for (std::size_t j = 1; j <= m; ++j) {
        const EdgeInfo& a = d.edges[j - 1];
        const EdgeInfo& b = d.edges[j % m];
        // Clockwise traversal: Gamma_j ends at F_j, Gamma_{j+1} starts there.
        const auto end_param = [&](const EdgeInfo& e, bool start) {
            switch (e.kind) {
                case EdgeKind::Left: return start ? e.psi_min : e.psi_max;  // traversed upward
                case EdgeKind::Top: return start ? e.psi_min : e.psi_max;
                case EdgeKind::Bottom: return start ? e.psi_max : e.psi_min;
                case EdgeKind::Arc: return start ? e.psi_max : e.psi_min;  // traversed downward
            }
            return 0.0;
        };
        const auto forward = [&](const EdgeInfo& e) {
            return e.kind == EdgeKind::Left || e.kind == EdgeKind::Top ? 1.0 : -1.0;
        };
        const GeodesicSample pa = d.edge_point(j - 1, end_param(a, false));
        const GeodesicSample pb = d.edge_point(j % m, end_param(b, true));
        // Leaving along Gamma_j backwards, and along Gamma_{j+1} forwards.
        const double sa = -forward(a), sb = forward(b);
        VertexInfo v;
        v.label = j;
        v.p = {pb.x, pb.y};
        v.angle = angle_between(g, pb, sa * pa.dx, sa * pa.dy, sb * pb.dx, sb * pb.dy);
        d.vertices.push_back(v);
    }
    return d;
}

std::string polygon_csv(const PolygonD& d, std::size_t samples_per_edge) {
    std::ostringstream os;
    os.precision(12);
    os << "kind,index,param,x,y,angle\n";
    for (std::size_t i = 0; i < d.edges.size(); ++i) {
        const EdgeInfo& e = d.edges[i];
        for (std::size_t k = 0; k <= samples_per_edge; ++k) {
            const double psi = e.psi_min + (e.psi_max - e.psi_min) * static_cast<double>(k) /
                                               static_cast<double>(samples_per_edge);
            const GeodesicSample q = d.edge_point(i, psi);
            os << "edge," << e.label << ',' << psi << ',' << q.x << ',' << q.y << ",\n";
        }
    }
    for (const auto& v : d.vertices)
        os << "vertex," << v.label << ",," << v.p.x << ',' << v.p.y << ',' << v.angle << '\n';
    return os.str();
}

}  // namespace torusric
