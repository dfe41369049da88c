#include "torusric/curvature.hpp"

#include "torusric/errors.hpp"
#include "torusric/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace torusric {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

CurvatureComponents empty_components(std::size_t m) {
    CurvatureComponents c;
    c.m = m;
    c.R_m1i.assign(m, 0.0);
    c.R_0i.assign(m, 0.0);
    c.R_m1i0i.assign(m, 0.0);
    c.R_ij.assign(m, std::vector<double>(m, 0.0));
    return c;
}

double dot(Vec2 a, Vec2 b) { return a.a * b.a + a.b * b.b; }

// Hessian of f_l applied to (u, v), orthonormal base components.
double hess(const FiberEval& f, Vec2 u, Vec2 v) {
    return f.h_aa * u.a * v.a + f.h_ab * (u.a * v.b + u.b * v.a) + f.h_bb * u.b * v.b;
}

void check_nondegenerate(const PointGeometry& pg) {
    for (std::size_t i = 0; i < pg.f.size(); ++i)
        if (!(pg.f[i].f > 0))
            throw DomainError("curvature: f_" + std::to_string(i + 1) + " vanishes (boundary point)");
}

}  // namespace

PointGeometry point_geometry(const TotalMetric& tm, Point2 p, double break_margin) {
    PointGeometry pg;
    pg.p = p;
    pg.g = tm.base().eval(p.x);
    pg.K = -pg.g.ddg / pg.g.g;
    pg.f = tm.eval_all(p, break_margin);
    return pg;
}

CurvatureComponents components_base(const PointGeometry& pg) {
    check_nondegenerate(pg);
    const std::size_t m = pg.f.size();
    CurvatureComponents c = empty_components(m);
    const double G = pg.g.g, Gx = pg.g.dg;
    c.R_m10m10 = -pg.g.ddg / G;
    for (std::size_t i = 0; i < m; ++i) {
        const FiberEval& f = pg.f[i];
        c.R_m1i[i] = -f.fxx / f.f;
        c.R_0i[i] = -f.fyy / (f.f * G * G) - f.fx / f.f * Gx / G;
        c.R_m1i0i[i] = -f.fxy / (f.f * G) + f.fy / f.f * Gx / (G * G);
    }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (i != j)
                c.R_ij[i][j] = -pg.f[i].fx / pg.f[i].f * pg.f[j].fx / pg.f[j].f -
                               pg.f[i].fy / pg.f[i].f * pg.f[j].fy / pg.f[j].f / (G * G);
    return c;
}

CurvatureComponents components_base(const TotalMetric& tm, Point2 p) { return components_base(point_geometry(tm, p)); }

CurvatureComponents components_fermi(const TotalMetric& tm, std::size_t k, Point2 p) {
    const PointGeometry pg = point_geometry(tm, p);
    check_nondegenerate(pg);
    const auto& fk = pg.f.at(k);
    if (!fk.fermi) throw DomainError("components_fermi: point outside the tube of edge " + std::to_string(k + 1));
    const FermiCoords& fc = *fk.fermi;
    const std::size_t m = pg.f.size();
    CurvatureComponents c = empty_components(m);
    const Vec2 er = fc.e_rho, ep = fc.e_psi;
    // -h''/h equals the Gaussian curvature along the normal geodesic.
    c.R_m10m10 = pg.K;
    for (std::size_t i = 0; i < m; ++i) {
        const FiberEval& f = pg.f[i];
        if (f.plateau) continue;
        if (i == k) {
            // f_k depends on rho_k alone.
            const double dfr = dot(f.grad, er);
            const double dfrr = hess(f, er, er);
            c.R_m1i[i] = -dfrr / f.f;
            c.R_0i[i] = -dfr / f.f * fc.h_rho / fc.h;
            c.R_m1i0i[i] = 0.0;
        } else {
            c.R_m1i[i] = -hess(f, er, er) / f.f;
            c.R_0i[i] = -hess(f, ep, ep) / f.f;
            c.R_m1i0i[i] = -hess(f, er, ep) / f.f;
        }
    }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (i != j) c.R_ij[i][j] = -dot(pg.f[i].grad, pg.f[j].grad) / (pg.f[i].f * pg.f[j].f);
    return c;
}

CurvatureComponents rotate_components(const CurvatureComponents& c, Vec2 e1, Vec2 e2) {
    CurvatureComponents r = c;
    // Mixed base-fiber block is a symmetric form Q_i(u, v) = R(u, e_i, v, e_i).
    for (std::size_t i = 0; i < c.m; ++i) {
        const auto q = [&](Vec2 u, Vec2 v) {
            return c.R_m1i[i] * u.a * v.a + c.R_m1i0i[i] * (u.a * v.b + u.b * v.a) + c.R_0i[i] * u.b * v.b;
        };
        r.R_m1i[i] = q(e1, e1);
        r.R_0i[i] = q(e2, e2);
        r.R_m1i0i[i] = q(e1, e2);
    }
    return r;
}

double max_difference(const CurvatureComponents& a, const CurvatureComponents& b) {
    double d = std::abs(a.R_m10m10 - b.R_m10m10);
    for (std::size_t i = 0; i < a.m; ++i) {
        d = std::max({d, std::abs(a.R_m1i[i] - b.R_m1i[i]), std::abs(a.R_0i[i] - b.R_0i[i]),
                      std::abs(a.R_m1i0i[i] - b.R_m1i0i[i])});
        for (std::size_t j = 0; j < a.m; ++j) d = std::max(d, std::abs(a.R_ij[i][j] - b.R_ij[i][j]));
    }
    return d;
}

HorizontalFrame horizontal_frame(const std::vector<double>& f, const KernelLattice& kernel) {
    const std::size_t m = f.size();
    for (double v : f)
        if (!(v > 0)) throw DomainError("horizontal_frame: degenerate point (some f_l = 0)");
    // In the orthonormal fiber frame e_l = (1/f_l) d/dphi_l the kernel direction
    // sum k_l d/dphi_l has components k_l f_l.
    std::vector<std::vector<double>> basis;
    const auto orth = [&](std::vector<double> v) {
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : basis) {
                double s = 0.0;
                for (std::size_t l = 0; l < m; ++l) s += v[l] * q[l];
                for (std::size_t l = 0; l < m; ++l) v[l] -= s * q[l];
            }
        return v;
    };
    const auto norm = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x * x;
        return std::sqrt(s);
    };
    std::vector<std::vector<double>> kvecs;
    for (const auto& k : kernel.integer_kernel_basis) {
        if (k.size() != m) throw PreconditionError("horizontal_frame: kernel vector length differs from m");
        std::vector<double> v(m);
        for (std::size_t l = 0; l < m; ++l) v[l] = static_cast<double>(k[l]) * f[l];
        kvecs.push_back(v);
        v = orth(v);
        const double nv = norm(v);
        if (nv < 1e-12) throw PreconditionError("horizontal_frame: dependent kernel vectors");
        for (double& x : v) x /= nv;
        basis.push_back(v);
    }
    HorizontalFrame h;
    h.n = m - kernel.rank();
    for (std::size_t s = 0; s < m && h.c.size() < h.n; ++s) {
        std::vector<double> v(m, 0.0);
        v[s] = 1.0;
        v = orth(v);
        const double nv = norm(v);
        if (nv < 1e-8) continue;
        for (double& x : v) x /= nv;
        basis.push_back(v);
        h.c.push_back(v);
    }
    h.weight.assign(m, 0.0);
    h.c_min = kInf;
    for (const auto& c : h.c)
        for (std::size_t l = 0; l < m; ++l) {
            h.weight[l] += c[l] * c[l];
            if (std::abs(c[l]) > 1e-12) h.c_min = std::min(h.c_min, std::abs(c[l]));
        }
    for (std::size_t i = 0; i < h.c.size(); ++i) {
        for (std::size_t j = 0; j < h.c.size(); ++j) {
            double s = 0.0;
            for (std::size_t l = 0; l < m; ++l) s += h.c[i][l] * h.c[j][l];
            h.orthonormality_residual = std::max(h.orthonormality_residual, std::abs(s - (i == j ? 1.0 : 0.0)));
        }
        for (const auto& k : kvecs) {
            double s = 0.0;
            for (std::size_t l = 0; l < m; ++l) s += h.c[i][l] * k[l];
            h.kernel_residual = std::max(h.kernel_residual, std::abs(s));
        }
    }
    return h;
}

HorizontalFrame horizontal_frame(const TotalMetric& tm, const KernelLattice& kernel, Point2 p) {
    std::vector<double> f;
    for (const auto& e : tm.eval_all(p)) f.push_back(e.f);
    return horizontal_frame(f, kernel);
}

namespace {

// Quadratic form X -> K + sum_i R(X, U_i, X, U_i) = K - sum_l w_l Hess f_l(X, X) / f_l.
struct Form {
    double a = 0.0, b = 0.0, c = 0.0;
};

Form x_form(const PointGeometry& pg, const HorizontalFrame& frame) {
    check_nondegenerate(pg);
    Form q{pg.K, 0.0, pg.K};
    for (std::size_t l = 0; l < pg.f.size(); ++l) {
        const FiberEval& f = pg.f[l];
        if (f.plateau) continue;
        const double w = frame.weight[l] / f.f;
        q.a -= w * f.h_aa;
        q.b -= w * f.h_ab;
        q.c -= w * f.h_bb;
    }
    return q;
}

}  // namespace

XBound ricci_X_bound(const PointGeometry& pg, const HorizontalFrame& frame, double theta) {
    const Form q = x_form(pg, frame);
    const Vec2 X{std::cos(theta), std::sin(theta)};
    XBound out;
    out.value = q.a * X.a * X.a + 2.0 * q.b * X.a * X.b + q.c * X.b * X.b;
    out.params.z1 = X.a;
    out.params.z2 = X.b;
    // Regional parameters against the two edges with active fibers (f_1 excluded).
    int slot = 0;
    for (std::size_t l = 1; l < pg.f.size() && slot < 2; ++l) {
        const FiberEval& f = pg.f[l];
        if (f.plateau || !f.fermi) continue;
        const double p1 = dot(X, f.fermi->e_rho), p2 = dot(X, f.fermi->e_psi);
        if (slot == 0) {
            out.params.x1 = p1;
            out.params.x2 = p2;
        } else {
            out.params.y1 = p1;
            out.params.y2 = p2;
        }
        ++slot;
    }
    return out;
}

double ricci_X_bound_min(const PointGeometry& pg, const HorizontalFrame& frame) {
    const Form q = x_form(pg, frame);
    return 0.5 * (q.a + q.c) - std::hypot(0.5 * (q.a - q.c), q.b);
}

double ricci_U_bound(const PointGeometry& pg, const HorizontalFrame& frame, std::size_t i) {
    check_nondegenerate(pg);
    const std::size_t m = pg.f.size();
    const auto& ci = frame.c.at(i);
    double v = 0.0;
    // R(X,U,X,U) + R(X~,U,X~,U) = -sum_l c_l^2 (trace of Hess f_l) / f_l.
    for (std::size_t l = 0; l < m; ++l) {
        const FiberEval& f = pg.f[l];
        if (f.plateau) continue;
        v -= ci[l] * ci[l] * (f.h_aa + f.h_bb) / f.f;
    }
    for (std::size_t j = 0; j < frame.c.size(); ++j) {
        if (j == i) continue;
        const auto& cj = frame.c[j];
        for (std::size_t l = 0; l < m; ++l)
            for (std::size_t s = 0; s < m; ++s) {
                if (l == s) continue;
                const double R = -dot(pg.f[l].grad, pg.f[s].grad) / (pg.f[l].f * pg.f[s].f);
                v += ci[l] * ci[l] * cj[s] * cj[s] * R;
            }
    }
    return v;
}

std::string region_of(const PointGeometry& pg, const MetricParams& p) {
    std::string r = pg.p.x < p.epsilon ? "cap1" : (pg.p.x < 2.0 * p.epsilon ? "band" : "cap2");
    bool any = false;
    for (std::size_t l = 0; l < pg.f.size(); ++l)
        if (!pg.f[l].plateau) {
            r += (any ? "+" : ":f") + std::to_string(l + 1);
            any = true;
        }
    if (!any) r += ":deep";
    return r;
}

std::vector<Point2> certification_points(const PolygonD& d, const GridSpec& grid) {
    const MetricParams& mp = d.params;
    std::vector<Point2> pts;
    const double margin = grid.boundary_margin;
    const auto keep = [&](Point2 p) {
        if (d.contains(p, margin)) pts.push_back(p);
    };
    // Rows with a dense block over the caps/band and a coarse block beyond the f_1 tube.
    const double x_split = -mp.delta + 1.1 * 2.0 * kPi * mp.epsilon;
    const std::size_t inner = std::max<std::size_t>(1, (grid.cols * 16 + 12) / 25);
    const std::size_t outer = grid.cols > inner ? grid.cols - inner : 0;
    for (std::size_t j = 0; j < grid.rows; ++j) {
        const double y = d.H * (static_cast<double>(j) + 0.5) / static_cast<double>(grid.rows);
        const double xr = d.right_boundary(y);
        const double xa = -mp.delta, xb = std::min(xr, x_split);
        const std::size_t ni = xr <= x_split ? grid.cols : inner;
        for (std::size_t i = 0; i < ni; ++i)
            keep({xa + (xb - xa) * (static_cast<double>(i) + 0.5) / static_cast<double>(ni), y});
        if (xr > x_split)
            for (std::size_t i = 0; i < outer; ++i)
                keep({x_split + (xr - x_split) * (static_cast<double>(i) + 0.5) / static_cast<double>(outer), y});
    }
    // Tube samples at fixed fractions of each sine branch.
    for (std::size_t e = 0; e < d.edges.size(); ++e) {
        const EdgeInfo& ed = d.edges[e];
        const double mu = e == 0 ? 4.0 * mp.epsilon : mp.mu;
        const FermiChart chart(d, e, 0.5 * kPi * mu * 1.05);
        for (std::size_t k = 0; k < grid.tube_feet; ++k) {
            const double psi = ed.psi_min + (ed.psi_max - ed.psi_min) * (static_cast<double>(k) + 0.5) /
                                                static_cast<double>(grid.tube_feet);
            for (double frac : grid.tube_depths) {
                const double rho = frac * 0.5 * kPi * mu;
                if (ed.kind == EdgeKind::Left) {
                    keep({-mp.delta + rho, psi});
                } else {
                    keep(chart.exp_normal(psi, rho).p);
                }
            }
        }
    }
    // Near each vertex, along the bisector of the two edges.
    const SurfaceProfile& g = *d.profile;
    for (std::size_t v = 0; v < d.vertices.size(); ++v) {
        const VertexInfo& vi = d.vertices[v];
        const double G = g.eval(vi.p.x).g;
        // Inward bisector from the inward normals of both edges.
        Vec2 dir{0.0, 0.0};
        for (std::size_t e : {v, (v + 1) % d.edges.size()}) {
            const EdgeInfo& ed = d.edges[e];
            double psi = 0.0;
            if (ed.kind == EdgeKind::Left) psi = vi.p.y;
            else if (ed.kind == EdgeKind::Top || ed.kind == EdgeKind::Bottom) psi = vi.p.x + mp.delta;
            else psi = std::abs(vi.p.y - ed.apex_y) < 1e-9 ? 0.0 : (vi.p.y > ed.apex_y ? ed.psi_max : ed.psi_min);
            const GeodesicSample q = d.edge_point(e, psi);
            Vec2 t{q.dx, G * q.dy};
            const double tn = std::hypot(t.a, t.b);
            dir.a += ed.inward_sign * -t.b / tn;
            dir.b += ed.inward_sign * t.a / tn;
        }
        const double dn = std::hypot(dir.a, dir.b);
        if (dn < 1e-12) continue;
        for (double frac : {0.1, 0.3, 0.6, 0.9}) {
            const double s = frac * 0.5 * kPi * mp.mu;
            keep({vi.p.x + s * dir.a / dn, vi.p.y + s * dir.b / dn / G});
        }
    }
    // One-sided samples beside the breakpoints of G.
    for (double bp : g.breakpoints())
        for (double off : {-grid.breakpoint_offset, grid.breakpoint_offset})
            for (std::size_t j = 0; j < grid.breakpoint_rows; ++j)
                keep({bp + off, d.H * (static_cast<double>(j) + 0.5) / static_cast<double>(grid.breakpoint_rows)});
    return pts;
}

CertificationReport certify(const TotalMetric& tm, const KernelLattice& kernel, const GridSpec& grid) {
    const PolygonD& d = tm.polygon();
    const MetricParams& mp = d.params;
    CertificationReport rep;
    rep.grid = grid;
    const std::vector<Point2> pts = certification_points(d, grid);
    rep.rows.resize(pts.size());
    const std::size_t dirs = std::max<std::size_t>(1, grid.directions);
    const auto breakpoints = d.profile->breakpoints();

    const auto work = [&](std::size_t idx) {
        RicciSample& s = rep.rows[idx];
        s.p = pts[idx];
        try {
            const PointGeometry pg = point_geometry(tm, s.p, grid.break_margin);
            s.region = region_of(pg, mp);
            std::vector<double> f;
            for (const auto& e : pg.f) {
                f.push_back(e.f);
                if (e.near_break) s.flag = true;
            }
            for (double bp : breakpoints)
                if (std::abs(s.p.x - bp) < grid.break_margin) s.flag = true;
            const HorizontalFrame frame = horizontal_frame(f, kernel);
            s.min_X = kInf;
            for (std::size_t k = 0; k < dirs; ++k) {
                const XBound xb = ricci_X_bound(pg, frame, kPi * static_cast<double>(k) / static_cast<double>(dirs));
                if (xb.value < s.min_X) {
                    s.min_X = xb.value;
                    s.argmin_dir = xb.params;
                }
            }
            s.min_X_exact = ricci_X_bound_min(pg, frame);
            s.min_U = kInf;
            for (std::size_t i = 0; i < frame.n; ++i) {
                s.U.push_back(ricci_U_bound(pg, frame, i));
                s.min_U = std::min(s.min_U, s.U.back());
            }
            s.deep_interior = s.region.find(":deep") != std::string::npos;
            s.c_min = frame.c_min;
        } catch (const Error& e) {
            s.error = e.what();
        }
    };

    parallel_for(pts.size(), work, grid.threads);

    // Sequential reduction in sample order: independent of the thread count.
    rep.min_X = kInf;
    rep.min_U = kInf;
    rep.c_min = kInf;
    const double K_deep = 1.0 / (mp.k2 * mp.k2);
    for (auto& s : rep.rows) {
        if (!s.error.empty()) {
            ++rep.errors;
            continue;
        }
        rep.c_min = std::min(rep.c_min, s.c_min);
        if (s.flag) ++rep.flagged;
        const double x = std::min(s.min_X, s.min_X_exact);
        if (x < rep.min_X) {
            rep.min_X = x;
            rep.argmin_X = s.p;
            rep.argmin_X_region = s.region;
        }
        if (s.min_U < rep.min_U) {
            rep.min_U = s.min_U;
            rep.argmin_U = s.p;
            rep.argmin_U_region = s.region;
        }
        if (s.deep_interior && s.region.rfind("cap2", 0) == 0) {
            ++rep.deep_interior_count;
            rep.deep_interior_max_dev = std::max(rep.deep_interior_max_dev, std::abs(s.min_X_exact - K_deep));
        }
    }
    rep.base_points = pts.size();
    rep.samples = pts.size() * dirs;
    rep.pass = rep.errors == 0 && rep.min_X > 0 && rep.min_U > 0;
    return rep;
}

std::string certification_csv(const CertificationReport& r) {
    std::ostringstream os;
    os.precision(12);
    os << "x,y,region,min_ric_X,min_ric_U,flag\n";
    for (const auto& s : r.rows) {
        os << s.p.x << ',' << s.p.y << ',';
        if (!s.error.empty()) {
            os << "error,,,error\n";
            continue;
        }
        os << s.region << ',' << std::min(s.min_X, s.min_X_exact) << ',' << s.min_U << ','
           << (s.flag ? "one-sided" : "") << '\n';
    }
    return os.str();
}

// Finite-difference oracle -------------------------------------------------

FdCurvature fd_oracle_diag(const std::function<std::vector<double>(double, double)>& diag, Point2 p, double h) {
    // Richardson-extrapolated central differences of every coefficient.
    const auto D = [&](double dx, double dy) { return diag(p.x + dx, p.y + dy); };
    const std::vector<double> c0 = D(0, 0);
    const std::size_t N = c0.size();
    const auto xp1 = D(h, 0), xm1 = D(-h, 0), xp2 = D(2 * h, 0), xm2 = D(-2 * h, 0);
    const auto yp1 = D(0, h), ym1 = D(0, -h), yp2 = D(0, 2 * h), ym2 = D(0, -2 * h);
    const auto pp1 = D(h, h), pm1 = D(h, -h), mp1 = D(-h, h), mm1 = D(-h, -h);
    const auto pp2 = D(2 * h, 2 * h), pm2 = D(2 * h, -2 * h), mp2 = D(-2 * h, 2 * h), mm2 = D(-2 * h, -2 * h);
    std::vector<double> d1[2], d2[3];  // d1[k][a] = d_k D_a; d2: xx, xy, yy
    for (auto& v : d1) v.assign(N, 0.0);
    for (auto& v : d2) v.assign(N, 0.0);
    for (std::size_t a = 0; a < N; ++a) {
        const auto rich = [](double fine, double coarse) { return (4.0 * fine - coarse) / 3.0; };
        d1[0][a] = rich((xp1[a] - xm1[a]) / (2 * h), (xp2[a] - xm2[a]) / (4 * h));
        d1[1][a] = rich((yp1[a] - ym1[a]) / (2 * h), (yp2[a] - ym2[a]) / (4 * h));
        d2[0][a] = rich((xp1[a] - 2 * c0[a] + xm1[a]) / (h * h), (xp2[a] - 2 * c0[a] + xm2[a]) / (4 * h * h));
        d2[2][a] = rich((yp1[a] - 2 * c0[a] + ym1[a]) / (h * h), (yp2[a] - 2 * c0[a] + ym2[a]) / (4 * h * h));
        d2[1][a] = rich((pp1[a] - pm1[a] - mp1[a] + mm1[a]) / (4 * h * h),
                        (pp2[a] - pm2[a] - mp2[a] + mm2[a]) / (16 * h * h));
    }
    // Derivatives only in the two base coordinates (indices 0 = x, 1 = y).
    const auto dD = [&](std::size_t k, std::size_t a) { return k < 2 ? d1[k][a] : 0.0; };
    const auto ddD = [&](std::size_t k, std::size_t l, std::size_t a) {
        if (k >= 2 || l >= 2) return 0.0;
        return d2[k + l][a];
    };
    const auto delta = [](std::size_t i, std::size_t j) { return i == j ? 1.0 : 0.0; };
    // Gamma^a_bc = (delta_ac d_b D_a + delta_ab d_c D_a - delta_bc d_a D_b) / (2 D_a)
    const auto Gam = [&](std::size_t a, std::size_t b, std::size_t c) {
        return (delta(a, c) * dD(b, a) + delta(a, b) * dD(c, a) - delta(b, c) * dD(a, b)) / (2.0 * c0[a]);
    };
    const auto dGam = [&](std::size_t e, std::size_t a, std::size_t b, std::size_t c) {
        if (e >= 2) return 0.0;
        const double num = delta(a, c) * ddD(e, b, a) + delta(a, b) * ddD(e, c, a) - delta(b, c) * ddD(e, a, b);
        return num / (2.0 * c0[a]) - Gam(a, b, c) * dD(e, a) / c0[a];
    };
    std::vector<double> G(N * N * N);
    for (std::size_t a = 0; a < N; ++a)
        for (std::size_t b = 0; b < N; ++b)
            for (std::size_t c = 0; c < N; ++c) G[(a * N + b) * N + c] = Gam(a, b, c);
    const auto g3 = [&](std::size_t a, std::size_t b, std::size_t c) { return G[(a * N + b) * N + c]; };

    FdCurvature out;
    out.dim = N;
    out.R.assign(N * N * N * N, 0.0);
    std::vector<double> s(N);
    for (std::size_t a = 0; a < N; ++a) s[a] = std::sqrt(c0[a]);
    // R^a_bcd = d_c Gamma^a_db - d_d Gamma^a_cb + Gamma^a_ce Gamma^e_db - Gamma^a_de Gamma^e_cb
    // is the d/dx^a component of R(d_c, d_d) d_b.
    for (std::size_t a = 0; a < N; ++a)
        for (std::size_t b = 0; b < N; ++b)
            for (std::size_t c = 0; c < N; ++c)
                for (std::size_t d = 0; d < N; ++d) {
                    double v = dGam(c, a, d, b) - dGam(d, a, c, b);
                    for (std::size_t e = 0; e < N; ++e) v += g3(a, c, e) * g3(e, d, b) - g3(a, d, e) * g3(e, c, b);
                    // <R(e_c, e_d) e_b, e_a> stored as R_{c d a b}.
                    const double low = c0[a] * v / (s[a] * s[b] * s[c] * s[d]);
                    out.R[((c * N + d) * N + a) * N + b] = low;
                }
    for (std::size_t a = 0; a < N; ++a)
        for (std::size_t b = 0; b < N; ++b)
            for (std::size_t c = 0; c < N; ++c)
                for (std::size_t d = 0; d < N; ++d) {
                    const double r = out.at(a, b, c, d) + out.at(b, c, a, d) + out.at(c, a, b, d);
                    out.bianchi_residual = std::max(out.bianchi_residual, std::abs(r));
                }
    return out;
}

FdCurvature fd_oracle(const TotalMetric& tm, Point2 p, double step) {
    const SurfaceProfile& g = tm.base();
    const double reach = 2.0 * step * 10.0;
    for (double bp : g.breakpoints())
        if (std::abs(p.x - bp) < reach) throw DomainError("fd_oracle: too close to a breakpoint of G");
    const auto fs = tm.eval_all(p);
    for (std::size_t i = 0; i < fs.size(); ++i) {
        const FiberEval& f = fs[i];
        if (!(f.f > 0)) throw DomainError("fd_oracle: degenerate point");
        if (f.fermi && std::abs(f.fermi->rho - tm.fiber(i).breakpoint()) < reach)
            throw DomainError("fd_oracle: too close to the end of the sine branch of f_" + std::to_string(i + 1));
    }
    return fd_oracle_diag([&](double x, double y) { return metric_at(tm, {x, y}).diag; }, p, step);
}

FdCurvature expand_components(const CurvatureComponents& c) {
    const std::size_t N = c.m + 2;
    FdCurvature t;
    t.dim = N;
    t.R.assign(N * N * N * N, 0.0);
    const auto set = [&](std::size_t a, std::size_t b, std::size_t cc, std::size_t d, double v) {
        t.R[((a * N + b) * N + cc) * N + d] = v;
    };
    const auto sectional = [&](std::size_t a, std::size_t b, double v) {
        set(a, b, a, b, v);
        set(b, a, b, a, v);
        set(a, b, b, a, -v);
        set(b, a, a, b, -v);
    };
    sectional(0, 1, c.R_m10m10);
    for (std::size_t i = 0; i < c.m; ++i) {
        const std::size_t I = i + 2;
        sectional(0, I, c.R_m1i[i]);
        sectional(1, I, c.R_0i[i]);
        for (std::size_t j = i + 1; j < c.m; ++j) sectional(I, j + 2, c.R_ij[i][j]);
        const double v = c.R_m1i0i[i];
        set(0, I, 1, I, v);
        set(1, I, 0, I, v);
        set(I, 0, I, 1, v);
        set(I, 1, I, 0, v);
        set(0, I, I, 1, -v);
        set(I, 0, 1, I, -v);
        set(1, I, I, 0, -v);
        set(I, 1, 0, I, -v);
    }
    return t;
}

double max_deviation(const FdCurvature& a, const FdCurvature& b) {
    if (a.dim != b.dim) throw PreconditionError("max_deviation: dimension mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < a.R.size(); ++i) d = std::max(d, std::abs(a.R[i] - b.R[i]));
    return d;
}

}  // namespace torusric
