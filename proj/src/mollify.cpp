#include "torusric/mollify.hpp"

#include "torusric/errors.hpp"
#include "torusric/numerics.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

namespace torusric {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kQuadTol = 1e-13;  // adaptive route

double bump(double u) { return std::abs(u) < 1.0 ? std::exp(1.0 / (u * u - 1.0)) : 0.0; }

double bump_derivative(double u) {
    if (std::abs(u) >= 1.0) return 0.0;
    const double q = u * u - 1.0;
    return std::exp(1.0 / q) * (-2.0 * u / (q * q));
}

// Quintic Hermite basis on [0, 1] and its first two derivatives.
struct Basis {
    double h[6], d[6], dd[6];
};

Basis hermite5(double t) {
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    Basis b;
    b.h[0] = 1 - 10 * t3 + 15 * t4 - 6 * t5;
    b.h[1] = t - 6 * t3 + 8 * t4 - 3 * t5;
    b.h[2] = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
    b.h[3] = 0.5 * (t3 - 2 * t4 + t5);
    b.h[4] = -4 * t3 + 7 * t4 - 3 * t5;
    b.h[5] = 10 * t3 - 15 * t4 + 6 * t5;
    b.d[0] = -30 * t2 + 60 * t3 - 30 * t4;
    b.d[1] = 1 - 18 * t2 + 32 * t3 - 15 * t4;
    b.d[2] = 0.5 * (2 * t - 9 * t2 + 12 * t3 - 5 * t4);
    b.d[3] = 0.5 * (3 * t2 - 8 * t3 + 5 * t4);
    b.d[4] = -12 * t2 + 28 * t3 - 15 * t4;
    b.d[5] = 30 * t2 - 60 * t3 + 30 * t4;
    b.dd[0] = -60 * t + 180 * t2 - 120 * t3;
    b.dd[1] = -36 * t + 96 * t2 - 60 * t3;
    b.dd[2] = 0.5 * (2 - 18 * t + 36 * t2 - 20 * t3);
    b.dd[3] = 0.5 * (6 * t - 24 * t2 + 20 * t3);
    b.dd[4] = -24 * t + 84 * t2 - 60 * t3;
    b.dd[5] = 60 * t - 180 * t2 + 120 * t3;
    return b;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

MollifierKernel::MollifierKernel(double lambda) : lambda_(lambda) {
    if (!(lambda > 0)) throw PreconditionError("mollifier: lambda must be positive");
}

double MollifierKernel::normalization() {
    static const double C = 1.0 / integrate(bump, -1.0, 1.0, 1e-15, {0.0});
    return C;
}

double MollifierKernel::operator()(double x) const { return normalization() * bump(x / lambda_) / lambda_; }

double MollifierKernel::derivative(double x) const {
    return normalization() * bump_derivative(x / lambda_) / (lambda_ * lambda_);
}

double MollifierKernel::mass() const {
    return integrate([this](double x) { return (*this)(x); }, -lambda_, lambda_, 1e-15, {0.0});
}

MollifiedFunction::MollifiedFunction(PiecewiseSource src, double lambda, double a, double b, double coarse,
                                     unsigned threads)
    : src_(std::move(src)), kernel_(lambda), a_(a), b_(b) {
    if (!src_.eval) throw PreconditionError("mollify: source has no evaluator");
    if (!(a < b)) throw PreconditionError("mollify: empty interval");
    if (a - lambda < src_.a - 1e-12 || b + lambda > src_.b + 1e-12)
        throw PreconditionError("mollify: source must cover [a - lambda, b + lambda]");
    std::sort(src_.breakpoints.begin(), src_.breakpoints.end());
    for (double bp : src_.breakpoints) {
        const ProfileSample l = src_.eval(bp, Side::Left), r = src_.eval(bp, Side::Right);
        jump_v_.push_back(r.g - l.g);
        jump_d_.push_back(r.dg - l.dg);
    }
    // Fine spacing where the kernel sees a breakpoint, coarse elsewhere.
    std::vector<double> cuts{a, b};
    for (double bp : src_.breakpoints)
        for (double c : {bp - 2.0 * lambda, bp - lambda, bp, bp + lambda, bp + 2.0 * lambda})
            if (c > a && c < b) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    const auto near = [&](double x) {
        for (double bp : src_.breakpoints)
            if (std::abs(x - bp) < 2.0 * lambda) return true;
        return false;
    };
    x_.push_back(a);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i], hi = cuts[i + 1];
        const double h = near(0.5 * (lo + hi)) ? lambda / 20.0 : coarse;
        const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / h - 1e-9));
        for (std::size_t k = 1; k <= n; ++k) x_.push_back(k == n ? hi : lo + (hi - lo) * static_cast<double>(k) / n);
    }
    y_.resize(x_.size());
    parallel_for(x_.size(), [this](std::size_t i) { y_[i] = convolve(x_[i]); }, threads);
    cum_d2_.assign(x_.size(), 0.0);
    for (std::size_t i = 1; i < x_.size(); ++i) cum_d2_[i] = cum_d2_[i - 1] + piece_d2(x_[i - 1], x_[i]);
}

ProfileSample MollifiedFunction::conv_all(double x) const {
    // Composite 30-point Gauss-Legendre in u = t/lambda over eight equal panels,
    // with extra cuts where x - t crosses a breakpoint.
    using GL = boost::math::quadrature::gauss<double, 30>;
    const double lam = kernel_.lambda();
    std::vector<double> cuts = linspace(-1.0, 1.0, 9);
    for (double bp : src_.breakpoints) {
        const double u = (x - bp) / lam;
        if (u > -1.0 && u < 1.0) cuts.push_back(u);
    }
    std::sort(cuts.begin(), cuts.end());
    const auto& ab = GL::abscissa();
    const auto& wt = GL::weights();
    ProfileSample s;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double c = 0.5 * (cuts[i] + cuts[i + 1]), r = 0.5 * (cuts[i + 1] - cuts[i]);
        if (r <= 0) continue;
        for (std::size_t k = 0; k < ab.size(); ++k)
            for (double sgn : {1.0, -1.0}) {
                if (k == 0 && sgn < 0 && ab[0] == 0.0) continue;
                const double u = c + sgn * r * ab[k];
                const double w = r * wt[k] * kernel_(u * lam) * lam;
                const ProfileSample f = src_.eval(x - u * lam, Side::Right);
                s.g += w * f.g;
                s.dg += w * f.dg;
                s.ddg += w * f.ddg;
            }
    }
    return s;
}

ProfileSample MollifiedFunction::convolve(double x) const {
    ProfileSample s = conv_all(x);
    // Distributional parts of f' and f'' at the breakpoints.
    for (std::size_t k = 0; k < src_.breakpoints.size(); ++k) {
        const double u = x - src_.breakpoints[k];
        s.dg += jump_v_[k] * kernel_(u);
        s.ddg += jump_d_[k] * kernel_(u) + jump_v_[k] * kernel_.derivative(u);
    }
    return s;
}

double MollifiedFunction::kernel_derivative_route(double x) const {
    const double lam = kernel_.lambda();
    std::vector<double> breaks{0.0};
    for (double bp : src_.breakpoints)
        if (std::abs(x - bp) < lam) breaks.push_back(x - bp);
    return integrate([&](double t) { return kernel_.derivative(t) * src_.eval(x - t, Side::Right).g; }, -lam, lam,
                     kQuadTol, breaks);
}

double MollifiedFunction::derivative_route(double x) const { return conv_all(x).dg; }

ProfileSample MollifiedFunction::eval(double x) const {
    if (x < a_ - 1e-12 || x > b_ + 1e-12)
        throw DomainError("mollified function: x=" + fmt(x) + " outside [" + fmt(a_) + ", " + fmt(b_) + "]");
    x = std::clamp(x, a_, b_);
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    if (i + 1 >= x_.size()) i = x_.size() - 2;
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const Basis B = hermite5(t);
    const ProfileSample &p0 = y_[i], &p1 = y_[i + 1];
    const double c[6] = {p0.g, h * p0.dg, h * h * p0.ddg, h * h * p1.ddg, h * p1.dg, p1.g};
    ProfileSample s;
    for (int k = 0; k < 6; ++k) {
        s.g += c[k] * B.h[k];
        s.dg += c[k] * B.d[k];
        s.ddg += c[k] * B.dd[k];
    }
    s.dg /= h;
    s.ddg /= h * h;
    return s;
}

namespace {

const double kGx[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
const double kGw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

}  // namespace

double MollifiedFunction::piece_d2(double lo, double hi) const {
    const double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
    double t = 0.0;
    for (int k = 0; k < 3; ++k) t += r * kGw[k] * eval(c + r * kGx[k]).ddg;
    return t;
}

double MollifiedFunction::cumulative_d2(double x) const {
    x = std::clamp(x, a_, b_);
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    return cum_d2_[i] + (x > x_[i] ? piece_d2(x_[i], x) : 0.0);
}

double MollifiedFunction::integrate_d2(double lo, double hi) const { return cumulative_d2(hi) - cumulative_d2(lo); }

DerivativeSup MollifiedFunction::sup_abs() const {
    DerivativeSup s;
    const auto take = [&](const ProfileSample& p) {
        s.value = std::max(s.value, std::abs(p.g));
        s.d1 = std::max(s.d1, std::abs(p.dg));
        s.d2 = std::max(s.d2, std::abs(p.ddg));
    };
    for (std::size_t i = 0; i < x_.size(); ++i) {
        take(y_[i]);
        if (i + 1 < x_.size()) take(convolve(0.5 * (x_[i] + x_[i + 1])));
    }
    return s;
}

MollifiedFunction mollify(const PiecewiseSource& f, double a, double b, double lambda, double sigma) {
    if (!(lambda < sigma))
        throw PreconditionError("mollify: lambda=" + fmt(lambda) + " must be below the extension margin sigma=" +
                                fmt(sigma));
    if (f.a > a - sigma + 1e-12) throw PreconditionError("mollify: source must be defined on [a - sigma, b]");
    return MollifiedFunction(f, lambda, a, b);
}

bool bounds_preserved(const MollifiedFunction& mf, double lower, double upper) {
    const auto& x = mf.nodes();
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (double t : {0.0, 0.5}) {
            if (t > 0 && i + 1 == x.size()) continue;
            const double v = mf.eval(t > 0 ? 0.5 * (x[i] + x[i + 1]) : x[i]).g;
            if (v < lower - 1e-10 || v > upper + 1e-10) return false;
        }
    }
    return true;
}

double commutation_error(const MollifiedFunction& mf, std::size_t n) {
    double worst = 0.0;
    for (double x : linspace(mf.a(), mf.b(), n))
        worst = std::max(worst, std::abs(mf.convolve(x).dg - mf.kernel_derivative_route(x)));
    return worst;
}

namespace {

// Uniform points plus a cluster around every breakpoint at the kernel scale.
std::vector<double> check_points(const PiecewiseSource& f, double a, double b, double lambda) {
    std::vector<double> xs = linspace(a, b, 4001);
    for (double bp : f.breakpoints)
        for (int k = -24; k <= 24; ++k) {
            const double x = bp + lambda * k / 8.0;
            if (x >= a && x <= b) xs.push_back(x);
        }
    std::sort(xs.begin(), xs.end());
    return xs;
}

DerivativeSup source_sup(const PiecewiseSource& f, const std::vector<double>& xs) {
    DerivativeSup s;
    for (double x : xs)
        for (Side side : {Side::Left, Side::Right}) {
            const ProfileSample p = f.eval(x, side);
            s.value = std::max(s.value, std::abs(p.g));
            s.d1 = std::max(s.d1, std::abs(p.dg));
            s.d2 = std::max(s.d2, std::abs(p.ddg));
        }
    return s;
}

}  // namespace

ConvergenceReport convergence_report(const PiecewiseSource& f, double a, double b, const std::vector<double>& ladder,
                                     double sigma_factor) {
    ConvergenceReport rep;
    rep.all_finite = true;
    for (double lam : ladder) {
        const MollifiedFunction mf = mollify(f, a, b, lam, sigma_factor * lam);
        ConvergenceRow row;
        row.lambda = lam;
        row.bad_measure = std::numeric_limits<double>::quiet_NaN();
        const auto xs = check_points(f, a, b, lam);
        for (double x : xs) {
            const double fl = mf.eval(x).g;
            for (Side side : {Side::Left, Side::Right})
                row.sup_distance = std::max(row.sup_distance, std::abs(fl - f.eval(x, side).g));
        }
        row.sup_source = source_sup(f, xs);
        row.sup_mollified = mf.sup_abs();
        if (!std::isfinite(row.sup_distance) || !std::isfinite(row.sup_mollified.d2)) rep.all_finite = false;
        rep.rows.push_back(row);
    }
    rep.strictly_decreasing = true;
    rep.monotone_within_slack = true;
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
        if (!(rep.rows[i].sup_distance < rep.rows[i - 1].sup_distance)) rep.strictly_decreasing = false;
        if (rep.rows[i].sup_distance > 1.1 * rep.rows[i - 1].sup_distance) rep.monotone_within_slack = false;
    }
    return rep;
}

PiecewiseSource extended_profile_source(std::shared_ptr<const ProfileG> g, double sigma) {
    PiecewiseSource s;
    s.a = -g->params().delta - sigma;
    s.b = g->domain_end();
    s.breakpoints = g->breakpoints();
    s.eval = [g](double x, Side side) { return g->eval_extended(x, side); };
    return s;
}

namespace {

MollifiedFunction build_profile_function(const std::shared_ptr<const ProfileG>& g, double lambda, double sigma,
                                         double end) {
    const MetricParams& p = g->params();
    if (!(lambda < p.epsilon / 4.0))
        throw PreconditionError("mollify: lambda=" + fmt(lambda) + " must stay below epsilon/4=" +
                                fmt(p.epsilon / 4.0) + " so the smoothed kinks stay apart");
    const double s = sigma > 0 ? sigma : 4.0 * lambda;
    if (!(lambda < s)) throw PreconditionError("mollify: lambda must be below sigma");
    const double e = end > 0 ? end : g->domain_end() - 2.0 * lambda;
    return MollifiedFunction(extended_profile_source(g, s), lambda, -p.delta, e);
}

}  // namespace

MollifiedProfile::MollifiedProfile(std::shared_ptr<const ProfileG> g, double lambda, double sigma, double end)
    : g_(std::move(g)), f_(build_profile_function(g_, lambda, sigma, end)) {}

ProfileSample MollifiedProfile::eval(double x, Side) const {
    // Same left-edge tolerance as the piecewise profile.
    if (x < f_.a() && x > f_.a() - 1e-9) x = f_.a();
    return f_.eval(x);
}

std::vector<double> MollifiedProfile::features() const {
    std::vector<double> out;
    const double lam = f_.lambda();
    for (double bp : g_->breakpoints())
        for (double c : {bp - lam, bp, bp + lam}) out.push_back(c);
    return out;
}

double MollifiedProfile::feature_gap() const { return g_->feature_gap(); }

double MollifiedProfile::strip_density(double a, double b) const { return -f_.integrate_d2(a, b); }

double curvature_in_measure(const ProfileG& g, const MollifiedProfile& gl, double a, double b, double threshold) {
    const double lam = gl.lambda();
    std::vector<double> cuts{a, b};
    for (double bp : g.breakpoints())
        for (double c : {bp - 3.0 * lam, bp + 3.0 * lam})
            if (c > a && c < b) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    double bad = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i], hi = cuts[i + 1];
        bool near = false;
        for (double bp : g.breakpoints())
            if (std::abs(0.5 * (lo + hi) - bp) < 3.0 * lam) near = true;
        const double h = near ? lam / 200.0 : std::min(1e-3, (b - a) / 2000.0);
        const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / h));
        const double w = (hi - lo) / static_cast<double>(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double x = lo + (static_cast<double>(k) + 0.5) * w;
            const double K = g.gauss_curvature(x);
            const double Kl = gl.gauss_curvature(x);
            if (std::abs(Kl - K) > threshold) bad += w;
        }
    }
    return bad;
}

double default_beta(const MetricParams& p, double x_right) {
    return 2.0 * p.epsilon + 0.5 * (x_right - 2.0 * p.epsilon);
}

MollifiedFunction mollified_radial_function(double mu, double lambda) {
    if (!(mu > 0)) throw PreconditionError("mollify: radial scale must be positive");
    const double bp = 0.5 * kPi * mu;
    if (!(lambda < bp / 4.0)) throw PreconditionError("mollify: lambda too large for the radial scale");
    PiecewiseSource src;
    src.a = -bp - 1.0;
    src.b = bp + 1.0;
    src.breakpoints = {-bp, bp};
    // Odd extension of mu sin(rho/mu), constant beyond the breakpoint.
    src.eval = [mu, bp](double r, Side side) -> ProfileSample {
        const bool out = std::abs(r) > bp || (r == bp && side == Side::Right) || (r == -bp && side == Side::Left);
        if (out) return {r > 0 ? mu : -mu, 0.0, 0.0};
        return {mu * std::sin(r / mu), std::cos(r / mu), -std::sin(r / mu) / mu};
    };
    return MollifiedFunction(src, lambda, -2.0 * lambda, bp + lambda, std::min(0.005, mu / 40.0));
}

RadialOverride mollified_radial(const std::vector<double>& scales, double lambda) {
    auto table = std::make_shared<std::map<double, MollifiedFunction>>();
    for (double mu : scales)
        if (!table->count(mu)) table->emplace(mu, mollified_radial_function(mu, lambda));
    RadialOverride o;
    o.plateau_shift = lambda;
    o.fn = [table, lambda](double mu, double rho) -> RadialValue {
        const auto it = table->find(mu);
        if (it == table->end()) throw PreconditionError("mollified radial profile: unknown scale " + fmt(mu));
        if (rho >= 0.5 * kPi * mu + lambda) return {mu, 0.0, 0.0};
        const ProfileSample s = it->second.eval(rho);
        return {s.g, s.dg, s.ddg};
    };
    return o;
}

SmoothResult smooth_pipeline(const GaussBonnetResult& piecewise, double piecewise_min_bound, std::size_t m,
                             const KernelLattice& kernel, const SmoothOptions& opt) {
    SmoothResult out;
    const MetricParams p = piecewise.params;
    const double lam = opt.lambda;
    const double sigma = opt.sigma > 0 ? opt.sigma : 4.0 * lam;
    out.lambda = lam;
    out.sigma = sigma;
    if (!(lam < p.epsilon / 4.0))
        throw PreconditionError("smooth_pipeline: lambda=" + fmt(lam) + " must stay below epsilon/4");
    if (!piecewise.feasible) throw PreconditionError("smooth_pipeline: needs a feasible piecewise solution");

    // Steps 1-3: G_lambda against G on [-delta, beta] at the piecewise k2.
    const auto g = std::make_shared<const ProfileG>(p);
    const auto gl = std::make_shared<const MollifiedProfile>(g, lam, sigma);
    out.beta = opt.beta > 0 ? opt.beta : default_beta(p, p.r);
    for (double x : linspace(-p.delta, out.beta, 20001))
        out.sup_distance = std::max(out.sup_distance, std::abs(gl->eval(x).g - g->eval(x).g));
    for (double bp : g->breakpoints())
        for (int k = -16; k <= 16; ++k) {
            const double x = bp + lam * k / 8.0;
            out.sup_distance = std::max({out.sup_distance, std::abs(gl->eval(x).g - g->eval(x, Side::Left).g),
                                         std::abs(gl->eval(x).g - g->eval(x, Side::Right).g)});
        }
    out.bad_measure = curvature_in_measure(*g, *gl, -p.delta, out.beta);

    // Step 4: Gauss-Bonnet on the smoothed surface.
    std::ostringstream sum;
    if (opt.charts == ChartMode::Recompute) {
        const ProfileFactory factory = [&](double k2) -> std::shared_ptr<const SurfaceProfile> {
            MetricParams q = p;
            q.k2 = k2;
            return std::make_shared<const MollifiedProfile>(std::make_shared<const ProfileG>(ProfileG::solve(q)), lam,
                                                            sigma);
        };
        out.gb = solve_gauss_bonnet(p, factory, opt.gb);
        if (!out.gb.feasible) {
            out.summary = "smoothed Gauss-Bonnet infeasible: " + out.gb.summary;
            return out;
        }
    } else {
        // Keep the piecewise apex, Delta and k2; only the profile is replaced.
        out.gb = piecewise;
        out.gb.profile = gl;
    }
    out.rel_change_k2 = std::abs(out.gb.params.k2 - p.k2) / p.k2;
    out.rel_change_Delta = std::abs(out.gb.params.Delta - p.Delta) / p.Delta;

    // Step 5: mollified f_i on the charts of the smoothed metric.
    const auto d = std::make_shared<const PolygonD>(assemble_polygon(out.gb, m));
    const std::vector<double> scales{4.0 * p.epsilon, p.mu};
    out.radial_bounds_ok = true;
    for (double mu : scales) {
        const DerivativeSup s = mollified_radial_function(mu, lam).sup_abs();
        out.radial_sup.value = std::max(out.radial_sup.value, s.value / mu);
        out.radial_sup.d1 = std::max(out.radial_sup.d1, s.d1);
        out.radial_sup.d2 = std::max(out.radial_sup.d2, s.d2 * mu);
        if (s.d1 > 1.0 + 1e-10 || s.d2 * mu > 1.0 + 1e-10 || s.value > mu + 1e-10) out.radial_bounds_ok = false;
    }
    const TotalMetric tm(d, mollified_radial(scales, lam));
    out.cert = certify(tm, kernel, opt.grid);
    out.min_bound = std::min(out.cert.min_X, out.cert.min_U);
    out.within_20 = std::abs(out.min_bound - piecewise_min_bound) <= 0.2 * std::abs(piecewise_min_bound);
    out.pass = out.cert.pass;
    sum << "lambda=" << lam << " k2=" << out.gb.params.k2 << " Delta=" << out.gb.params.Delta
        << " min bound=" << out.min_bound << " (" << (out.min_bound < out.cert.min_U ? out.cert.argmin_X_region
                                                                                    : out.cert.argmin_U_region)
        << ")";
    out.summary = sum.str();
    return out;
}

}  // namespace torusric
