#include "torusric/profile.hpp"

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

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

std::string to_string(Branch b) { return b == Branch::Principal ? "principal" : "shifted"; }

Branch branch_from_string(const std::string& s) {
    if (s == "principal") return Branch::Principal;
    if (s == "shifted") return Branch::Shifted;
    throw PreconditionError("branch: expected 'principal' or 'shifted', got '" + s + "'");
}

void check_profile_params(double eps, double delta, double nu) {
    if (!(eps > 0)) throw PreconditionError("epsilon must be positive");
    if (!(nu > 0)) throw PreconditionError("nu must be positive");
    if (!(delta > nu)) throw PreconditionError("delta must exceed nu (got delta=" + fmt(delta) + ", nu=" + fmt(nu) + ")");
    if (!(eps * (kPi - 1.0) > delta))
        throw PreconditionError("epsilon*(pi-1) must exceed delta (got " + fmt(eps * (kPi - 1.0)) + " <= " +
                                fmt(delta) + ")");
}

void MetricParams::validate() const {
    check_profile_params(epsilon, delta, nu);
    if (!(Delta > 0)) throw PreconditionError("Delta must be positive");
    if (!(k2 > 0)) throw PreconditionError("k2 must be positive");
    if (!(mu1 > 0) || mu1 > epsilon * (kPi - 1.0))
        throw PreconditionError("mu1 must lie in (0, epsilon*(pi-1)] (got " + fmt(mu1) + ")");
    if (!(mu > 0)) throw PreconditionError("mu must be positive");
    if (mu > 2.0 * kPi * mu1) throw PreconditionError("mu must not exceed 2*pi*mu1 (got mu=" + fmt(mu) + ")");
    if (!(mu < epsilon)) throw PreconditionError("mu must be smaller than epsilon (got mu=" + fmt(mu) + ")");
    if (r != 0.0 && !(r > 2.0 * epsilon)) throw PreconditionError("r must exceed 2*epsilon (got " + fmt(r) + ")");
}

double SurfaceProfile::derivative_jump(double b) const { return eval(b, Side::Right).dg - eval(b, Side::Left).dg; }

double SurfaceProfile::gauss_curvature(double x, Side side) const {
    const ProfileSample s = eval(x, side);
    return -s.ddg / s.g;
}

double SurfaceProfile::feature_gap() const {
    auto f = features();
    std::sort(f.begin(), f.end());
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < f.size(); ++i) gap = std::min(gap, f[i] - f[i - 1]);
    return gap;
}

int SurfaceProfile::substeps(double x, double len, int base) const {
    const double gap = feature_gap();
    if (!std::isfinite(gap)) return base;
    bool near = false;
    for (double f : features())
        if (std::abs(x - f) < len + gap) near = true;
    if (!near) return base;
    return std::max(base, static_cast<int>(std::ceil(len / (gap / 8.0))));
}

double SurfaceProfile::kink_sum(double a, double b) const {
    double s = 0.0;
    for (double bp : breakpoints())
        if (bp > a && bp < b) s += derivative_jump(bp);
    return s;
}

double SurfaceProfile::strip_density(double a, double b) const {
    const double smooth = integrate([this](double x) { return -eval(x).ddg; }, a, b, 1e-13, features());
    return smooth - kink_sum(a, b);
}

ProfileG ProfileG::solve(MetricParams p, bool printed_amplitude) {
    check_profile_params(p.epsilon, p.delta, p.nu);
    if (!(p.k2 > 0)) throw PreconditionError("k2 must be positive");
    p.k1 = solve_k1(p.epsilon, p.delta, p.nu);
    p.x0 = solve_x0(p.epsilon, p.nu, p.k2, p.branch).x0;
    return ProfileG(p, printed_amplitude);
}

ProfileG::ProfileG(const MetricParams& p, bool printed_amplitude) : p_(p), printed_(printed_amplitude) {
    check_profile_params(p.epsilon, p.delta, p.nu);
    if (!(p.k1 > 0) || !(p.k2 > 0)) throw PreconditionError("ProfileG: k1 and k2 must be positive (solve first)");
    const double se = std::sinh(p.epsilon + p.nu);
    c1_ = std::sqrt(1.0 + (1.0 + p.k1 * p.k1) * se * se);
    const double s3 = printed_amplitude ? se : std::sinh(p.nu);
    c2_ = std::sqrt(1.0 + (1.0 + p.k2 * p.k2) * s3 * s3);
}

double ProfileG::domain_end() const { return p_.x0 + p_.k2 * kPi / 2.0; }

ProfileSample ProfileG::eval_piece(int piece, double x) const {
    const MetricParams& p = p_;
    if (piece == 0) {
        const double u = (x + p.delta) / p.k1;
        return {c1_ * std::cos(u), -c1_ / p.k1 * std::sin(u), -c1_ / (p.k1 * p.k1) * std::cos(u)};
    }
    if (piece == 1) {
        const double u = x - 2.0 * p.epsilon - p.nu;
        return {std::cosh(u), std::sinh(u), std::cosh(u)};
    }
    const double u = (x - p.x0) / p.k2;
    return {c2_ * std::cos(u), -c2_ / p.k2 * std::sin(u), -c2_ / (p.k2 * p.k2) * std::cos(u)};
}

ProfileSample ProfileG::eval_extended(double x, Side side) const {
    const double e = p_.epsilon;
    int piece;
    if (x < e || (x == e && side == Side::Left))
        piece = 0;
    else if (x < 2.0 * e || (x == 2.0 * e && side == Side::Left))
        piece = 1;
    else
        piece = 2;
    if (piece == 2 && x >= domain_end())
        throw DomainError("G: x=" + fmt(x) + " beyond the zero of the third piece at " + fmt(domain_end()));
    return eval_piece(piece, x);
}

ProfileSample ProfileG::eval(double x, Side side) const {
    // Tolerate rounding-level undershoot of the left edge (the edge is itself a geodesic).
    if (x < -p_.delta - 1e-9) throw DomainError("G: x=" + fmt(x) + " left of -delta");
    return eval_extended(x, side);
}

double solve_k1(double eps, double delta, double nu) {
    check_profile_params(eps, delta, nu);
    const double t = std::tanh(eps + nu);
    const double a = eps + delta;
    const auto residual = [&](double k) { return t - std::tan(a / k) / k; };
    const double lo = 2.0 * a / kPi * (1.0 + 1e-12);
    const double hi = 100.0;
    if ((residual(lo) > 0) == (residual(hi) > 0)) throw ConvergenceError("solve_k1: no sign change in bracket");
    double k = bisect(residual, lo, hi, 1e-13);
    // Newton polish: r'(k) = tan(u)/k^2 + sec^2(u) a/k^3 with u = a/k.
    const double u = a / k;
    const double c = std::cos(u);
    const double dr = std::tan(u) / (k * k) + a / (k * k * k * c * c);
    k -= residual(k) / dr;
    if (std::abs(residual(k)) >= 1e-12) throw ConvergenceError("solve_k1: residual above 1e-12");
    return k;
}

X0Solution solve_x0(double eps, double nu, double k2, Branch branch) {
    if (!(k2 > 0)) throw PreconditionError("solve_x0: k2 must be positive");
    const double th = std::atan(k2 * std::tanh(nu));
    if (branch == Branch::Principal) return {2.0 * eps - k2 * th, false};
    // The reflected root 2eps + k2(pi - th) puts 2eps past the zero of the cosine;
    // the admissible shifted root keeps G > 0 and matches only values at 2eps.
    return {2.0 * eps + k2 * th, true};
}

CurvatureValue gauss_curvature(const SurfaceProfile& g, double x, Side side) {
    CurvatureValue v;
    for (double b : g.breakpoints())
        if (std::abs(x - b) <= 1e-12 * std::max(1.0, std::abs(b))) v.at_breakpoint = true;
    v.K = g.gauss_curvature(x, side);
    return v;
}

ContinuityReport continuity_report(const ProfileG& g) {
    const double e = g.params().epsilon;
    ContinuityReport r;
    const ProfileSample a1 = g.eval(e, Side::Left), b1 = g.eval(e, Side::Right);
    const ProfileSample a2 = g.eval(2 * e, Side::Left), b2 = g.eval(2 * e, Side::Right);
    r.value_jump_eps = b1.g - a1.g;
    r.deriv_jump_eps = b1.dg - a1.dg;
    r.value_jump_2eps = b2.g - a2.g;
    r.deriv_jump_2eps = b2.dg - a2.dg;
    r.kink = r.deriv_jump_2eps;
    const ProfileG printed(g.params(), true);
    r.printed_value_jump_2eps = printed.eval(2 * e, Side::Right).g - printed.eval(2 * e, Side::Left).g;
    r.c1 = std::abs(r.value_jump_eps) < 1e-9 && std::abs(r.deriv_jump_eps) < 1e-9 &&
           std::abs(r.value_jump_2eps) < 1e-9 && std::abs(r.deriv_jump_2eps) < 1e-9;
    return r;
}

}  // namespace torusric
