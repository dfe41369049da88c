#pragma once

#include "torusric/curvature.hpp"
#include "torusric/lattice.hpp"
#include "torusric/profile.hpp"
#include "torusric/quadrangle.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace torusric {

// eta_lambda(x) = eta(x/lambda)/lambda with eta(u) = C exp(1/(u^2 - 1)) on |u| < 1.
class MollifierKernel {
public:
    explicit MollifierKernel(double lambda);
    double lambda() const { return lambda_; }
    // C, from a one-dimensional quadrature of exp(1/(u^2 - 1)).
    static double normalization();
    double operator()(double x) const;
    double derivative(double x) const;
    // Quadrature of eta_lambda over its support.
    double mass() const;

private:
    double lambda_;
};

// A function on [a, b] that is smooth between breakpoints. eval returns the
// value and two derivatives; at a breakpoint `side` picks the one-sided limit.
struct PiecewiseSource {
    std::function<ProfileSample(double x, Side side)> eval;
    double a = 0.0;
    double b = 0.0;
    std::vector<double> breakpoints;
};

struct DerivativeSup {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

// f_lambda = eta_lambda * f on [a, b], stored as a quintic Hermite spline of
// (f_lambda, f_lambda', f_lambda''). Nodes are lambda/20 apart within 2 lambda
// of a breakpoint and at most `coarse` apart elsewhere.
class MollifiedFunction {
public:
    MollifiedFunction(PiecewiseSource src, double lambda, double a, double b, double coarse = 0.02,
                      unsigned threads = 0);
    ProfileSample eval(double x) const;
    // Direct convolution at x (no spline): value, (f')_lambda + jump terms, and
    // (f'')_lambda + jump terms.
    ProfileSample convolve(double x) const;
    // eta_lambda' * f, the other route to (f_lambda)'.
    double kernel_derivative_route(double x) const;
    // (f')_lambda without jump terms (only meaningful for continuous f).
    double derivative_route(double x) const;

    double lambda() const { return kernel_.lambda(); }
    double a() const { return a_; }
    double b() const { return b_; }
    const PiecewiseSource& source() const { return src_; }
    const std::vector<double>& nodes() const { return x_; }
    // Integral of the spline's second derivative over [lo, hi]: 3-point Gauss on
    // each node interval (exact for the cubic pieces), with prefix sums.
    double integrate_d2(double lo, double hi) const;
    // Suprema of |f_lambda|, |f_lambda'|, |f_lambda''| from the convolution at
    // nodes and midpoints.
    DerivativeSup sup_abs() const;

private:
    // Smooth-part convolutions of (f, f', f'') in one pass.
    ProfileSample conv_all(double x) const;
    double piece_d2(double lo, double hi) const;
    double cumulative_d2(double x) const;
    PiecewiseSource src_;
    MollifierKernel kernel_;
    double a_, b_;
    std::vector<double> jump_v_, jump_d_;  // value and slope jumps at the breakpoints
    std::vector<double> x_;
    std::vector<ProfileSample> y_;
    std::vector<double> cum_d2_;
};

// Requires lambda < sigma and the source defined on [a - sigma, b + lambda].
MollifiedFunction mollify(const PiecewiseSource& f, double a, double b, double lambda, double sigma);

// Spline samples (nodes and midpoints) within [lower, upper] up to 1e-10.
bool bounds_preserved(const MollifiedFunction& mf, double lower, double upper);
// Maximum of |(f')_lambda - eta_lambda' * f| over n interior points.
double commutation_error(const MollifiedFunction& mf, std::size_t n = 101);

struct ConvergenceRow {
    double lambda = 0.0;
    double sup_distance = 0.0;
    double bad_measure = 0.0;  // NaN when not computed
    DerivativeSup sup_source;
    DerivativeSup sup_mollified;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    bool strictly_decreasing = false;
    bool monotone_within_slack = false;  // each step at most 1.1x the previous
    bool all_finite = false;
};

// sup |f_lambda - f| over [a, b] for each lambda of the ladder.
ConvergenceReport convergence_report(const PiecewiseSource& f, double a, double b,
                                     const std::vector<double>& ladder, double sigma_factor = 4.0);

// The first-piece continuation of G to the left of -delta, as a source on
// [-delta - sigma, domain_end).
PiecewiseSource extended_profile_source(std::shared_ptr<const ProfileG> g, double sigma);

// Smooth warping profile G_lambda, restricted to [-delta, end].
class MollifiedProfile final : public SurfaceProfile {
public:
    MollifiedProfile(std::shared_ptr<const ProfileG> g, double lambda, double sigma = 0.0, double end = 0.0);
    ProfileSample eval(double x, Side side = Side::Right) const override;
    double domain_start() const override { return f_.a(); }
    double domain_end() const override { return f_.b(); }
    std::vector<double> breakpoints() const override { return {}; }
    // Edges and centres of the smoothed kinks.
    std::vector<double> features() const override;
    // Step control follows the spacing of the original breakpoints.
    double feature_gap() const override;
    // -int G_lambda'' dx over the spline pieces.
    double strip_density(double a, double b) const override;
    const ProfileG& source() const { return *g_; }
    const MollifiedFunction& function() const { return f_; }
    double lambda() const { return f_.lambda(); }

private:
    std::shared_ptr<const ProfileG> g_;
    MollifiedFunction f_;
};

// Measure of {x in [a, b] : |K_lambda(x) - K(x)| > threshold}.
double curvature_in_measure(const ProfileG& g, const MollifiedProfile& gl, double a, double b,
                            double threshold = 0.1);

// Default right end of the convergence compact: 2 eps + (x_right - 2 eps)/2.
double default_beta(const MetricParams& p, double x_right);

// F_lambda for one scale on [-2 lambda, (pi/2) mu + lambda]; constant mu beyond.
MollifiedFunction mollified_radial_function(double mu, double lambda);

// Mollified radial profiles F_lambda for the scales in use (odd extension
// below rho = 0), packaged for TotalMetric.
RadialOverride mollified_radial(const std::vector<double>& scales, double lambda);

enum class ChartMode { Recompute, Reuse };

struct SmoothOptions {
    double lambda = 1e-4;
    double sigma = 0.0;  // 0: 4 lambda
    double beta = 0.0;   // 0: default_beta
    ChartMode charts = ChartMode::Recompute;
    GaussBonnetOptions gb;
    GridSpec grid;
};

struct SmoothResult {
    double lambda = 0.0;
    double sigma = 0.0;
    GaussBonnetResult gb;
    double rel_change_k2 = 0.0;
    double rel_change_Delta = 0.0;
    double sup_distance = 0.0;  // sup |G_lambda - G| on [-delta, beta]
    double bad_measure = 0.0;
    double beta = 0.0;
    DerivativeSup radial_sup;   // max over scales of |F|/mu, |F'|, mu |F''| (all should stay <= 1)
    bool radial_bounds_ok = false;
    CertificationReport cert;
    double min_bound = 0.0;     // min(min ric_X, min ric_U)
    bool within_20 = false;     // relative to the piecewise minimum
    bool pass = false;
    std::string summary;
};

// Smoothing pipeline: mollify G, re-solve Gauss-Bonnet, rebuild the polygon
// and charts, mollify the f_i and re-certify. `piecewise` supplies the
// reference solution and minimum bound.
SmoothResult smooth_pipeline(const GaussBonnetResult& piecewise, double piecewise_min_bound, std::size_t m,
                             const KernelLattice& kernel, const SmoothOptions& opt);

}  // namespace torusric
