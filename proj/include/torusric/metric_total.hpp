#pragma once

#include "torusric/quadrangle.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace torusric {

// F(rho) = mu sin(rho/mu) up to rho = (pi/2) mu, then the constant mu.
struct RadialValue {
    double f = 0.0;
    double df = 0.0;
    double ddf = 0.0;
};
RadialValue radial_profile(double mu, double rho);

// Replacement radial function (e.g. a mollified F); constant mu from rho >=
// breakpoint + plateau_shift.
struct RadialOverride {
    std::function<RadialValue(double mu, double rho)> fn;
    double plateau_shift = 0.0;
};

// Value and derivatives of f_i at a base point. Hessian components are in the
// orthonormal base frame (e_{-1}, e_0); fx..fyy are coordinate partials.
struct FiberEval {
    double f = 0.0;
    Vec2 grad;  // orthonormal components
    double h_aa = 0.0, h_ab = 0.0, h_bb = 0.0;
    double fx = 0.0, fy = 0.0, fxx = 0.0, fxy = 0.0, fyy = 0.0;
    bool plateau = true;       // outside the sine branch: f constant
    bool near_break = false;   // within `break_margin` of rho = (pi/2) mu
    std::optional<FermiCoords> fermi;
};

class FiberProfile {
public:
    FiberProfile(std::shared_ptr<const PolygonD> d, std::size_t index, double scale, double tube,
                 RadialOverride radial = {});
    std::size_t index() const { return index_; }  // 1-based, matches Gamma_index
    double scale() const { return mu_; }
    double breakpoint() const;
    const FermiChart& chart() const { return chart_; }
    // Throws ConvergenceError when the chart cannot resolve the foot.
    FiberEval eval(Point2 p, double break_margin = 0.0) const;

private:
    std::shared_ptr<const PolygonD> d_;
    std::size_t index_;
    double mu_;
    FermiChart chart_;
    RadialOverride radial_;
};

struct MetricCoefficients {
    // (1, G^2, f_1^2, ..., f_m^2) in (x, y, phi_1..phi_m), or (1, h^2, f...) in a Fermi chart.
    std::vector<double> diag;
};

class TotalMetric {
public:
    // Fibers: f_1 has scale 4 epsilon, the others mu.
    explicit TotalMetric(std::shared_ptr<const PolygonD> d, const RadialOverride& radial = {});
    const PolygonD& polygon() const { return *d_; }
    std::shared_ptr<const PolygonD> polygon_ptr() const { return d_; }
    const SurfaceProfile& base() const { return *d_->profile; }
    std::size_t m() const { return fibers_.size(); }
    const FiberProfile& fiber(std::size_t i) const { return fibers_.at(i); }  // 0-based
    std::vector<FiberEval> eval_all(Point2 p, double break_margin = 0.0) const;

private:
    std::shared_ptr<const PolygonD> d_;
    std::vector<FiberProfile> fibers_;
};

FiberEval eval_f(const FiberProfile& fp, Point2 p);
MetricCoefficients metric_at(const TotalMetric& tm, Point2 p);
// Fermi-block form in the chart of edge k (0-based): (1, h_k^2, f_1^2, ...).
MetricCoefficients metric_at_fermi(const TotalMetric& tm, std::size_t k, Point2 p);

// e^{-1} = dx, e^0 = G dy, e^i = f_i dphi_i at p.
struct Coframe {
    std::vector<double> scales;  // coefficient of each coordinate differential
};
Coframe coframe_at(const TotalMetric& tm, Point2 p);

struct DescentSample {
    std::string where;  // "edge 3", "vertex 2", "interior"
    Point2 p;
    std::vector<std::size_t> expected_kernel;  // 1-based fiber indices
    std::vector<std::size_t> kernel;
    bool ok = false;
};

struct DescentReport {
    bool pass = false;
    std::vector<DescentSample> samples;
    std::size_t failures = 0;
};

DescentReport descent_check(const TotalMetric& tm, std::size_t samples_per_edge = 8);

}  // namespace torusric
