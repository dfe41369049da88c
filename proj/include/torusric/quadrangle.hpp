#pragma once

#include "torusric/ode.hpp"
#include "torusric/profile.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace torusric {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

// Components in the orthonormal base frame (e_{-1} = d/dx, e_0 = (1/G) d/dy).
struct Vec2 {
    double a = 0.0;
    double b = 0.0;
};

using Geo4 = DormandPrince<4>;

struct GeodesicSample {
    double s = 0.0;
    double x = 0.0;
    double y = 0.0;
    double dx = 0.0;  // dx/ds
    double dy = 0.0;  // dy/ds
};

struct GeodesicOptions {
    double rtol = 1e-12;
    double atol = 1e-12;
    double h_max = 0.05;
};

class GeodesicPath {
public:
    std::shared_ptr<const SurfaceProfile> profile;
    std::vector<Geo4::Step> steps;       // dense output
    std::vector<GeodesicSample> samples; // step endpoints
    double clairaut = 0.0;               // G^2 dy/ds at the start
    bool truncated = false;
    std::string flag;

    double length() const { return samples.empty() ? 0.0 : samples.back().s; }
    GeodesicSample at(double s) const;
    // Angle of the unit tangent from +x in the orthonormal frame.
    double tangent_angle(const GeodesicSample& q) const;
    // First arclength at which y(s) = y (y must be monotone along the path).
    double s_at_y(double y) const;
    double x_at_y(double y) const { return at(s_at_y(y)).x; }
    double max_speed_error() const;
    double max_clairaut_drift() const;
    GeodesicPath reversed() const;
};

GeodesicPath shoot_geodesic(std::shared_ptr<const SurfaceProfile> g, Point2 start, double angle, double length,
                            const GeodesicOptions& opt = {});

// Boundary-value solve by shooting on the initial angle (secant with bracketing).
// `angle_hint` seeds the iteration when several geodesics join p and q.
GeodesicPath connect_geodesic(std::shared_ptr<const SurfaceProfile> g, Point2 p, Point2 q,
                              std::optional<double> angle_hint = std::nullopt, const GeodesicOptions& opt = {});

struct QuadrangleSpec {
    MetricParams params;
    std::shared_ptr<const SurfaceProfile> profile;
    GeodesicPath gamma;  // from (r, 0) to (r, Delta)
};

// Integral of K dA over the region between x = -delta and gamma, y in [0, Delta],
// including the distributional line term at kinks of G.
double total_curvature(const QuadrangleSpec& q, double* error_estimate = nullptr);
// Same quantity over a coordinate rectangle [a, b] x [0, height], by 2D quadrature.
double rectangle_curvature(const SurfaceProfile& g, double a, double b, double height);
// Closed form of the total curvature: -int_0^Delta G'(X(y)) dy.
double total_curvature_closed_form(const QuadrangleSpec& q);

struct CornerAngles {
    double bottom = 0.0;
    double top = 0.0;
};
CornerAngles corner_angles(const QuadrangleSpec& q);

using ProfileFactory = std::function<std::shared_ptr<const SurfaceProfile>(double k2)>;

struct GaussBonnetOptions {
    std::vector<double> k2_ladder{10.0, 20.0, 40.0, 80.0};
    double target = -1.5707963267948966;
    double apex_offset = -1.0;  // apex at 2eps + offset; negative selects mu1/2
    double max_length = 400.0;
    double total_tol = 1e-6;
    double scan_samples = 8;    // quadrature confirmations per infeasible attempt
};

struct ScanSample {
    double Delta = 0.0;
    double r = 0.0;
    double total_ode = 0.0;        // accumulated along the apex shot
    double total_quadrature = 0.0; // independent quadrature (NaN when not computed)
    double bound = 0.0;            // Delta * sinh(nu)
};

struct GaussBonnetAttempt {
    double k2 = 0.0;
    bool feasible = false;
    std::string reason;
    std::vector<ScanSample> scan;
    double min_total_minus_bound = 0.0;  // principal-branch evidence
};

struct GaussBonnetResult {
    bool feasible = false;
    MetricParams params;  // k2, x0, Delta, r filled on success
    std::shared_ptr<const SurfaceProfile> profile;
    double apex_x = 0.0;
    double half_length = 0.0;
    double total = 0.0;           // quadrature
    double total_closed_form = 0.0;
    double endpoint_error = 0.0;
    CornerAngles angles;
    double min_distance = 0.0;  // closest approach of gamma to x = 2eps
    double max_distance = 0.0;
    GeodesicPath gamma;
    std::vector<GaussBonnetAttempt> attempts;
    std::string summary;
};

GaussBonnetResult solve_gauss_bonnet(const MetricParams& params, const ProfileFactory& factory,
                                     const GaussBonnetOptions& opt = {});

// Canonical arc: geodesic through (apex_x, 0) with tangent +y at psi = 0,
// extended to negative psi by the y-reflection symmetry.
class ApexGeodesic {
public:
    ApexGeodesic() = default;
    ApexGeodesic(std::shared_ptr<const SurfaceProfile> g, double apex_x, double psi_max);
    // Position and unit tangent (coordinates) at psi; |psi| <= psi_max.
    GeodesicSample at(double psi) const;
    // psi >= 0 with y(psi) = yhat, for 0 <= yhat <= y(psi_max).
    double psi_at_y(double yhat) const;
    double psi_max() const { return psi_max_; }
    double spacing() const { return spacing_; }
    const std::vector<GeodesicSample>& checkpoints() const { return cps_; }

private:
    GeodesicSample advance(const GeodesicSample& from, double ds) const;
    std::shared_ptr<const SurfaceProfile> g_;
    double psi_max_ = 0.0;
    double spacing_ = 0.02;
    std::vector<GeodesicSample> cps_;
};

enum class EdgeKind { Left, Top, Bottom, Arc };

struct EdgeInfo {
    std::size_t label = 0;  // 1-based, Gamma_label
    EdgeKind kind = EdgeKind::Left;
    double psi_min = 0.0;
    double psi_max = 0.0;
    double apex_y = 0.0;    // arcs: y of the apex
    int inward_sign = 1;    // inward normal = inward_sign * (left rotation of tangent)
};

struct VertexInfo {
    std::size_t label = 0;  // F_label sits between Gamma_label and Gamma_label+1
    Point2 p;
    double angle = 0.0;
    double target = 1.5707963267948966;
};

class PolygonD {
public:
    MetricParams params;
    std::shared_ptr<const SurfaceProfile> profile;
    std::size_t m = 0;
    double Delta = 0.0;
    double H = 0.0;
    double r = 0.0;
    double apex_x = 0.0;
    double half_length = 0.0;
    ApexGeodesic arc;
    std::vector<EdgeInfo> edges;
    std::vector<VertexInfo> vertices;

    // Edge point at parameter psi (x = -delta edge uses psi = y).
    GeodesicSample edge_point(std::size_t i, double psi) const;  // 0-based edge index
    double right_boundary(double y) const;                     // X_D(y)
    bool contains(Point2 p, double margin = 0.0) const;
    std::size_t edge_count() const { return edges.size(); }
};

PolygonD assemble_polygon(const GaussBonnetResult& gb, std::size_t m);

// CSV of edge polylines and vertex angles.
std::string polygon_csv(const PolygonD& d, std::size_t samples_per_edge = 200);

struct FermiCoords {
    double rho = 0.0;
    double psi = 0.0;
    double h = 1.0;      // transverse profile (metric d rho^2 + h^2 d psi^2)
    double h_rho = 0.0;  // dh/drho
    Vec2 e_rho;          // unit gradient of rho, orthonormal base components
    Vec2 e_psi;          // unit vector along d/dpsi
    int piece = 0;       // piece of the profile containing the point
};

struct NormalShot {
    Point2 p;
    Vec2 T;  // unit tangent of the normal geodesic at its end
    double h = 1.0;
    double h_rho = 0.0;
};

class FermiChart {
public:
    FermiChart(const PolygonD& d, std::size_t edge, double tube_radius);
    std::size_t edge() const { return edge_; }
    double tube_radius() const { return tube_; }
    // nullopt when the point is outside the tube; throws ConvergenceError if the
    // foot cannot be resolved.
    std::optional<FermiCoords> try_locate(Point2 p) const;
    // Throws DomainError outside the tube.
    FermiCoords locate(Point2 p) const;
    NormalShot exp_normal(double psi, double rho) const;

private:
    std::optional<double> seed_psi(Point2 p) const;
    const PolygonD* d_;
    std::size_t edge_;
    double tube_;
    double g_lower_ = 0.0;
};

FermiChart fermi_chart(const PolygonD& d, std::size_t edge, double tube_radius);
// Default tube for an edge with fiber scale mu_i: slightly past (pi/2) mu_i,
// capped at 0.9 of the focal radius estimate.
double default_tube_radius(const PolygonD& d, double mu_i);

// Base metric inner product helpers.
inline Vec2 to_frame(const SurfaceProfile& g, double x, double dx, double dy) {
    return {dx, g.eval(x).g * dy};
}

int profile_piece(const MetricParams& p, double x);

}  // namespace torusric
