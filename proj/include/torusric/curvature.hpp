#pragma once

#include "torusric/lattice.hpp"
#include "torusric/metric_total.hpp"

#include <string>
#include <vector>

namespace torusric {

// Nonzero pattern of the curvature tensor in an orthonormal coframe
// (e^{-1}, e^0, e^1..e^m), with R_abab the sectional curvature of (e_a, e_b).
struct CurvatureComponents {
    std::size_t m = 0;
    double R_m10m10 = 0.0;
    std::vector<double> R_m1i;               // R_{-1 i -1 i}
    std::vector<double> R_0i;                // R_{0 i 0 i}
    std::vector<double> R_m1i0i;             // R_{-1 i 0 i}
    std::vector<std::vector<double>> R_ij;   // R_{i j i j}, zero diagonal
};

// Base point data shared by the curvature evaluations.
struct PointGeometry {
    Point2 p;
    ProfileSample g;
    double K = 0.0;
    std::vector<FiberEval> f;
};

PointGeometry point_geometry(const TotalMetric& tm, Point2 p, double break_margin = 0.0);

CurvatureComponents components_base(const TotalMetric& tm, Point2 p);
CurvatureComponents components_base(const PointGeometry& pg);
// Components in the Fermi frame (e_rho, e_psi) of edge k (0-based).
CurvatureComponents components_fermi(const TotalMetric& tm, std::size_t k, Point2 p);
// Base-frame components expressed in the orthonormal frame (e1, e2).
CurvatureComponents rotate_components(const CurvatureComponents& c, Vec2 e1, Vec2 e2);
double max_difference(const CurvatureComponents& a, const CurvatureComponents& b);

struct HorizontalFrame {
    std::size_t n = 0;
    std::vector<std::vector<double>> c;  // c[i][l]: U_i = sum_l c[i][l] (1/f_l) d/dphi_l
    std::vector<double> weight;          // sum_i c[i][l]^2
    double c_min = 0.0;
    double orthonormality_residual = 0.0;
    double kernel_residual = 0.0;
};

HorizontalFrame horizontal_frame(const std::vector<double>& f, const KernelLattice& kernel);
HorizontalFrame horizontal_frame(const TotalMetric& tm, const KernelLattice& kernel, Point2 p);

// Coordinates of a unit base vector X against the frames of the regional
// decomposition: (x1, x2) and (y1, y2) in the Fermi frames of the two nearest
// active edges (i, i+1), (z1, z2) in the base frame used by f_1.
struct DirectionParams {
    double x1 = 1.0, x2 = 0.0;
    double y1 = 1.0, y2 = 0.0;
    double z1 = 1.0, z2 = 0.0;
};

struct XBound {
    double value = 0.0;
    DirectionParams params;
};

// K + sum_i R(X, U_i, X, U_i) for X = cos(theta) e_{-1} + sin(theta) e_0.
XBound ricci_X_bound(const PointGeometry& pg, const HorizontalFrame& frame, double theta);
// Minimum over all unit X (smallest eigenvalue of the quadratic form).
double ricci_X_bound_min(const PointGeometry& pg, const HorizontalFrame& frame);
// R(X,U_i,X,U_i) + R(X~,U_i,X~,U_i) + sum_{j != i} K_ij.
double ricci_U_bound(const PointGeometry& pg, const HorizontalFrame& frame, std::size_t i);

struct GridSpec {
    std::size_t rows = 25;
    std::size_t cols = 25;
    std::size_t directions = 16;
    std::size_t tube_feet = 12;
    std::vector<double> tube_depths{0.02, 0.25, 0.5, 0.95};  // fractions of (pi/2) mu_i
    double breakpoint_offset = 1e-7;
    std::size_t breakpoint_rows = 16;
    double boundary_margin = 1e-4;
    double break_margin = 1e-6;
    unsigned threads = 0;  // 0: hardware concurrency
};

struct RicciSample {
    Point2 p;
    std::string region;
    double min_X = 0.0;        // over the direction grid
    double min_X_exact = 0.0;  // over all directions
    std::vector<double> U;
    double min_U = 0.0;
    double c_min = 0.0;
    DirectionParams argmin_dir;
    bool deep_interior = false;
    bool flag = false;  // one-sided evaluation at a breakpoint
    std::string error;
};

struct CertificationReport {
    GridSpec grid;
    std::size_t base_points = 0;
    std::size_t samples = 0;  // base points x directions
    double min_X = 0.0;
    double min_U = 0.0;
    Point2 argmin_X;
    Point2 argmin_U;
    std::string argmin_X_region;
    std::string argmin_U_region;
    double deep_interior_max_dev = 0.0;  // |ric_X - 1/k2^2| over deep-interior samples
    std::size_t deep_interior_count = 0;
    double c_min = 0.0;
    std::size_t errors = 0;
    std::size_t flagged = 0;
    bool pass = false;
    std::vector<RicciSample> rows;
};

std::vector<Point2> certification_points(const PolygonD& d, const GridSpec& grid);
CertificationReport certify(const TotalMetric& tm, const KernelLattice& kernel, const GridSpec& grid = {});
std::string certification_csv(const CertificationReport& r);

// Curvature tensor from finite differences of the metric coefficients, in the
// orthonormal coframe; index 0 = e_{-1}, 1 = e_0, 1 + i = e_i.
struct FdCurvature {
    std::size_t dim = 0;
    std::vector<double> R;  // R[((a*dim + b)*dim + c)*dim + d] = <R(e_a, e_b) e_d, e_c>
    double bianchi_residual = 0.0;
    double at(std::size_t a, std::size_t b, std::size_t c, std::size_t d) const {
        return R[((a * dim + b) * dim + c) * dim + d];
    }
};

FdCurvature fd_oracle(const TotalMetric& tm, Point2 p, double step = 1e-4);
// Same, for an arbitrary diagonal metric given by its coefficient function.
FdCurvature fd_oracle_diag(const std::function<std::vector<double>(double, double)>& diag, Point2 p,
                           double step = 1e-4);
// Full tensor implied by the closed-form pattern, in the FdCurvature layout.
FdCurvature expand_components(const CurvatureComponents& c);
double max_deviation(const FdCurvature& a, const FdCurvature& b);

std::string region_of(const PointGeometry& pg, const MetricParams& p);

}  // namespace torusric
