#pragma once
// Solved reference geometry shared by the metric and curvature tests.

#include "torusric/metric_total.hpp"
#include "torusric/orbit_space.hpp"
#include "torusric/quadrangle.hpp"

#include <memory>

namespace fixture {

inline const torusric::GaussBonnetResult& shifted_gb() {
    using namespace torusric;
    static const GaussBonnetResult gb = [] {
        MetricParams p;
        return solve_gauss_bonnet(p, [p](double k2) -> std::shared_ptr<const SurfaceProfile> {
            MetricParams q = p;
            q.k2 = k2;
            return std::make_shared<const ProfileG>(ProfileG::solve(q));
        });
    }();
    return gb;
}

inline std::shared_ptr<const torusric::PolygonD> polygon(std::size_t m = 5) {
    return std::make_shared<const torusric::PolygonD>(torusric::assemble_polygon(shifted_gb(), m));
}

// m = 5, n = 3 legally weighted disk.
inline torusric::WeightedDisk disk53() {
    return torusric::WeightedDisk::from_ll(3, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {0, 1, 1}});
}

}  // namespace fixture
