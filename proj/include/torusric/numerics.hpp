#pragma once

#include <functional>
#include <vector>

namespace torusric {

using Fn1 = std::function<double(double)>;

// Adaptive Gauss-Kronrod (15-point) quadrature of f over [a, b], split at the
// given interior breakpoints so that every panel sees a smooth integrand.
double integrate(const Fn1& f, double a, double b, double tol = 1e-13, const std::vector<double>& breaks = {},
                 double* error_estimate = nullptr);

// Bisection for a sign change of f in [a, b]; throws ConvergenceError if the
// endpoints do not bracket a root.
double bisect(const Fn1& f, double a, double b, double xtol = 1e-15, int max_iter = 400);

// TOMS 748 bracketing root solve (boost) to near machine precision.
double bracket_root(const Fn1& f, double a, double b, int max_iter = 200);

// Brent minimization of f on [a, b] (golden section with parabolic steps).
double minimize(const Fn1& f, double a, double b, int bits = 52);

// Runs body(i) for i in [0, n) on `threads` workers (0: hardware concurrency).
// Results must be written by index; the call returns after all are done.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, unsigned threads = 0);

// Deterministic uniform nodes: n points including both ends.
std::vector<double> linspace(double a, double b, std::size_t n);

}  // namespace torusric
