#pragma once
// Plain reference numerics for the geometry tests: composite Simpson,
// central differences and a naive bisection. Nothing here calls the library's
// quadrature or root finders.

#include <cmath>
#include <functional>

namespace oracle {

inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

inline double d1(const std::function<double(double)>& f, double x, double h = 1e-5) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double d2(const std::function<double(double)>& f, double x, double h = 1e-4) {
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

inline double bisect(const std::function<double(double)>& f, double a, double b) {
    double fa = f(a);
    for (int i = 0; i < 200; ++i) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if ((fm > 0) == (fa > 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

// Standard bump exp(1/(u^2 - 1)) on (-1, 1), unnormalized.
inline double bump(double u) { return std::abs(u) < 1.0 ? std::exp(1.0 / (u * u - 1.0)) : 0.0; }

// Convolution of f with the normalized bump of radius lambda, by Simpson in u.
inline double mollify_at(const std::function<double(double)>& f, double x, double lambda, int n = 4000) {
    const double c = simpson(bump, -1.0, 1.0, n);
    return simpson([&](double u) { return bump(u) * f(x - lambda * u); }, -1.0, 1.0, n) / c;
}

}  // namespace oracle
