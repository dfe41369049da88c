#include "torusric/numerics.hpp"

#include "torusric/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>

namespace torusric {

double integrate(const Fn1& f, double a, double b, double tol, const std::vector<double>& breaks,
                 double* error_estimate) {
    if (a == b) {
        if (error_estimate) *error_estimate = 0.0;
        return 0.0;
    }
    const double sgn = b > a ? 1.0 : -1.0;
    const double lo = std::min(a, b), hi = std::max(a, b);
    std::vector<double> nodes{lo};
    for (double x : breaks)
        if (x > lo && x < hi) nodes.push_back(x);
    nodes.push_back(hi);
    std::sort(nodes.begin(), nodes.end());
    double total = 0.0, err_total = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        if (nodes[i + 1] <= nodes[i]) continue;
        // Each panel is mapped onto [0, 1]: Boost compares the unscaled panel error
        // against a scaled tolerance, which never terminates on very short panels.
        const double x0 = nodes[i], w = nodes[i + 1] - nodes[i];
        const auto unit = [&](double t) { return f(x0 + w * t); };
        double err = 0.0;
        total += w * boost::math::quadrature::gauss_kronrod<double, 15>::integrate(unit, 0.0, 1.0, 15, tol, &err);
        err_total += err * w;
    }
    if (error_estimate) *error_estimate = err_total;
    return sgn * total;
}

double bisect(const Fn1& f, double a, double b, double xtol, int max_iter) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0) == (fb > 0)) throw ConvergenceError("bisect: endpoints do not bracket a root");
    for (int it = 0; it < max_iter && std::abs(b - a) > xtol; ++it) {
        const double m = 0.5 * (a + b);
        if (m == a || m == b) break;
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm > 0) == (fa > 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    return 0.5 * (a + b);
}

double bracket_root(const Fn1& f, double a, double b, int max_iter) {
    const double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0) == (fb > 0)) throw ConvergenceError("bracket_root: endpoints do not bracket a root");
    std::uintmax_t iters = static_cast<std::uintmax_t>(max_iter);
    const auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52),
                                                     iters);
    return 0.5 * (r.first + r.second);
}

double minimize(const Fn1& f, double a, double b, int bits) {
    return boost::math::tools::brent_find_minima(f, a, b, bits).first;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, unsigned threads) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, n)));
    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        for (std::size_t i = next++; i < n; i = next++) body(i);
    };
    if (threads <= 1) {
        worker();
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = a;
        return v;
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

}  // namespace torusric
