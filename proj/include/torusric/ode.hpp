#pragma once

#include "torusric/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace torusric {

// Dormand-Prince 5(4) with Hairer's 4th-order dense output and event location.
// Steps that contain an event are redone so that they end exactly on it; this
// is what lets piecewise right-hand sides restart cleanly at breakpoints.
template <std::size_t N>
class DormandPrince {
public:
    using State = std::array<double, N>;
    using Rhs = std::function<void(double, const State&, State&)>;

    struct Options {
        double rtol = 1e-12;
        double atol = 1e-12;
        double h_init = 1e-3;
        double h_max = 0.1;
        double fixed_step = 0.0;  // > 0 selects fixed stepping
        long max_steps = 2000000;
    };

    struct Event {
        std::function<double(double, const State&)> g;
        bool terminal = true;
        // Optional state update applied at the event (non-terminal events).
        std::function<void(double, State&)> apply;
    };

    struct Step {
        double t0 = 0.0;
        double h = 0.0;
        std::array<State, 5> rcont{};
    };

    struct Result {
        double t = 0.0;
        State y{};
        int event = -1;           // index of the terminal event that stopped integration
        bool completed = false;   // reached t_end
        bool domain_exit = false; // right-hand side left its domain
        std::vector<Step> steps;  // dense output, if requested
    };

    static State dense(const Step& s, double t) {
        const double th = (t - s.t0) / s.h;
        const double th1 = 1.0 - th;
        State y;
        for (std::size_t i = 0; i < N; ++i)
            y[i] = s.rcont[0][i] +
                   th * (s.rcont[1][i] + th1 * (s.rcont[2][i] + th * (s.rcont[3][i] + th1 * s.rcont[4][i])));
        return y;
    }

    static State dense_derivative(const Step& s, double t) {
        const double th = (t - s.t0) / s.h;
        const double th1 = 1.0 - th;
        State d;
        for (std::size_t i = 0; i < N; ++i) {
            const double r2 = s.rcont[1][i], r3 = s.rcont[2][i], r4 = s.rcont[3][i], r5 = s.rcont[4][i];
            // d/dth of th*(r2 + th1*(r3 + th*(r4 + th1*r5)))
            const double inner = r4 + th1 * r5;
            const double mid = r3 + th * inner;
            const double dmid = inner + th * (-r5);
            d[i] = (r2 + th1 * mid + th * (-mid + th1 * dmid)) / s.h;
        }
        return d;
    }

    Result integrate(const Rhs& f, double t0, State y0, double t_end, const std::vector<Event>& events,
                     const Options& opt, bool keep_dense = false) const {
        Result res;
        const double dir = t_end >= t0 ? 1.0 : -1.0;
        double t = t0;
        State y = y0;
        State k1;
        if (!safe_rhs(f, t, y, k1)) {
            res.t = t;
            res.y = y;
            res.domain_exit = true;
            return res;
        }
        std::vector<int> last_sign(events.size());
        for (std::size_t e = 0; e < events.size(); ++e) last_sign[e] = sign(events[e].g(t, y));

        double h = opt.fixed_step > 0 ? opt.fixed_step : std::min(opt.h_init, opt.h_max);
        int domain_failures = 0;
        for (long nstep = 0; nstep < opt.max_steps; ++nstep) {
            const double remaining = (t_end - t) * dir;
            if (remaining <= 1e-15 * std::max(1.0, std::abs(t_end))) {
                res.completed = true;
                break;
            }
            h = std::min(h, remaining);
            if (opt.fixed_step > 0) h = std::min(opt.fixed_step, remaining);

            State y1, k7;
            Step st;
            Stages stages;
            const bool ok = attempt(f, t, y, k1, dir * h, y1, k7, st, &stages);
            if (!ok) {
                if (++domain_failures > 60 || h < 1e-14) {
                    res.domain_exit = true;
                    break;
                }
                h *= 0.25;
                continue;
            }
            double err = 0.0;
            if (opt.fixed_step <= 0) {
                err = error_norm(y, y1, stages, dir * h, k1, k7, opt);
                if (!(err <= 1.0)) {
                    const double fac = std::isfinite(err) ? std::max(0.1, 0.9 * std::pow(err, -0.2)) : 0.1;
                    h *= fac;
                    if (h < 1e-15) throw ConvergenceError("DormandPrince: step size underflow");
                    continue;
                }
            }
            domain_failures = 0;

            // Event detection on the accepted step.
            int hit = -1;
            double t_hit = t + dir * h;
            for (std::size_t e = 0; e < events.size(); ++e) {
                const int s1 = sign(events[e].g(t + dir * h, y1));
                if (s1 == 0 || s1 == last_sign[e] || last_sign[e] == 0) continue;
                const double te = locate(events[e], st, t, t + dir * h, last_sign[e]);
                if ((te - t) * dir < (t_hit - t) * dir || hit < 0) {
                    hit = static_cast<int>(e);
                    t_hit = te;
                }
            }
            if (hit >= 0 && std::abs(t_hit - (t + dir * h)) > 0.0) {
                // Redo the step so that it ends on the event.
                const double he = t_hit - t;
                if (std::abs(he) > 0.0) {
                    if (!attempt(f, t, y, k1, he, y1, k7, st)) {
                        res.domain_exit = true;
                        break;
                    }
                } else {
                    y1 = y;
                }
            }
            const double t1 = hit >= 0 ? t_hit : t + dir * h;
            if (keep_dense && std::abs(t1 - t) > 0.0) res.steps.push_back(st);
            t = t1;
            y = y1;
            k1 = k7;
            for (std::size_t e = 0; e < events.size(); ++e) {
                if (static_cast<int>(e) == hit) {
                    last_sign[e] = -last_sign[e];
                } else {
                    const int s = sign(events[e].g(t, y));
                    if (s != 0) last_sign[e] = s;
                }
            }
            if (hit >= 0) {
                const Event& ev = events[static_cast<std::size_t>(hit)];
                if (ev.terminal) {
                    res.event = hit;
                    break;
                }
                if (ev.apply) {
                    ev.apply(t, y);
                    if (!safe_rhs(f, t, y, k1)) {
                        res.domain_exit = true;
                        break;
                    }
                }
            }
            if (opt.fixed_step <= 0 && hit < 0) {
                const double fac = err > 0 ? std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2))) : 5.0;
                h = std::min(opt.h_max, h * fac);
            }
        }
        res.t = t;
        res.y = y;
        return res;
    }

private:
    static int sign(double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

    static bool safe_rhs(const Rhs& f, double t, const State& y, State& dy) {
        try {
            f(t, y, dy);
        } catch (const DomainError&) {
            return false;
        }
        for (double v : dy)
            if (!std::isfinite(v)) return false;
        return true;
    }

    static double locate(const Event& ev, const Step& st, double ta, double tb, int sa) {
        // Bisection on the dense output; the bracket shrinks to rounding level.
        for (int it = 0; it < 200; ++it) {
            const double tm = 0.5 * (ta + tb);
            if (tm == ta || tm == tb) break;
            const int sm = sign(ev.g(tm, dense(st, tm)));
            if (sm == sa)
                ta = tm;
            else
                tb = tm;
        }
        return tb;
    }

    using Stages = std::array<State, 4>;  // k3..k6, kept for the error estimate

    static bool attempt(const Rhs& f, double t, const State& y, const State& k1, double h, State& y1, State& k7,
                        Step& st, Stages* stages = nullptr) {
        constexpr double a21 = 1.0 / 5.0;
        constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
        constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
        constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                         a54 = -212.0 / 729.0;
        constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                         a65 = -5103.0 / 18656.0;
        constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                         a76 = 11.0 / 84.0;
        constexpr double c2 = 0.2, c3 = 0.3, c4 = 0.8, c5 = 8.0 / 9.0;
        constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                         d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                         d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
        State k2, k3, k4, k5, k6, tmp;
        try {
            for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
            f(t + c2 * h, tmp, k2);
            for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
            f(t + c3 * h, tmp, k3);
            for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            f(t + c4 * h, tmp, k4);
            for (std::size_t i = 0; i < N; ++i)
                tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            f(t + c5 * h, tmp, k5);
            for (std::size_t i = 0; i < N; ++i)
                tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            f(t + h, tmp, k6);
            for (std::size_t i = 0; i < N; ++i)
                y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
            f(t + h, y1, k7);
        } catch (const DomainError&) {
            return false;
        }
        for (std::size_t i = 0; i < N; ++i)
            if (!std::isfinite(y1[i]) || !std::isfinite(k7[i])) return false;
        st.t0 = t;
        st.h = h;
        for (std::size_t i = 0; i < N; ++i) {
            st.rcont[0][i] = y[i];
            st.rcont[1][i] = y1[i] - y[i];
            st.rcont[2][i] = h * k1[i] - st.rcont[1][i];
            st.rcont[3][i] = st.rcont[1][i] - h * k7[i] - st.rcont[2][i];
            st.rcont[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
        }
        if (stages) *stages = {k3, k4, k5, k6};
        return true;
    }

    static double error_norm(const State& y, const State& y1, const Stages& stages, double h, const State& k1,
                             const State& k7, const Options& opt) {
        constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                         e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
        const auto& [k3, k4, k5, k6] = stages;
        double acc = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y1[i]));
            acc += (e / sc) * (e / sc);
        }
        return std::sqrt(acc / static_cast<double>(N));
    }
};

}  // namespace torusric
