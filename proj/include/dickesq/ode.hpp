// Adaptive Dormand-Prince 5(4) integrator for Eigen dense states (real or complex).
//
// Steps are clamped so that every requested output time is hit exactly; no
// dense-output interpolation is involved, which keeps outputs bit-reproducible.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "dickesq/error.hpp"

namespace dickesq {

struct OdeOptions {
    double rtol{1e-9};
    double atol{1e-12};
    double h_init{0.0};  // 0 selects a starting step automatically
    double h_max{std::numeric_limits<double>::infinity()};
    std::size_t max_steps{500'000'000};
};

struct OdeStats {
    std::size_t accepted{0};
    std::size_t rejected{0};
    std::size_t rhs_evals{0};
    double last_h{0.0};
};

namespace detail {

// Squared magnitudes throughout: complex abs() goes through hypot and
// dominates the step cost for large states.
template <class Y>
double error_norm(const Y& err, const Y& y0, const Y& y1, double atol, double rtol) {
    const auto scale = atol + rtol * y0.array().abs2().max(y1.array().abs2()).sqrt();
    return std::sqrt((err.array().abs2() / scale.square()).maxCoeff());
}

struct NoPostStep {
    template <class Y>
    bool operator()(double, Y&) const { return false; }
};

} // namespace detail

// Integrates y' = f(t, y) from t0 through every time in `grid` (ascending,
// each >= t0). `f(t, y, dy)` writes the derivative. `observe(t, y)` fires at
// each grid time; `post_step(t, y)` may modify y after an accepted step and
// returns true when it did. Returns the last accepted step size.
template <class Y, class F, class Observe, class PostStep = detail::NoPostStep>
OdeStats integrate_dopri5(F&& f, Y& y, double t0, const std::vector<double>& grid,
                          Observe&& observe, const OdeOptions& opt = {},
                          PostStep&& post_step = {}) {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                     b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    constexpr double beta = 0.04, alpha = 0.2 - 0.75 * beta, safety = 0.9;

    OdeStats stats;
    double t = t0;
    Y k1 = y, k2 = y, k3 = y, k4 = y, k5 = y, k6 = y, k7 = y, ytmp = y, ynew = y, err = y;
    f(t, y, k1);
    ++stats.rhs_evals;

    double h = opt.h_init;
    if (h <= 0.0) {
        const double d0 = (y.array().abs() / (opt.atol + opt.rtol * y.array().abs())).maxCoeff();
        const double d1 = (k1.array().abs() / (opt.atol + opt.rtol * y.array().abs())).maxCoeff();
        h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    }
    h = std::min(h, opt.h_max);
    double err_old = 1e-4;

    for (double t_out : grid) {
        if (t_out < t) throw Error("integrate_dopri5: output grid is not ascending");
        while (t < t_out) {
            if (stats.accepted + stats.rejected >= opt.max_steps)
                throw StepUnderflow("integrate_dopri5: step budget exhausted", t);
            bool clamped = false;
            double step = h;
            if (t + step >= t_out || t_out - (t + step) < 1e-12 * std::abs(t_out)) {
                step = t_out - t;
                clamped = true;
            }
            if (step <= 16 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)))
                throw StepUnderflow("integrate_dopri5: step size underflow", t);

            ytmp = y + step * a21 * k1;
            f(t + c2 * step, ytmp, k2);
            ytmp = y + step * (a31 * k1 + a32 * k2);
            f(t + c3 * step, ytmp, k3);
            ytmp = y + step * (a41 * k1 + a42 * k2 + a43 * k3);
            f(t + c4 * step, ytmp, k4);
            ytmp = y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
            f(t + c5 * step, ytmp, k5);
            ytmp = y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
            f(t + step, ytmp, k6);
            ynew = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            f(t + step, ynew, k7);
            stats.rhs_evals += 6;
            err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            const double en = detail::error_norm(err, y, ynew, opt.atol, opt.rtol);

            if (!std::isfinite(en)) {
                ++stats.rejected;
                h = 0.2 * step;
                continue;
            }
            if (en <= 1.0) {
                ++stats.accepted;
                t = clamped ? t_out : t + step;
                y.swap(ynew);
                if (post_step(t, y)) {
                    f(t, y, k1);
                    ++stats.rhs_evals;
                } else {
                    k1.swap(k7);
                }
                double fac = safety * std::pow(std::max(en, 1e-10), -alpha) * std::pow(err_old, beta);
                fac = std::clamp(fac, 0.2, 10.0);
                err_old = std::max(en, 1e-4);
                const double proposed = std::min(step * fac, opt.h_max);
                // A step shortened only to land on an output time should not shrink h.
                h = clamped ? std::max(h, proposed) : proposed;
                stats.last_h = step;
            } else {
                ++stats.rejected;
                double fac = safety * std::pow(en, -alpha);
                h = step * std::clamp(fac, 0.2, 1.0);
            }
        }
        observe(t, y);
    }
    return stats;
}

} // namespace dickesq
