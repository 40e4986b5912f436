#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "qthermo/bloch.hpp"

namespace qthermo::detail {

/// Raised when the controller drives the step below the resolvable scale or
/// the step budget runs out before reaching the end of the span.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double t) : std::runtime_error(what), t_fail(t) {}
    double t_fail;
};

// Dormand-Prince 5(4) tableau (7 stages, FSAL). The propagated solution is
// the 5th-order one; the embedded difference controls the step.
struct Dopri5Tableau {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // b - bhat
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    // dense-output weights
    static constexpr double d1 = -12715105075.0 / 11282082432.0;
    static constexpr double d3 = 87487479700.0 / 32700410799.0;
    static constexpr double d4 = -10690763975.0 / 1880347072.0;
    static constexpr double d5 = 701980252875.0 / 199316789632.0;
    static constexpr double d6 = -1453857185.0 / 822651844.0;
    static constexpr double d7 = 69997945.0 / 29380423.0;
};

/// One accepted step's continuous extension: y(t0 + theta*h) for theta in [0,1].
struct DenseSegment {
    double t0 = 0.0, h = 0.0;
    BlochVector r1, r2, r3, r4, r5;

    BlochVector eval(double t) const {
        const double th = (t - t0) / h;
        const double th1 = 1.0 - th;
        return r1 + (r2 + (r3 + (r4 + r5 * th1) * th) * th1) * th;
    }
};

struct StepControls {
    double rel_tol = 1e-12;
    double abs_tol = 1e-14;
    double max_step = 0.0;      // 0: no cap beyond the span
    double initial_step = 0.0;  // 0: automatic
    std::size_t max_steps = 200'000'000;
};

/// Integrate dP/dt = field(t) x P from t0 to t1 (either direction), emitting
/// dense-output samples at the requested times (must lie within the span and
/// be monotone in the direction of integration). Calls `emit(index, t, P)`
/// for each sample. Returns the final state.
template <class Field, class Emit>
BlochVector integrate_precession(Field&& field, BlochVector y, double t0, double t1,
                                 std::span<const double> sample_times, const StepControls& ctl,
                                 Emit&& emit) {
    using T = Dopri5Tableau;
    if (t0 == t1) throw std::invalid_argument("integrate_precession: empty span");
    const double dir = t1 > t0 ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);
    const double hmax = ctl.max_step > 0.0 ? std::min(ctl.max_step, span) : span;

    auto rhs = [&field](double t, const BlochVector& p) { return field(t).cross(p); };

    auto scaled_err = [&](const BlochVector& e, const BlochVector& a, const BlochVector& b) {
        auto comp = [&](double ev, double av, double bv) {
            const double sc = ctl.abs_tol + ctl.rel_tol * std::max(std::abs(av), std::abs(bv));
            const double q = ev / sc;
            return q * q;
        };
        return std::sqrt((comp(e.x, a.x, b.x) + comp(e.y, a.y, b.y) + comp(e.z, a.z, b.z)) / 3.0);
    };

    BlochVector k1 = rhs(t0, y);

    // Automatic initial step (Hairer-Norsett-Wanner style probe).
    double h;
    if (ctl.initial_step > 0.0) {
        h = std::min(ctl.initial_step, hmax);
    } else {
        const double d0 = std::max(y.norm(), 1e-8);
        const double d1 = std::max(k1.norm(), 1e-8);
        double h0 = 0.01 * d0 / d1;
        h0 = std::min(h0, hmax);
        const BlochVector y1 = y + k1 * (dir * h0);
        const BlochVector f1 = rhs(t0 + dir * h0, y1);
        const double d2 = (f1 - k1).norm() / h0;
        double h1 = std::pow(0.01 / std::max(d1 / d0, d2 / d0), 0.2);
        if (!std::isfinite(h1)) h1 = h0 * 10.0;
        h = std::min({100.0 * h0, h1, hmax});
    }
    h = std::max(h, span * std::numeric_limits<double>::epsilon() * 16.0);

    double t = t0;
    std::size_t sample_idx = 0;
    // Emit samples that coincide with the start.
    while (sample_idx < sample_times.size() &&
           dir * (sample_times[sample_idx] - t0) <= 0.0) {
        emit(sample_idx, sample_times[sample_idx], y);
        ++sample_idx;
    }

    bool last_rejected = false;
    for (std::size_t step = 0; step < ctl.max_steps; ++step) {
        if (dir * (t - t1) >= 0.0) break;
        h = std::min(h, std::abs(t1 - t));
        const double hd = dir * h;
        if (h <= std::abs(t) * std::numeric_limits<double>::epsilon() * 4.0 ||
            h < span * 1e-18) {
            std::ostringstream msg;
            msg << "integrate_precession: step size underflow at t = " << t;
            throw IntegrationError(msg.str(), t);
        }

        const BlochVector k2 = rhs(t + T::c2 * hd, y + k1 * (T::a21 * hd));
        const BlochVector k3 = rhs(t + T::c3 * hd, y + (k1 * T::a31 + k2 * T::a32) * hd);
        const BlochVector k4 = rhs(t + T::c4 * hd, y + (k1 * T::a41 + k2 * T::a42 + k3 * T::a43) * hd);
        const BlochVector k5 = rhs(
            t + T::c5 * hd, y + (k1 * T::a51 + k2 * T::a52 + k3 * T::a53 + k4 * T::a54) * hd);
        const BlochVector k6 =
            rhs(t + hd,
                y + (k1 * T::a61 + k2 * T::a62 + k3 * T::a63 + k4 * T::a64 + k5 * T::a65) * hd);
        const BlochVector dy =
            (k1 * T::b1 + k3 * T::b3 + k4 * T::b4 + k5 * T::b5 + k6 * T::b6) * hd;
        const BlochVector ynew = y + dy;
        const BlochVector k7 = rhs(t + hd, ynew);

        const BlochVector errv =
            (k1 * T::e1 + k3 * T::e3 + k4 * T::e4 + k5 * T::e5 + k6 * T::e6 + k7 * T::e7) * hd;
        const double err = scaled_err(errv, y, ynew);

        if (err <= 1.0) {
            // Dense output for samples inside (t, t+hd].
            if (sample_idx < sample_times.size() &&
                dir * (sample_times[sample_idx] - (t + hd)) <= 1e-14 * span) {
                DenseSegment seg;
                seg.t0 = t;
                seg.h = hd;
                seg.r1 = y;
                seg.r2 = dy;
                seg.r3 = k1 * hd - dy;
                seg.r4 = dy - k7 * hd - seg.r3;
                seg.r5 = (k1 * T::d1 + k3 * T::d3 + k4 * T::d4 + k5 * T::d5 + k6 * T::d6 +
                          k7 * T::d7) *
                         hd;
                while (sample_idx < sample_times.size()) {
                    const double ts = sample_times[sample_idx];
                    if (dir * (ts - (t + hd)) > 1e-14 * span) break;
                    emit(sample_idx, ts, dir * (ts - (t + hd)) >= 0.0 ? ynew : seg.eval(ts));
                    ++sample_idx;
                }
            }
            t += hd;
            y = ynew;
            k1 = k7;  // FSAL
            const double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
            h = std::min(h * std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0), hmax);
            last_rejected = false;
        } else {
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.2, 0.9);
            last_rejected = true;
        }
        if (step + 1 == ctl.max_steps) {
            std::ostringstream msg;
            msg << "integrate_precession: step budget exhausted at t = " << t
                << " (tolerance not achievable?)";
            throw IntegrationError(msg.str(), t);
        }
    }
    // Trailing samples that coincide with t1.
    while (sample_idx < sample_times.size()) {
        emit(sample_idx, sample_times[sample_idx], y);
        ++sample_idx;
    }
    return y;
}

}  // namespace qthermo::detail
