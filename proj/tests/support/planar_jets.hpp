#pragma once

// Exact reference for the Landau-Zener superadiabatic cascade via truncated
// Taylor-series (jet) arithmetic. The LZ fields stay planar, so the cascade
// reduces to the scalar recursion
//     w_n = c_{n-1}/h_{n-1},  c_n = -w_n'/(1 + w_n^2),  h_n = h_{n-1} sqrt(1 + w_n^2)
// seeded by h_1 = 2 sqrt(1 + (eps t)^2), c_1 = eps/(1 + (eps t)^2). Carrying
// jets makes every nested time-derivative exact to round-off, independent of
// the production finite-difference path.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace jets {

inline constexpr int kDeg = 9;  // supports cascades to frame ~8

struct Jet {
    std::array<double, kDeg + 1> a{};

    static Jet constant(double c) {
        Jet j;
        j.a[0] = c;
        return j;
    }
    static Jet variable(double t0) {
        Jet j;
        j.a[0] = t0;
        j.a[1] = 1.0;
        return j;
    }
};

inline Jet operator+(const Jet& x, const Jet& y) {
    Jet r;
    for (int k = 0; k <= kDeg; ++k) r.a[k] = x.a[k] + y.a[k];
    return r;
}

inline Jet operator*(const Jet& x, const Jet& y) {
    Jet r;
    for (int k = 0; k <= kDeg; ++k) {
        double s = 0.0;
        for (int j = 0; j <= k; ++j) s += x.a[j] * y.a[k - j];
        r.a[k] = s;
    }
    return r;
}

inline Jet operator/(const Jet& x, const Jet& y) {
    if (y.a[0] == 0.0) throw std::domain_error("jet division by zero");
    Jet r;
    for (int k = 0; k <= kDeg; ++k) {
        double s = x.a[k];
        for (int j = 0; j < k; ++j) s -= r.a[j] * y.a[k - j];
        r.a[k] = s / y.a[0];
    }
    return r;
}

inline Jet operator-(const Jet& x) {
    Jet r;
    for (int k = 0; k <= kDeg; ++k) r.a[k] = -x.a[k];
    return r;
}

inline Jet sqrt(const Jet& x) {
    if (x.a[0] <= 0.0) throw std::domain_error("jet sqrt of nonpositive value");
    Jet r;
    r.a[0] = std::sqrt(x.a[0]);
    for (int k = 1; k <= kDeg; ++k) {
        double s = x.a[k];
        for (int j = 1; j < k; ++j) s -= r.a[j] * r.a[k - j];
        r.a[k] = s / (2.0 * r.a[0]);
    }
    return r;
}

inline Jet d_dt(const Jet& x) {
    Jet r;
    for (int k = 0; k < kDeg; ++k) r.a[k] = (k + 1) * x.a[k + 1];
    return r;
}

struct FrameValues {
    double h_diag;  // |h_eff[n-1]|
    double c;       // signed y-component of the nonadiabatic term
    double q;       // h_diag/|c|
};

/// Frame quantities at one time for frames 1..n_max.
inline std::vector<FrameValues> lz_cascade_at(double eps, double t, int n_max) {
    const Jet one = Jet::constant(1.0);
    const Jet u = Jet::constant(eps) * Jet::variable(t);
    const Jet opu2 = one + u * u;
    Jet h = Jet::constant(2.0) * sqrt(opu2);
    Jet c = Jet::constant(eps) / opu2;
    std::vector<FrameValues> out;
    out.reserve(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n) {
        const double cv = c.a[0];
        out.push_back({h.a[0], cv, cv != 0.0 ? h.a[0] / std::abs(cv)
                                             : std::numeric_limits<double>::infinity()});
        const Jet w = c / h;
        const Jet s = one + w * w;
        const Jet h_next = h * sqrt(s);
        const Jet c_next = -(d_dt(w) / s);
        h = h_next;
        c = c_next;
    }
    return out;
}

/// Q_n^min over a uniform scan of [t_a, t_b] (minima lie well inside for the
/// LZ protocol).
inline double lz_qmin(double eps, int n, double t_a, double t_b, std::size_t samples = 200001) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < samples; ++i) {
        const double t = t_a + (t_b - t_a) * static_cast<double>(i) / static_cast<double>(samples - 1);
        const auto vals = lz_cascade_at(eps, t, n);
        best = std::min(best, vals.back().q);
    }
    return best;
}

}  // namespace jets
