#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace qthermo::detail {

/// Fornberg weights for the m-th derivative at x0 from arbitrary nodes x.
/// (Generation of finite difference formulas on arbitrarily spaced grids.)
/// Returns weights for derivatives 0..max_order; only the requested order is
/// copied out.
inline void fornberg_weights(double x0, std::span<const double> x, int order,
                             std::span<double> w_out) {
    const std::size_t n = x.size();
    std::vector<double> c(n * static_cast<std::size_t>(order + 1), 0.0);
    auto C = [&](std::size_t i, int k) -> double& {
        return c[i * static_cast<std::size_t>(order + 1) + static_cast<std::size_t>(k)];
    };
    double c1 = 1.0;
    double c4 = x[0] - x0;
    C(0, 0) = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const int mn = static_cast<int>(std::min<std::size_t>(i, static_cast<std::size_t>(order)));
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    C(i, k) = c1 * (k * C(i - 1, k - 1) - c5 * C(i - 1, k)) / c2;
                C(i, 0) = -c1 * c5 * C(i - 1, 0) / c2;
            }
            for (int k = mn; k >= 1; --k)
                C(j, k) = (c4 * C(j, k) - k * C(j, k - 1)) / c3;
            C(j, 0) = c4 * C(j, 0) / c3;
        }
        c1 = c2;
    }
    for (std::size_t i = 0; i < n; ++i) w_out[i] = C(i, order);
}

/// First derivative of a sampled series on an arbitrary strictly increasing
/// grid using 5-point stencils (centered in the interior, one-sided 4th-order
/// at the boundaries).
inline std::vector<double> derivative_5pt(std::span<const double> t, std::span<const double> y) {
    const std::size_t n = t.size();
    std::vector<double> dy(n, 0.0);
    if (n < 5) {  // fall back to simple differences for very short series
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t a = k == 0 ? 0 : k - 1;
            const std::size_t b = k + 1 < n ? k + 1 : k;
            dy[k] = a == b ? 0.0 : (y[b] - y[a]) / (t[b] - t[a]);
        }
        return dy;
    }
    std::array<double, 5> w{};
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t lo = k < 2 ? 0 : (k + 2 >= n ? n - 5 : k - 2);
        fornberg_weights(t[k], t.subspan(lo, 5), 1, w);
        double acc = 0.0;
        for (std::size_t j = 0; j < 5; ++j) acc += w[j] * y[lo + j];
        dy[k] = acc;
    }
    return dy;
}

}  // namespace qthermo::detail
