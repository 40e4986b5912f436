#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace qthermo::detail {

/// Natural cubic spline through (x_i, y_i) with strictly increasing knots.
class CubicSpline {
public:
    CubicSpline() = default;

    CubicSpline(std::span<const double> x, std::span<const double> y) {
        if (x.size() != y.size() || x.size() < 2)
            throw std::invalid_argument("CubicSpline: need >= 2 matching samples");
        x_.assign(x.begin(), x.end());
        y_.assign(y.begin(), y.end());
        const std::size_t n = x_.size();
        m_.assign(n, 0.0);
        if (n == 2) return;  // degenerates to linear

        // Tridiagonal solve for second derivatives (natural boundary m0 = mn = 0).
        std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), r(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double hl = x_[i] - x_[i - 1];
            const double hr = x_[i + 1] - x_[i];
            if (hl <= 0.0 || hr <= 0.0)
                throw std::invalid_argument("CubicSpline: knots must be strictly increasing");
            a[i] = hl;
            b[i] = 2.0 * (hl + hr);
            c[i] = hr;
            r[i] = 6.0 * ((y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl);
        }
        for (std::size_t i = 2; i + 1 < n; ++i) {
            const double f = a[i] / b[i - 1];
            b[i] -= f * c[i - 1];
            r[i] -= f * r[i - 1];
        }
        for (std::size_t i = n - 2; i >= 1; --i) {
            m_[i] = (r[i] - c[i] * (i + 2 < n ? m_[i + 1] : 0.0)) / b[i];
            if (i == 1) break;
        }
    }

    double operator()(double t) const {
        const std::size_t i = segment(t);
        const double h = x_[i + 1] - x_[i];
        const double u = (x_[i + 1] - t) / h;
        const double v = (t - x_[i]) / h;
        return u * y_[i] + v * y_[i + 1] +
               ((u * u * u - u) * m_[i] + (v * v * v - v) * m_[i + 1]) * (h * h) / 6.0;
    }

    double x_front() const { return x_.front(); }
    double x_back() const { return x_.back(); }

private:
    std::size_t segment(double t) const {
        if (t <= x_.front()) return 0;
        if (t >= x_.back()) return x_.size() - 2;
        const auto it = std::upper_bound(x_.begin(), x_.end(), t);
        return static_cast<std::size_t>(it - x_.begin()) - 1;
    }

    std::vector<double> x_, y_, m_;
};

}  // namespace qthermo::detail
