#include "qthermo/schedule.hpp"

#include <cmath>

namespace qthermo {

BlochVector lz_field(double t, const LZParams& params) {
    return {2.0, 0.0, 2.0 * params.epsilon * t};
}

std::pair<double, double> energy_levels(double t, const LZParams& params) {
    const double u = params.epsilon * t;
    const double e = 2.0 * std::sqrt(1.0 + u * u);
    return {e, -e};
}

double p_lz(double epsilon) {
    if (!(epsilon > 0.0)) throw std::domain_error("p_lz: epsilon must be > 0");
    return std::exp(-M_PI / epsilon);
}

double delta_s_lz(double epsilon) {
    // Entropy depends only on |P|; for p_lz > 1/2 the polarization flips sign.
    return entropy(std::abs(1.0 - 2.0 * p_lz(epsilon)));
}

TabulatedSchedule::TabulatedSchedule(std::span<const double> times,
                                     std::span<const BlochVector> values, std::string label)
    : label_(std::move(label)) {
    if (times.size() != values.size() || times.size() < 2)
        throw std::invalid_argument("TabulatedSchedule: need >= 2 matching samples");
    std::vector<double> x(values.size()), y(values.size()), z(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!values[i].finite())
            throw std::invalid_argument("TabulatedSchedule: field samples must be finite");
        x[i] = values[i].x;
        y[i] = values[i].y;
        z[i] = values[i].z;
    }
    sx_ = detail::CubicSpline(times, x);
    sy_ = detail::CubicSpline(times, y);
    sz_ = detail::CubicSpline(times, z);
}

BlochVector TabulatedSchedule::field(double t) const { return {sx_(t), sy_(t), sz_(t)}; }

double derivative_defect(const DriveSchedule& schedule, double t_a, double t_b,
                         std::size_t samples) {
    double worst = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double t = t_a + (t_b - t_a) * static_cast<double>(i) / static_cast<double>(samples - 1);
        const double h = 1e-6 * (1.0 + std::abs(t));
        const BlochVector fd = (schedule.field(t + h) - schedule.field(t - h)) * (0.5 / h);
        const BlochVector an = schedule.field_derivative(t);
        const double scale = std::max(1.0, fd.norm());
        worst = std::max(worst, (fd - an).norm() / scale);
    }
    return worst;
}

}  // namespace qthermo
