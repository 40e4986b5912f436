#pragma once

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qthermo/bloch.hpp"
#include "qthermo/detail/spline.hpp"

namespace qthermo {

/// A time-parameterized Hamiltonian field t -> h(t). Immutable after
/// construction; evaluation is pure (safe from any thread).
class DriveSchedule {
public:
    virtual ~DriveSchedule() = default;

    virtual BlochVector field(double t) const = 0;

    /// dh/dt; analytic when available, otherwise central differences.
    virtual BlochVector field_derivative(double t) const {
        const double h = 1e-6 * (1.0 + std::abs(t));
        return (field(t + h) - field(t - h)) * (0.5 / h);
    }

    virtual bool has_analytic_derivative() const { return false; }
    virtual std::string label() const = 0;
};

/// Landau-Zener sweep parameters: h(t) = (2, 0, 2 epsilon t) on [t_start, t_end].
struct LZParams {
    double epsilon = 0.34;
    double t_start = -100.0;
    double t_end = 100.0;

    void validate() const {
        if (!(epsilon > 0.0)) throw std::domain_error("LZParams: epsilon must be > 0");
        if (!(t_start < t_end)) throw std::domain_error("LZParams: need t_start < t_end");
    }
    double duration() const { return t_end - t_start; }
};

/// Field of the linear sweep, (2, 0, 2 epsilon t).
BlochVector lz_field(double t, const LZParams& params);

/// Instantaneous energy levels (+|h|, -|h|) = +-2 sqrt(1 + (eps t)^2).
std::pair<double, double> energy_levels(double t, const LZParams& params);

/// Asymptotic nonadiabatic transition probability exp(-pi/epsilon).
double p_lz(double epsilon);

/// Entropy produced by a full sweep implied by p_lz: S(|1 - 2 p_lz|).
double delta_s_lz(double epsilon);

class LZSchedule final : public DriveSchedule {
public:
    explicit LZSchedule(LZParams params) : params_(params) { params_.validate(); }

    BlochVector field(double t) const override { return {2.0, 0.0, 2.0 * params_.epsilon * t}; }
    BlochVector field_derivative(double) const override { return {0.0, 0.0, 2.0 * params_.epsilon}; }
    bool has_analytic_derivative() const override { return true; }
    std::string label() const override { return "lz"; }
    const LZParams& params() const { return params_; }

private:
    LZParams params_;
};

class ConstantSchedule final : public DriveSchedule {
public:
    explicit ConstantSchedule(BlochVector h) : h_(h) {}

    BlochVector field(double) const override { return h_; }
    BlochVector field_derivative(double) const override { return {}; }
    bool has_analytic_derivative() const override { return true; }
    std::string label() const override { return "constant"; }

private:
    BlochVector h_;
};

/// Field tabulated at sample times and interpolated with natural cubic
/// splines component-wise.
class TabulatedSchedule final : public DriveSchedule {
public:
    TabulatedSchedule(std::span<const double> times, std::span<const BlochVector> values,
                      std::string label = "tabulated");

    BlochVector field(double t) const override;
    std::string label() const override { return label_; }

private:
    detail::CubicSpline sx_, sy_, sz_;
    std::string label_;
};

/// Verifies the DriveSchedule invariant that an analytic derivative matches
/// central finite differences within `rel_tol` relative over sampled points
/// of [t_a, t_b]. Returns the worst relative defect.
double derivative_defect(const DriveSchedule& schedule, double t_a, double t_b,
                         std::size_t samples = 257);

}  // namespace qthermo
