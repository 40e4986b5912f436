#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qthermo/bloch.hpp"
#include "qthermo/detail/dopri5.hpp"
#include "qthermo/schedule.hpp"

namespace qthermo {

struct IntegratorConfig {
    double rel_tol = 1e-12;
    double abs_tol = 1e-14;
    double max_step = 0.0;              // 0: span-limited only
    double initial_step = 0.0;          // 0: automatic
    std::size_t output_points = 4001;   // uniform grid when output_times is empty
    std::vector<double> output_times;   // explicit output grid (overrides output_points)

    void validate() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
            throw std::domain_error("IntegratorConfig: tolerances must be > 0");
        if (max_step < 0.0) throw std::domain_error("IntegratorConfig: max_step must be >= 0");
        if (output_times.empty() && output_points < 2)
            throw std::domain_error("IntegratorConfig: need >= 2 output points");
    }
};

/// Solution of dP/dt = H x P sampled on the requested output grid. |P| is
/// never renormalized; norm_drift records max_t ||P(t)| - |P(t_i)|| over the
/// samples as a free accuracy diagnostic.
struct Trajectory {
    std::vector<double> times;
    std::vector<BlochVector> states;
    double norm_drift = 0.0;
    std::string label;
};

/// Integrate the precession equation over [span_start, span_end] (either
/// direction). Throws qthermo::detail::IntegrationError on step-size
/// underflow or an exhausted step budget.
Trajectory evolve(const BlochVector& p_init, const DriveSchedule& schedule, double span_start,
                  double span_end, const IntegratorConfig& cfg);

/// Nonadiabatic transition probability (1 - s_i h_hat(t_f).P(t_f))/2 for a
/// trajectory that started (anti)aligned with h_hat(t_i). Throws
/// std::domain_error if the initial state is not an eigenstate within 1e-6.
double transition_probability(const Trajectory& traj, const DriveSchedule& schedule);

namespace detail {

/// Uniform output grid helper shared by evolve() and the sweep engine.
std::vector<double> uniform_grid(double a, double b, std::size_t points);

}  // namespace detail

}  // namespace qthermo
