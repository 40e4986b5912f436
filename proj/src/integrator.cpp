#include "qthermo/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qthermo {

namespace detail {

std::vector<double> uniform_grid(double a, double b, std::size_t points) {
    std::vector<double> t(points);
    const double n1 = static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i)
        t[i] = a + (b - a) * (static_cast<double>(i) / n1);
    t.back() = b;
    return t;
}

}  // namespace detail

Trajectory evolve(const BlochVector& p_init, const DriveSchedule& schedule, double span_start,
                  double span_end, const IntegratorConfig& cfg) {
    cfg.validate();
    if (!p_init.finite()) throw std::domain_error("evolve: initial state not finite");
    if (p_init.norm() > 1.0 + 1e-9)
        throw std::domain_error("evolve: |P| > 1 is not a physical qubit polarization");
    if (span_start == span_end) throw std::invalid_argument("evolve: empty span");

    Trajectory traj;
    traj.label = schedule.label();
    if (!cfg.output_times.empty()) {
        const double dir = span_end > span_start ? 1.0 : -1.0;
        for (std::size_t i = 0; i < cfg.output_times.size(); ++i) {
            const double t = cfg.output_times[i];
            if (i > 0 && dir * (t - cfg.output_times[i - 1]) <= 0.0)
                throw std::invalid_argument("evolve: output_times must be strictly monotone in the sweep direction");
            if (dir * (t - span_start) < -1e-12 || dir * (t - span_end) > 1e-12)
                throw std::invalid_argument("evolve: output time outside span");
        }
        traj.times = cfg.output_times;
    } else {
        traj.times = detail::uniform_grid(span_start, span_end, cfg.output_points);
    }
    traj.states.resize(traj.times.size());

    detail::StepControls ctl;
    ctl.rel_tol = cfg.rel_tol;
    ctl.abs_tol = cfg.abs_tol;
    ctl.max_step = cfg.max_step;
    ctl.initial_step = cfg.initial_step;

    const double norm0 = p_init.norm();
    double drift = 0.0;
    detail::integrate_precession(
        [&schedule](double t) { return schedule.field(t); }, p_init, span_start, span_end,
        traj.times, ctl, [&](std::size_t idx, double, const BlochVector& p) {
            traj.states[idx] = p;
            drift = std::max(drift, std::abs(p.norm() - norm0));
        });
    traj.norm_drift = drift;
    return traj;
}

double transition_probability(const Trajectory& traj, const DriveSchedule& schedule) {
    if (traj.times.size() < 2) throw std::invalid_argument("transition_probability: empty trajectory");
    const double ti = traj.times.front();
    const double tf = traj.times.back();
    const BlochVector hi = schedule.field(ti).normalized();
    const BlochVector hf = schedule.field(tf).normalized();
    const BlochVector p0 = traj.states.front();

    constexpr double kEigenTol = 1e-6;
    const double n0 = p0.norm();
    const double align = p0.dot(hi);
    if (std::abs(n0 - 1.0) > kEigenTol || std::abs(std::abs(align) - 1.0) > kEigenTol) {
        std::ostringstream msg;
        msg << "transition_probability: initial state is not an energy eigenstate"
            << " (|P| = " << n0 << ", |h_hat.P| = " << std::abs(align) << ")";
        throw std::domain_error(msg.str());
    }
    const double s_i = align >= 0.0 ? 1.0 : -1.0;
    return 0.5 * (1.0 - s_i * hf.dot(traj.states.back()));
}

}  // namespace qthermo
