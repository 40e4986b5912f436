#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qthermo/integrator.hpp"
#include "qthermo/quaternion.hpp"
#include "qthermo/schedule.hpp"

using namespace qthermo;

namespace {

// Rodrigues solution for a static field: rotation of p0 about h by |h| t.
BlochVector larmor(const BlochVector& h, const BlochVector& p0, double t) {
    const double w = h.norm();
    if (w == 0.0) return p0;
    const BlochVector axis = h * (1.0 / w);
    const double a = w * t;
    return p0 * std::cos(a) + axis.cross(p0) * std::sin(a) +
           axis * (axis.dot(p0) * (1.0 - std::cos(a)));
}

}  // namespace

TEST_CASE("zero field leaves the state constant") {
    ConstantSchedule schedule({0.0, 0.0, 0.0});
    IntegratorConfig cfg;
    cfg.output_points = 11;
    const Trajectory traj = evolve({0.3, -0.4, 0.5}, schedule, 0.0, 10.0, cfg);
    for (const BlochVector& p : traj.states) CHECK((p - BlochVector{0.3, -0.4, 0.5}).norm() < 1e-14);
    CHECK(traj.norm_drift < 1e-14);
}

TEST_CASE("static field gives a circular Larmor orbit") {
    const BlochVector h{0.0, 0.0, 2.0};
    ConstantSchedule schedule(h);
    IntegratorConfig cfg;
    cfg.output_points = 629;
    const BlochVector p0{1.0, 0.0, 0.0};
    // period 2 pi / |H| = pi
    const Trajectory traj = evolve(p0, schedule, 0.0, M_PI, cfg);
    CHECK((traj.states.back() - p0).norm() < 1e-8);
    for (std::size_t k = 0; k < traj.times.size(); k += 37) {
        const BlochVector expect = larmor(h, p0, traj.times[k]);
        CHECK((traj.states[k] - expect).norm() < 1e-9);
    }
    CHECK(traj.norm_drift < 1e-12);
}

TEST_CASE("dense output tracks the analytic solution between steps") {
    const BlochVector h{0.4, -1.1, 0.7};
    ConstantSchedule schedule(h);
    IntegratorConfig cfg;
    cfg.output_points = 4001;  // far denser than the accepted steps
    const BlochVector p0 = BlochVector{0.2, 0.9, -0.1}.normalized();
    const Trajectory traj = evolve(p0, schedule, 0.0, 30.0, cfg);
    double worst = 0.0;
    for (std::size_t k = 0; k < traj.times.size(); ++k)
        worst = std::max(worst, (traj.states[k] - larmor(h, p0, traj.times[k])).norm());
    CHECK(worst < 1e-9);
}

TEST_CASE("Landau-Zener sweep reproduces the closed-form transition probability") {
    LZParams params{0.34, -100.0, 100.0};
    LZSchedule schedule(params);
    IntegratorConfig cfg;
    cfg.output_points = 2;
    const BlochVector p0 = -lz_field(params.t_start, params).normalized();  // ground state
    const Trajectory traj = evolve(p0, schedule, params.t_start, params.t_end, cfg);
    const double p = transition_probability(traj, schedule);
    CHECK(std::abs(p - p_lz(params.epsilon)) <= 1e-3);
    CHECK(std::abs(p - p_lz(params.epsilon)) < 1e-5);  // actual agreement is much tighter
    CHECK(traj.norm_drift <= 1e-8);
}

TEST_CASE("norm conservation and time reversal") {
    LZParams params{0.89, -100.0, 100.0};
    LZSchedule schedule(params);
    IntegratorConfig cfg;
    cfg.output_points = 101;
    const BlochVector p0 = -lz_field(params.t_start, params).normalized();
    const Trajectory fwd = evolve(p0, schedule, params.t_start, params.t_end, cfg);
    CHECK(fwd.norm_drift <= 1e-8);

    const Trajectory bwd =
        evolve(fwd.states.back(), schedule, params.t_end, params.t_start, cfg);
    CHECK((bwd.states.back() - p0).norm() < 1e-7);
}

TEST_CASE("fixed-step self-convergence is consistent with order five") {
    const BlochVector h{0.3, 0.8, -0.5};
    ConstantSchedule schedule(h);
    const BlochVector p0 = BlochVector{0.7, -0.2, 0.4}.normalized();
    const double T = 8.0;
    auto defect = [&](double step) {
        IntegratorConfig cfg;
        cfg.rel_tol = 1e3;  // effectively disable the controller
        cfg.abs_tol = 1e3;
        cfg.max_step = step;
        cfg.initial_step = step;
        cfg.output_points = 2;
        const Trajectory traj = evolve(p0, schedule, 0.0, T, cfg);
        return (traj.states.back() - larmor(h, p0, T)).norm();
    };
    const double e1 = defect(0.2);
    const double e2 = defect(0.1);
    const double order = std::log2(e1 / e2);
    CHECK(order > 4.5);
    CHECK(order < 5.5);
}

TEST_CASE("halving the tolerance tightens the solution") {
    LZParams params{0.89, -40.0, 40.0};
    LZSchedule schedule(params);
    const BlochVector p0 = -lz_field(params.t_start, params).normalized();
    IntegratorConfig tight;
    tight.rel_tol = 1e-13;
    tight.abs_tol = 1e-15;
    tight.output_points = 2;
    const BlochVector ref =
        evolve(p0, schedule, params.t_start, params.t_end, tight).states.back();
    auto defect = [&](double rtol) {
        IntegratorConfig cfg;
        cfg.rel_tol = rtol;
        cfg.abs_tol = rtol * 1e-2;
        cfg.output_points = 2;
        return (evolve(p0, schedule, params.t_start, params.t_end, cfg).states.back() - ref)
            .norm();
    };
    const double loose = defect(1e-6);
    const double tighter = defect(5e-7);
    CHECK(tighter < loose);
}

TEST_CASE("transition probability requires an eigenstate start") {
    LZParams params{0.89, -50.0, 50.0};
    LZSchedule schedule(params);
    IntegratorConfig cfg;
    cfg.output_points = 2;
    const Trajectory traj = evolve({1.0, 0.0, 0.0}, schedule, params.t_start, params.t_end, cfg);
    CHECK_THROWS_AS(transition_probability(traj, schedule), std::domain_error);
}

TEST_CASE("unachievable tolerance reports a diagnostic failure") {
    LZParams params{0.89, -50.0, 50.0};
    LZSchedule schedule(params);
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-14;
    cfg.output_points = 2;
    cfg.max_step = 1e-9;  // forces the step budget to run out mid-span
    CHECK_THROWS_AS(evolve({0.0, 0.0, 1.0}, schedule, params.t_start, params.t_end, cfg),
                    qthermo::detail::IntegrationError);
}

TEST_CASE("config validation") {
    ConstantSchedule schedule({0, 0, 1});
    IntegratorConfig cfg;
    cfg.rel_tol = 0.0;
    CHECK_THROWS_AS(evolve({0, 0, 1}, schedule, 0.0, 1.0, cfg), std::domain_error);
    IntegratorConfig cfg2;
    CHECK_THROWS_AS(evolve({0, 0, 2.0}, schedule, 0.0, 1.0, cfg2), std::domain_error);
    CHECK_THROWS_AS(evolve({0, 0, 1.0}, schedule, 1.0, 1.0, cfg2), std::invalid_argument);
    IntegratorConfig cfg3;
    cfg3.output_times = {0.0, 2.0};
    CHECK_THROWS_AS(evolve({0, 0, 1.0}, schedule, 0.0, 1.0, cfg3), std::invalid_argument);
}
