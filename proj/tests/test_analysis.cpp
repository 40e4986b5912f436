#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "qthermo/analysis.hpp"
#include "qthermo/detail/dopri5.hpp"

using namespace qthermo;

namespace {

CascadeGridConfig grid(double a, double b, std::size_t pts) {
    CascadeGridConfig g;
    g.t_start = a;
    g.t_end = b;
    g.points = pts;
    return g;
}

struct SweepSetup {
    LZParams params;
    FrameCascade cascade;
    Trajectory traj;
};

SweepSetup ground_state_sweep(double eps, double half_span, std::size_t pts, int n_max) {
    SweepSetup s{{eps, -half_span, half_span}, {}, {}};
    LZSchedule schedule(s.params);
    s.cascade = build_cascade(schedule, grid(-half_span, half_span, pts), n_max);
    IntegratorConfig icfg;
    icfg.output_times = s.cascade.times;
    const BlochVector p0 = -lz_field(s.params.t_start, s.params).normalized();
    s.traj = evolve(p0, schedule, s.params.t_start, s.params.t_end, icfg);
    return s;
}

}  // namespace

TEST_CASE("entropy trace basics") {
    const SweepSetup s = ground_state_sweep(0.89, 60.0, 12001, 2);

    SUBCASE("starts at exactly zero and stays within the entropy bounds") {
        for (int frame : {0, 1, 2}) {
            const EntropyTrace tr = delta_s_trace(s.traj, s.cascade, frame);
            CHECK(tr.delta_s[0] == 0.0);
            for (double v : tr.delta_s) {
                CHECK(v >= -kLn2 - 1e-12);
                CHECK(v <= kLn2 + 1e-12);
            }
        }
    }
    SUBCASE("eigenstate start produces entropy overall") {
        const EntropyTrace tr = delta_s_trace(s.traj, s.cascade, 0);
        CHECK(tr.delta_s.back() >= -1e-6);
        CHECK(tr.delta_s.back() > 0.0);
    }
    SUBCASE("frame out of range") {
        CHECK_THROWS_AS(delta_s_trace(s.traj, s.cascade, 3), std::out_of_range);
        CHECK_THROWS_AS(delta_s_trace(s.traj, s.cascade, -1), std::out_of_range);
    }
}

TEST_CASE("lab-frame trace peaks at the resonance in the adiabatic regime") {
    const SweepSetup s = ground_state_sweep(0.34, 100.0, 20001, 1);
    const EntropyTrace tr = delta_s_trace(s.traj, s.cascade, 0);
    const double peak = *std::max_element(tr.delta_s.begin(), tr.delta_s.end());
    const double final_ds = tr.delta_s.back();
    CHECK(peak >= 2.0 * final_ds);
    // the asymptote agrees with the closed form
    CHECK(tail_average(tr, 0.1) ==
          doctest::Approx(delta_s_lz(0.34)).epsilon(0.05));
}

TEST_CASE("static drive produces a flat trace") {
    ConstantSchedule schedule({0.5, 0.0, 2.0});
    const FrameCascade cas = build_cascade(schedule, grid(0.0, 10.0, 501), 2);
    IntegratorConfig icfg;
    icfg.output_times = cas.times;
    const BlochVector p0 = BlochVector{0.5, 0.0, 2.0}.normalized() * -1.0;
    const Trajectory traj = evolve(p0, schedule, 0.0, 10.0, icfg);
    for (int frame : {0, 1, 2}) {
        const EntropyTrace tr = delta_s_trace(traj, cas, frame);
        for (double v : tr.delta_s) CHECK(std::abs(v) < 1e-10);
        CHECK(monotonicity_metric(tr) == 0.0);
    }
}

TEST_CASE("monotonicity metric") {
    EntropyTrace tr;
    tr.times = {0, 1, 2, 3};
    SUBCASE("strictly increasing") {
        tr.delta_s = {0.0, 0.1, 0.3, 0.7};
        CHECK(monotonicity_metric(tr) == 0.0);
    }
    SUBCASE("strictly decreasing") {
        tr.delta_s = {0.7, 0.3, 0.1, 0.0};
        CHECK(monotonicity_metric(tr) == 1.0);
    }
    SUBCASE("sawtooth +2/-1") {
        tr.times = {0, 1, 2, 3, 4};
        tr.delta_s = {0.0, 2.0, 1.0, 3.0, 2.0};
        CHECK(monotonicity_metric(tr) == doctest::Approx(1.0 / 3.0));
    }
    SUBCASE("all-zero increments") {
        tr.delta_s = {0.5, 0.5, 0.5, 0.5};
        CHECK(monotonicity_metric(tr) == 0.0);
    }
    SUBCASE("too short") {
        tr.times = {0.0};
        tr.delta_s = {0.0};
        CHECK_THROWS_AS(monotonicity_metric(tr), std::invalid_argument);
    }
}

TEST_CASE("frame hierarchy of entropy monotonicity") {
    const SweepSetup s = ground_state_sweep(0.89, 100.0, 20001, 4);
    const double m_lab = monotonicity_metric(delta_s_trace(s.traj, s.cascade, 0));
    const double m1 = monotonicity_metric(delta_s_trace(s.traj, s.cascade, 1));
    const double m2 = monotonicity_metric(delta_s_trace(s.traj, s.cascade, 2));
    const double m4 = monotonicity_metric(delta_s_trace(s.traj, s.cascade, 4));
    CHECK(m2 < m1);
    CHECK(m2 < m4);
    CHECK(m2 < m_lab);
}

TEST_CASE("entropy map") {
    LZParams params{0.34, -100.0, 100.0};
    MapConfig cfg;
    cfg.resolution = 128;
    cfg.workers = 1;

    SUBCASE("smallest allowed grid completes quickly") {
        MapConfig small = cfg;
        small.resolution = 16;
        const EntropyMap m = entropy_map(params, small);
        CHECK(m.values.size() == 16);
        for (auto f : m.flags) CHECK(f == 0);
    }
    SUBCASE("resolution below 16 rejected") {
        MapConfig bad = cfg;
        bad.resolution = 8;
        CHECK_THROWS_AS(entropy_map(params, bad), std::invalid_argument);
    }

    const EntropyMap map = entropy_map(params, cfg);

    SUBCASE("grid geometry") {
        CHECK(map.cells.size() == 128);
        // pole-first lattice, unit norms, northern hemisphere
        CHECK(map.cells[0].z == 1.0);
        CHECK(map.cells[0].x == 0.0);
        for (const BlochVector& c : map.cells) {
            CHECK(c.z >= 0.0);
            CHECK(std::abs(c.norm() - 1.0) < 1e-12);
        }
        // anchor triad is orthonormal and the pole is the ground direction
        CHECK(std::abs(map.anchor_e1.dot(map.anchor_e2)) < 1e-12);
        CHECK(std::abs(map.anchor_e1.norm() - 1.0) < 1e-12);
        const BlochVector ground = -lz_field(params.t_start, params).normalized();
        CHECK((map.anchor_pole - ground).norm() < 1e-12);
        CHECK((map.initial_state_lab(0) - ground).norm() < 1e-12);
    }
    SUBCASE("pole cell reproduces the eigenstate sweep") {
        CHECK(map.values[0] > 8e-4);
        CHECK(map.values[0] < 1.2e-3);
        CHECK(std::abs(map.values[0] - delta_s_lz(params.epsilon)) < 5e-4);
    }
    SUBCASE("dipole pattern: hot and cold cells") {
        std::size_t hot = 0, cold = 0;
        for (double v : map.values) {
            if (v > 0) ++hot;
            if (v < 0) ++cold;
            CHECK(std::abs(v) <= kLn2 + 1e-12);
        }
        CHECK(hot >= map.values.size() / 10);
        CHECK(cold >= map.values.size() / 10);
    }
    SUBCASE("values match one-propagator evolution of the same initial states") {
        // dP/dt = H x P is linear, so a single propagator run must agree with
        // the per-cell integrations.
        LZSchedule schedule(params);
        IntegratorConfig icfg;
        icfg.output_points = 2;
        BlochVector cols[3];
        for (int j = 0; j < 3; ++j) {
            BlochVector e{j == 0 ? 1.0 : 0.0, j == 1 ? 1.0 : 0.0, j == 2 ? 1.0 : 0.0};
            cols[j] = evolve(e, schedule, params.t_start, params.t_end, icfg).states.back();
        }
        const BlochVector di = lz_field(params.t_start, params).normalized();
        const BlochVector df = lz_field(params.t_end, params).normalized();
        for (std::size_t i = 0; i < map.cells.size(); i += 17) {
            const BlochVector p0 = map.initial_state_lab(i);
            const BlochVector pf = cols[0] * p0.x + cols[1] * p0.y + cols[2] * p0.z;
            const double want =
                entropy(std::clamp(std::abs(df.dot(pf)), 0.0, 1.0)) -
                entropy(std::clamp(std::abs(di.dot(p0)), 0.0, 1.0));
            CHECK(map.values[i] == doctest::Approx(want).epsilon(1e-7));
        }
    }
    SUBCASE("parallel execution is bit-identical to the serial reference") {
        MapConfig par = cfg;
        par.workers = 2;
        const EntropyMap a = entropy_map_serial(params, cfg);
        const EntropyMap b = entropy_map(params, par);
        REQUIRE(a.values.size() == b.values.size());
        for (std::size_t i = 0; i < a.values.size(); ++i) {
            CHECK(a.values[i] == b.values[i]);
            CHECK(a.flags[i] == b.flags[i]);
        }
    }
    SUBCASE("reruns are bit-identical") {
        const EntropyMap again = entropy_map(params, cfg);
        for (std::size_t i = 0; i < map.values.size(); ++i)
            CHECK(map.values[i] == again.values[i]);
    }
}

TEST_CASE("map comparison") {
    LZParams params{0.89, -40.0, 40.0};
    MapConfig cfg;
    cfg.resolution = 64;
    cfg.workers = 2;
    const EntropyMap a = entropy_map(params, cfg);

    SUBCASE("identity") {
        const MapCompareResult r = map_compare(a, a);
        CHECK(r.pearson_r == doctest::Approx(1.0));
        CHECK(r.sign_flip_fraction == 0.0);
        CHECK(r.max_abs_diff == 0.0);
        CHECK(r.cells_compared == 64);
    }
    SUBCASE("grid mismatch") {
        MapConfig other = cfg;
        other.resolution = 32;
        const EntropyMap b = entropy_map(params, other);
        CHECK_THROWS_AS(map_compare(a, b), std::invalid_argument);
    }
}

TEST_CASE("endpoint sensitivity") {
    LZParams params{0.34, -100.0, 100.0};
    MapConfig cfg;
    cfg.resolution = 256;
    cfg.workers = 2;

    SUBCASE("delta = 0 compares the map against itself") {
        const EndpointSensitivity r = endpoint_sensitivity(params, 0.0, cfg);
        CHECK(r.t_start_shift.max_abs_diff == 0.0);
        CHECK(r.t_end_shift.max_abs_diff == 0.0);
        CHECK(r.t_start_shift.pearson_r == doctest::Approx(1.0));
    }
    SUBCASE("the start of the sweep carries the sensitivity") {
        const EndpointSensitivity r = endpoint_sensitivity(params, 0.1, cfg);
        CHECK(r.t_end_shift.pearson_r > 0.999);
        CHECK(r.t_start_shift.sign_flip_fraction >
              10.0 * r.t_end_shift.sign_flip_fraction);
        CHECK(r.t_start_shift.sign_flip_fraction > 0.0);
    }
}
