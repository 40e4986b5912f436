#include "qthermo/analysis.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qthermo/detail/spline.hpp"

namespace qthermo {

namespace {

constexpr double kGoldenAngle = 2.399963229728653;  // pi (3 - sqrt 5)

std::vector<double> component(const std::vector<BlochVector>& v, double BlochVector::*m) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].*m;
    return out;
}

}  // namespace

EntropyTrace delta_s_trace(const Trajectory& traj, const FrameCascade& cascade, int frame) {
    if (frame < 0 || frame > cascade.n_built())
        throw std::out_of_range("delta_s_trace: frame out of range");
    if (traj.times.size() < 2 || cascade.times.size() < 2)
        throw std::invalid_argument("delta_s_trace: degenerate inputs");
    const double tol = 1e-9 * (traj.times.back() - traj.times.front());
    if (cascade.times.front() < traj.times.front() - tol ||
        cascade.times.back() > traj.times.back() + tol)
        throw std::invalid_argument("delta_s_trace: cascade span exceeds trajectory span");

    // Lab-frame effective field direction on the cascade grid, then at the
    // trajectory's own sample times (the direction varies on the schedule
    // timescale, so cubic interpolation is accurate there).
    std::vector<BlochVector> dir(cascade.times.size());
    for (std::size_t k = 0; k < cascade.times.size(); ++k)
        dir[k] = cascade.effective_direction_lab(frame, k);
    const detail::CubicSpline dx(cascade.times, component(dir, &BlochVector::x));
    const detail::CubicSpline dy(cascade.times, component(dir, &BlochVector::y));
    const detail::CubicSpline dz(cascade.times, component(dir, &BlochVector::z));

    std::vector<double> proj(traj.times.size());
    for (std::size_t j = 0; j < traj.times.size(); ++j) {
        const double t = traj.times[j];
        const BlochVector d = BlochVector{dx(t), dy(t), dz(t)}.normalized();
        proj[j] = std::abs(d.dot(traj.states[j]));
    }

    // The projection is an adiabatic invariant up to slow drift; resample the
    // scalar onto the cascade grid.
    const detail::CubicSpline sproj(traj.times, proj);
    EntropyTrace trace;
    trace.times = cascade.times;
    trace.frame = frame;
    trace.scenario = traj.label;
    trace.delta_s.resize(cascade.times.size());
    const double s0 = entropy(std::clamp(sproj(cascade.times.front()), 0.0, 1.0));
    for (std::size_t k = 0; k < cascade.times.size(); ++k) {
        const double s = entropy(std::clamp(sproj(cascade.times[k]), 0.0, 1.0));
        trace.delta_s[k] = s - s0;
    }
    trace.delta_s[0] = 0.0;
    return trace;
}

double monotonicity_metric(const EntropyTrace& trace) {
    if (trace.delta_s.size() < 2)
        throw std::invalid_argument("monotonicity_metric: trace too short");
    double neg = 0.0, total = 0.0;
    for (std::size_t k = 1; k < trace.delta_s.size(); ++k) {
        const double d = trace.delta_s[k] - trace.delta_s[k - 1];
        total += std::abs(d);
        if (d < 0.0) neg += -d;
    }
    return total == 0.0 ? 0.0 : neg / total;
}

double tail_average(const EntropyTrace& trace, double fraction) {
    if (trace.delta_s.empty()) throw std::invalid_argument("tail_average: empty trace");
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw std::invalid_argument("tail_average: fraction outside (0, 1]");
    const std::size_t n = trace.delta_s.size();
    const std::size_t count = std::max<std::size_t>(1, static_cast<std::size_t>(fraction * n));
    double acc = 0.0;
    for (std::size_t k = n - count; k < n; ++k) acc += trace.delta_s[k];
    return acc / static_cast<double>(count);
}

BlochVector EntropyMap::initial_state_lab(std::size_t i) const {
    const BlochVector& c = cells[i];
    return anchor_e1 * c.x + anchor_e2 * c.y + anchor_pole * c.z;
}

namespace {

struct MapGeometry {
    BlochVector e1, e2, pole;
    BlochVector dir_start, dir_end;  // lab effective-field direction at the endpoints
};

MapGeometry map_geometry(const LZParams& params, const MapConfig& cfg) {
    MapGeometry g;
    if (cfg.frame == 0) {
        g.dir_start = lz_field(params.t_start, params).normalized();
        g.dir_end = lz_field(params.t_end, params).normalized();
    } else {
        LZSchedule schedule(params);
        CascadeGridConfig ccfg = cfg.cascade;
        ccfg.t_start = params.t_start;
        ccfg.t_end = params.t_end;
        const FrameCascade cas = build_cascade(schedule, ccfg, cfg.n_max);
        if (cfg.frame > cas.n_built())
            throw std::invalid_argument("entropy_map: requested frame not built");
        g.dir_start = cas.effective_direction_lab(cfg.frame, 0);
        g.dir_end = cas.effective_direction_lab(cfg.frame, cas.times.size() - 1);
    }
    // Grid pole: the minimum-entropy (ground) direction at the start of the
    // sweep. Azimuth reference: lab x projected off the pole.
    g.pole = -g.dir_start;
    BlochVector ref{1.0, 0.0, 0.0};
    if (std::abs(g.pole.dot(ref)) > 0.99) ref = {0.0, 1.0, 0.0};
    g.e1 = (ref - g.pole * g.pole.dot(ref)).normalized();
    g.e2 = g.pole.cross(g.e1);
    return g;
}

std::vector<BlochVector> hemisphere_cells(std::size_t n) {
    // Fibonacci lattice over the northern hemisphere, pole first: uniform in
    // z (equal-area bands) with golden-angle azimuths. Cell 0 is the pole.
    std::vector<BlochVector> cells(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double z = 1.0 - static_cast<double>(i) / static_cast<double>(n - 1);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double psi = static_cast<double>(i) * kGoldenAngle;
        cells[i] = {r * std::cos(psi), r * std::sin(psi), z};
    }
    return cells;
}

struct LZField {
    double epsilon;
    BlochVector operator()(double t) const { return {2.0, 0.0, 2.0 * epsilon * t}; }
};

// One cell: a full sweep integration plus endpoint projections.
void map_cell(const LZParams& params, const MapGeometry& g, const detail::StepControls& ctl,
              const BlochVector& cell, double& value, std::uint8_t& flag) {
    const BlochVector p0 = g.e1 * cell.x + g.e2 * cell.y + g.pole * cell.z;
    try {
        const BlochVector pf = detail::integrate_precession(
            LZField{params.epsilon}, p0, params.t_start, params.t_end,
            std::span<const double>{}, ctl, [](std::size_t, double, const BlochVector&) {});
        const double s_i = std::clamp(std::abs(g.dir_start.dot(p0)), 0.0, 1.0);
        const double s_f = std::clamp(std::abs(g.dir_end.dot(pf)), 0.0, 1.0);
        value = entropy(s_f) - entropy(s_i);
        flag = 0;
    } catch (const std::exception&) {
        value = 0.0;
        flag = 1;
    }
}

EntropyMap run_map(const LZParams& params, const MapConfig& cfg, bool force_serial) {
    params.validate();
    if (cfg.resolution < 16) throw std::invalid_argument("entropy_map: resolution must be >= 16");

    EntropyMap map;
    map.params = params;
    map.frame = cfg.frame;
    map.resolution = cfg.resolution;
    const MapGeometry g = map_geometry(params, cfg);
    map.anchor_e1 = g.e1;
    map.anchor_e2 = g.e2;
    map.anchor_pole = g.pole;
    map.cells = hemisphere_cells(cfg.resolution);
    map.values.assign(cfg.resolution, 0.0);
    map.flags.assign(cfg.resolution, 0);

    detail::StepControls ctl;
    ctl.rel_tol = cfg.integrator.rel_tol;
    ctl.abs_tol = cfg.integrator.abs_tol;
    ctl.max_step = cfg.integrator.max_step;
    ctl.initial_step = cfg.integrator.initial_step;

    const auto n = static_cast<std::ptrdiff_t>(cfg.resolution);
    if (force_serial || cfg.workers == 1) {
        for (std::ptrdiff_t i = 0; i < n; ++i)
            map_cell(params, g, ctl, map.cells[static_cast<std::size_t>(i)],
                     map.values[static_cast<std::size_t>(i)],
                     map.flags[static_cast<std::size_t>(i)]);
        return map;
    }

#ifdef _OPENMP
    const int threads = cfg.workers > 0 ? cfg.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 8) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        map_cell(params, g, ctl, map.cells[static_cast<std::size_t>(i)],
                 map.values[static_cast<std::size_t>(i)],
                 map.flags[static_cast<std::size_t>(i)]);
#else
    for (std::ptrdiff_t i = 0; i < n; ++i)
        map_cell(params, g, ctl, map.cells[static_cast<std::size_t>(i)],
                 map.values[static_cast<std::size_t>(i)],
                 map.flags[static_cast<std::size_t>(i)]);
#endif
    return map;
}

}  // namespace

EntropyMap entropy_map(const LZParams& params, const MapConfig& cfg) {
    return run_map(params, cfg, false);
}

EntropyMap entropy_map_serial(const LZParams& params, const MapConfig& cfg) {
    return run_map(params, cfg, true);
}

MapCompareResult map_compare(const EntropyMap& a, const EntropyMap& b) {
    if (a.resolution != b.resolution || a.cells.size() != b.cells.size())
        throw std::invalid_argument("map_compare: grid resolution mismatch");
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        const BlochVector d = a.cells[i] - b.cells[i];
        if (d.norm() != 0.0) throw std::invalid_argument("map_compare: grids differ");
    }
    MapCompareResult out;
    double sa = 0.0, sb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
    std::size_t n = 0;
    std::size_t flips = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        if (a.flags[i] != 0 || b.flags[i] != 0) continue;
        const double x = a.values[i], y = b.values[i];
        sa += x; sb += y; saa += x * x; sbb += y * y; sab += x * y;
        out.max_abs_diff = std::max(out.max_abs_diff, std::abs(x - y));
        if ((x > 0.0) != (y > 0.0) || (x < 0.0) != (y < 0.0)) ++flips;
        ++n;
    }
    out.cells_compared = n;
    if (n == 0) return out;
    out.sign_flip_fraction = static_cast<double>(flips) / static_cast<double>(n);
    const double nd = static_cast<double>(n);
    const double cov = sab - sa * sb / nd;
    const double va = saa - sa * sa / nd;
    const double vb = sbb - sb * sb / nd;
    out.pearson_r = (va > 0.0 && vb > 0.0) ? cov / std::sqrt(va * vb)
                                           : (out.max_abs_diff == 0.0 ? 1.0 : 0.0);
    return out;
}

EndpointSensitivity endpoint_sensitivity(const LZParams& params, double delta,
                                         const MapConfig& cfg) {
    if (delta < 0.0) throw std::invalid_argument("endpoint_sensitivity: delta must be >= 0");
    const EntropyMap base = entropy_map(params, cfg);

    LZParams shifted_start = params;
    shifted_start.t_start += delta;
    LZParams shifted_end = params;
    shifted_end.t_end += delta;

    EndpointSensitivity out;
    out.delta = delta;
    out.t_start_shift = map_compare(base, entropy_map(shifted_start, cfg));
    out.t_end_shift = map_compare(base, entropy_map(shifted_end, cfg));
    return out;
}

}  // namespace qthermo
