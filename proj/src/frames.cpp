#include "qthermo/frames.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "qthermo/detail/fornberg.hpp"
#include "qthermo/detail/spline.hpp"

namespace qthermo {

namespace {

constexpr double kTwoPi = 6.283185307179586;

// Continuous spherical angles of a field series. The raw polar/azimuth pair
// is defined only up to (theta, phi) ~ (-theta, phi + pi) and phi ~ phi + 2pi;
// pick per point the representative closest to the previous one so the
// diagonalizing rotation never flips between grid neighbors.
void continuous_angles(const std::vector<BlochVector>& f, std::vector<double>& theta,
                       std::vector<double>& phi) {
    const std::size_t n = f.size();
    theta.resize(n);
    phi.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double rho = std::hypot(f[k].x, f[k].y);
        const double mag = std::hypot(rho, f[k].z);
        const double th_raw = std::atan2(rho, f[k].z);
        const bool azimuth_defined = rho > 1e-14 * mag;
        const double ph_raw = azimuth_defined ? std::atan2(f[k].y, f[k].x)
                                              : (k > 0 ? phi[k - 1] : 0.0);
        if (k == 0) {
            theta[0] = th_raw;
            phi[0] = ph_raw;
            continue;
        }
        double best_cost = std::numeric_limits<double>::infinity();
        double best_th = th_raw, best_ph = ph_raw;
        for (int sign = 0; sign < 2; ++sign) {
            const double th = sign == 0 ? th_raw : -th_raw;
            double ph = sign == 0 ? ph_raw : ph_raw + M_PI;
            ph -= kTwoPi * std::round((ph - phi[k - 1]) / kTwoPi);
            const double cost = std::abs(th - theta[k - 1]) + std::abs(ph - phi[k - 1]);
            if (cost < best_cost) {
                best_cost = cost;
                best_th = th;
                best_ph = ph;
            }
        }
        theta[k] = best_th;
        phi[k] = best_ph;
    }
}

// Builds frame n from the previous frame's effective field. Returns false on
// a level crossing (reason filled in).
bool build_frame(const std::vector<double>& times, const std::vector<BlochVector>& f_prev,
                 const std::vector<Quaternion>& rot_prev, FrameSeries& out, std::string& reason) {
    const std::size_t n = times.size();
    std::vector<double> mag(n);
    double mag_max = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        mag[k] = f_prev[k].norm();
        mag_max = std::max(mag_max, mag[k]);
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (mag[k] <= 1e-12 * mag_max || mag[k] == 0.0) {
            std::ostringstream msg;
            msg << "level crossing: |h_eff| ~ 0 at t = " << times[k];
            reason = msg.str();
            return false;
        }
    }

    continuous_angles(f_prev, out.theta, out.phi);
    const std::vector<double> theta_dot = detail::derivative_5pt(times, out.theta);
    const std::vector<double> phi_dot = detail::derivative_5pt(times, out.phi);

    out.h_diag = std::move(mag);
    out.c_vec.resize(n);
    out.h_eff.resize(n);
    out.rot.resize(n);
    out.q.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double st = std::sin(out.theta[k]);
        const double ct = std::cos(out.theta[k]);
        // angular velocity of the frame map Ry(-theta) Rz(-phi), in frame-n coords
        out.c_vec[k] = {phi_dot[k] * st, -theta_dot[k], -phi_dot[k] * ct};
        out.h_eff[k] = {out.c_vec[k].x, out.c_vec[k].y, out.h_diag[k] + out.c_vec[k].z};
        Quaternion g = Quaternion::about_y(-out.theta[k]) * Quaternion::about_z(-out.phi[k]);
        Quaternion r = g * rot_prev[k];
        if (k > 0 && r.dot(out.rot[k - 1]) < 0.0) r = -r;
        out.rot[k] = r;
        const double cn = out.c_vec[k].norm();
        out.q[k] = cn > 0.0 ? out.h_diag[k] / cn : std::numeric_limits<double>::infinity();
    }
    return true;
}

// Largest per-step rotation increment of the frame maps, used for grid
// refinement: angle between neighboring incremental rotations.
double angle_step(const FrameSeries& fr, std::size_t k) {
    const double dth = std::abs(fr.theta[k + 1] - fr.theta[k]);
    const double st = std::max(std::abs(std::sin(fr.theta[k])), std::abs(std::sin(fr.theta[k + 1])));
    const double dph = std::abs(fr.phi[k + 1] - fr.phi[k]);
    return dth + dph * std::max(st, 1e-3);
}

FrameCascade build_once(const DriveSchedule& schedule, const std::vector<double>& times,
                        int n_max) {
    FrameCascade cas;
    cas.times = times;
    cas.n_max_requested = n_max;
    cas.lab_field.resize(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        cas.lab_field[k] = schedule.field(times[k]);
        if (!cas.lab_field[k].finite())
            throw std::domain_error("build_cascade: schedule field not finite on grid");
    }

    std::vector<Quaternion> rot_prev(times.size(), Quaternion::identity());
    const std::vector<BlochVector>* f_prev = &cas.lab_field;
    for (int n = 1; n <= n_max; ++n) {
        FrameSeries fr;
        std::string reason;
        if (!build_frame(times, *f_prev, rot_prev, fr, reason)) {
            cas.truncated_at = n;
            cas.truncation_reason = reason;
            break;
        }
        cas.frames.push_back(std::move(fr));
        rot_prev = cas.frames.back().rot;
        f_prev = &cas.frames.back().h_eff;
    }
    return cas;
}

}  // namespace

const FrameSeries& FrameCascade::frame(int n) const {
    if (n < 1 || n > n_built()) throw std::out_of_range("FrameCascade::frame: frame not built");
    return frames[static_cast<std::size_t>(n - 1)];
}

BlochVector FrameCascade::effective_direction_lab(int n, std::size_t k) const {
    if (n == 0) return lab_field[k].normalized();
    const FrameSeries& fr = frame(n);
    return fr.rot[k].rotate_back(fr.h_eff[k].normalized());
}

FrameCascade build_cascade(const DriveSchedule& schedule, const CascadeGridConfig& grid_cfg,
                           int n_max) {
    grid_cfg.validate();
    if (n_max < 1) throw std::domain_error("build_cascade: n_max must be >= 1");

    std::vector<double> times =
        detail::uniform_grid(grid_cfg.t_start, grid_cfg.t_end, grid_cfg.points);
    FrameCascade cas = build_once(schedule, times, n_max);

    for (int round = 0; round < grid_cfg.max_refine_rounds; ++round) {
        std::set<double> inserts;
        for (const FrameSeries& fr : cas.frames)
            for (std::size_t k = 0; k + 1 < times.size(); ++k)
                if (angle_step(fr, k) > grid_cfg.refine_threshold)
                    inserts.insert(0.5 * (times[k] + times[k + 1]));
        if (inserts.empty()) break;
        times.insert(times.end(), inserts.begin(), inserts.end());
        std::sort(times.begin(), times.end());
        times.erase(std::unique(times.begin(), times.end()), times.end());
        cas = build_once(schedule, times, n_max);
    }

    for (const FrameSeries& fr : cas.frames)
        for (std::size_t k = 0; k + 1 < cas.times.size(); ++k)
            if (angle_step(fr, k) > grid_cfg.max_angle_step)
                throw std::runtime_error(
                    "build_cascade: grid too coarse for the requested cascade "
                    "(angle step above limit after refinement)");
    return cas;
}

QFactor q_factor(const FrameCascade& cascade, int n) {
    const FrameSeries& fr = cascade.frame(n);
    QFactor out;
    out.q_of_t = fr.q;
    out.t_at_q_min = cascade.times.front();
    for (std::size_t k = 0; k < fr.q.size(); ++k) {
        if (fr.q[k] < out.q_min) {
            out.q_min = fr.q[k];
            out.t_at_q_min = cascade.times[k];
        }
    }
    return out;
}

OptimalFrame optimal_frame(const FrameCascade& cascade) {
    if (cascade.n_built() < 2)
        throw std::invalid_argument("optimal_frame: need at least two built frames");
    OptimalFrame best;
    best.n_star = 1;
    best.q_star = q_factor(cascade, 1).q_min;
    for (int n = 2; n <= cascade.n_built(); ++n) {
        const double qn = q_factor(cascade, n).q_min;
        if (qn > best.q_star) {  // strict: ties keep the smallest n
            best.q_star = qn;
            best.n_star = n;
        }
    }
    return best;
}

Trajectory transform_trajectory(const Trajectory& traj, const FrameCascade& cascade, int n) {
    if (n < 0 || n > cascade.n_built())
        throw std::out_of_range("transform_trajectory: frame out of range");
    if (n == 0) return traj;
    if (traj.times.size() < 2)
        throw std::invalid_argument("transform_trajectory: trajectory too short");
    if (!std::is_sorted(traj.times.begin(), traj.times.end()))
        throw std::invalid_argument("transform_trajectory: trajectory must run forward in time");
    const double tol = 1e-9 * (traj.times.back() - traj.times.front());
    if (cascade.times.front() < traj.times.front() - tol ||
        cascade.times.back() > traj.times.back() + tol)
        throw std::invalid_argument("transform_trajectory: cascade span exceeds trajectory span");

    std::vector<double> px(traj.states.size()), py(traj.states.size()), pz(traj.states.size());
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        px[i] = traj.states[i].x;
        py[i] = traj.states[i].y;
        pz[i] = traj.states[i].z;
    }
    const detail::CubicSpline sx(traj.times, px), sy(traj.times, py), sz(traj.times, pz);

    Trajectory out;
    out.times = cascade.times;
    out.states.resize(cascade.times.size());
    out.label = traj.label + "#frame" + std::to_string(n);
    const FrameSeries& fr = cascade.frame(n);
    const double norm0 = traj.states.front().norm();
    for (std::size_t k = 0; k < cascade.times.size(); ++k) {
        const double t = cascade.times[k];
        const BlochVector p{sx(t), sy(t), sz(t)};
        out.states[k] = fr.rot[k].rotate(p);
        out.norm_drift = std::max(out.norm_drift, std::abs(out.states[k].norm() - norm0));
    }
    return out;
}

}  // namespace qthermo
