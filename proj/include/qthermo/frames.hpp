#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "qthermo/bloch.hpp"
#include "qthermo/integrator.hpp"
#include "qthermo/quaternion.hpp"
#include "qthermo/schedule.hpp"

namespace qthermo {

struct CascadeGridConfig {
    double t_start = -100.0;
    double t_end = 100.0;
    std::size_t points = 20001;
    double refine_threshold = 0.01;  // rad per grid step before local refinement
    double max_angle_step = 0.1;     // hard limit after refinement
    int max_refine_rounds = 6;

    void validate() const {
        if (!(t_start < t_end)) throw std::domain_error("CascadeGridConfig: need t_start < t_end");
        if (points < 16) throw std::domain_error("CascadeGridConfig: grid too coarse");
        if (!(refine_threshold > 0.0) || !(max_angle_step >= refine_threshold))
            throw std::domain_error("CascadeGridConfig: bad refinement thresholds");
    }
};

/// Per-frame series of the cascade, all on the shared grid. Frame n is built
/// by diagonalizing the previous frame's effective field:
///   h_diag[n](t) = |h_eff[n-1](t)|           (diagonal field, along frame-n z)
///   c_vec[n](t)  = frame angular velocity    (the nonadiabatic term)
///   h_eff[n](t)  = h_diag[n] z_hat + c_vec[n]
///   rot[n](t)    = cumulative lab -> frame-n rotation (gauge-continuous)
///   q[n](t)      = h_diag[n]/|c_vec[n]|      (+inf where c vanishes)
struct FrameSeries {
    std::vector<double> h_diag;
    std::vector<BlochVector> c_vec;
    std::vector<BlochVector> h_eff;
    std::vector<Quaternion> rot;
    std::vector<double> q;
    // Continuous diagonalization angles of the previous frame's field; the
    // incremental map is Ry(-theta) Rz(-phi).
    std::vector<double> theta;
    std::vector<double> phi;
};

struct FrameCascade {
    std::vector<double> times;
    std::vector<BlochVector> lab_field;  // level 0, the schedule itself
    std::vector<FrameSeries> frames;     // frames[0] holds n = 1
    int n_max_requested = 0;
    int truncated_at = 0;                // frame whose construction failed; 0 = none
    std::string truncation_reason;

    int n_built() const { return static_cast<int>(frames.size()); }
    const FrameSeries& frame(int n) const;  // 1-based

    /// Lab-frame unit vector of the frame-n effective field at grid index k
    /// (n = 0 gives the lab field direction). Used to evaluate P_eq
    /// projections without leaving the lab frame.
    BlochVector effective_direction_lab(int n, std::size_t k) const;
};

/// Build frames 1..n_max by iterated instantaneous diagonalization. Frame 1
/// is the ordinary adiabatic frame. The grid is refined locally until the
/// per-step diagonalization angle increments drop below the configured
/// threshold. A level crossing (|h_eff| -> 0) truncates the cascade at that
/// frame with the reason recorded.
FrameCascade build_cascade(const DriveSchedule& schedule, const CascadeGridConfig& grid_cfg,
                           int n_max);

struct QFactor {
    std::vector<double> q_of_t;
    double q_min = std::numeric_limits<double>::infinity();
    double t_at_q_min = 0.0;
};

/// Q_n(t) = |H^n|/|C^n| and its minimum over the evaluation window (the full
/// grid, standing in for the infinite sweep).
QFactor q_factor(const FrameCascade& cascade, int n);

struct OptimalFrame {
    int n_star = 1;
    double q_star = std::numeric_limits<double>::infinity();
};

/// argmax over built frames of Q_n^min; ties resolve to the smallest n.
/// Requires at least two built frames.
OptimalFrame optimal_frame(const FrameCascade& cascade);

/// Express a lab-frame trajectory in frame n (n = 0: identity). The
/// trajectory is interpolated onto the cascade grid cubically, then rotated.
Trajectory transform_trajectory(const Trajectory& traj, const FrameCascade& cascade, int n);

}  // namespace qthermo
