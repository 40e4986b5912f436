#pragma once

#include <cstdint>
#include <cstddef>
#include <string>
#include <vector>

#include "qthermo/bloch.hpp"
#include "qthermo/frames.hpp"
#include "qthermo/integrator.hpp"
#include "qthermo/schedule.hpp"

namespace qthermo {

/// Coarse-grained entropy production relative to the start of the protocol,
/// on the cascade grid. delta_s[0] == 0 by construction.
struct EntropyTrace {
    std::vector<double> times;
    std::vector<double> delta_s;  // nats
    int frame = 0;                // 0 = lab
    std::string scenario;
};

/// dS(t) = S(P_eq(t)) - S(P_eq(t_i)) with P_eq the projection of P onto the
/// effective field direction of the requested frame (0: lab Hamiltonian).
/// The projection is evaluated at the trajectory's own samples and the slow
/// scalar is interpolated onto the cascade grid, which keeps the trace free
/// of precession-aliasing error even for coarse trajectory grids.
EntropyTrace delta_s_trace(const Trajectory& traj, const FrameCascade& cascade, int frame);

/// Negative-variation fraction of a trace: sum(max(0,-d)) / sum(|d|) over
/// successive increments; 0 for monotone nondecreasing, 1 for decreasing,
/// 0 for an all-zero trace.
double monotonicity_metric(const EntropyTrace& trace);

/// Mean of delta_s over the trailing `fraction` of the trace (used to read
/// off the asymptote under decaying oscillations).
double tail_average(const EntropyTrace& trace, double fraction = 0.1);

struct MapConfig {
    std::size_t resolution = 2048;  // number of hemisphere cells (>= 16)
    int frame = 0;                  // projection frame for dS
    int workers = 0;                // OpenMP threads; 0 = library default, 1 = serial
    IntegratorConfig integrator;    // output grid settings are ignored
    CascadeGridConfig cascade;      // span is overridden by the sweep params
    int n_max = 6;                  // cascade depth when frame > 0
};

/// dS(t_f) over a hemisphere of initial states, one sweep integration per
/// cell. Cell centers are stored in the coordinates of the grid anchor triad
/// (e1, e2, pole), with pole = the minimum-entropy (ground) direction of the
/// effective field at t_start; cell 0 is the pole itself. Determinism: cell
/// ordering and values are independent of the worker count.
struct EntropyMap {
    LZParams params;
    int frame = 0;
    std::size_t resolution = 0;
    BlochVector anchor_e1, anchor_e2, anchor_pole;  // lab coordinates of the triad
    std::vector<BlochVector> cells;                 // unit centers, anchor coords, z >= 0
    std::vector<double> values;                     // dS(t_f) in nats
    std::vector<std::uint8_t> flags;                // 0 = ok, 1 = integration failed

    /// Initial lab-frame Bloch vector of cell i.
    BlochVector initial_state_lab(std::size_t i) const;
};

EntropyMap entropy_map(const LZParams& params, const MapConfig& cfg);

/// Single-threaded reference path; bit-identical to entropy_map for any
/// worker count.
EntropyMap entropy_map_serial(const LZParams& params, const MapConfig& cfg);

struct MapCompareResult {
    double pearson_r = 1.0;
    double sign_flip_fraction = 0.0;
    double max_abs_diff = 0.0;
    std::size_t cells_compared = 0;
};

/// Paired-cell statistics; throws std::invalid_argument on mismatched grids.
MapCompareResult map_compare(const EntropyMap& a, const EntropyMap& b);

struct EndpointSensitivity {
    double delta = 0.0;
    MapCompareResult t_start_shift;  // base vs (t_start + delta)
    MapCompareResult t_end_shift;    // base vs (t_end + delta)
};

/// Shifts each sweep endpoint by delta (one at a time) and compares the
/// resulting maps against the base map.
EndpointSensitivity endpoint_sensitivity(const LZParams& params, double delta,
                                         const MapConfig& cfg);

}  // namespace qthermo
