#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qthermo/analysis.hpp"
#include "qthermo/frames.hpp"
#include "qthermo/integrator.hpp"

namespace qthermo::io {

/// Shortest round-trip decimal representation; used for every number in a
/// data file so identical runs produce identical bytes.
std::string format_double(double v);

/// Columns t, Px, Py, Pz, |P|; metadata lines are '#'-prefixed comments.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                          const std::vector<std::string>& metadata = {});

/// Columns t, delta_s, frame.
void write_entropy_trace_csv(const std::filesystem::path& path, const EntropyTrace& trace,
                             const std::vector<std::string>& metadata = {});

/// Columns t, h_diag, c_x, c_y, c_z, q for one frame of the cascade.
void write_cascade_csv(const std::filesystem::path& path, const FrameCascade& cascade, int n,
                       const std::vector<std::string>& metadata = {});

/// {frames: [{n, q_min, t_at_qmin}], n_star, q_star}; infinities are encoded
/// as the string "inf".
nlohmann::json cascade_summary(const FrameCascade& cascade);

/// Columns cell_index, cx, cy, cz, delta_s, flag.
void write_entropy_map_csv(const std::filesystem::path& path, const EntropyMap& map,
                           const std::vector<std::string>& metadata = {});

/// Map parameters, anchor triad, and summary statistics.
nlohmann::json map_meta(const EntropyMap& map);

nlohmann::json compare_to_json(const MapCompareResult& r);

/// JSON-safe number: finite doubles pass through, infinities become "inf".
nlohmann::json json_number(double v);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace qthermo::io
