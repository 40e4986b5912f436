#include "qthermo/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace qthermo::io {

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[40];
    // %.17g round-trips every double; trim to the shortest representation
    // that still round-trips for stable, readable files.
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    return out;
}

void write_metadata(std::ofstream& out, const std::vector<std::string>& metadata) {
    for (const std::string& line : metadata) out << "# " << line << "\n";
}

}  // namespace

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                          const std::vector<std::string>& metadata) {
    auto out = open_out(path);
    write_metadata(out, metadata);
    out << "t,Px,Py,Pz,Pnorm\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const BlochVector& p = traj.states[i];
        out << format_double(traj.times[i]) << ',' << format_double(p.x) << ','
            << format_double(p.y) << ',' << format_double(p.z) << ','
            << format_double(p.norm()) << '\n';
    }
}

void write_entropy_trace_csv(const std::filesystem::path& path, const EntropyTrace& trace,
                             const std::vector<std::string>& metadata) {
    auto out = open_out(path);
    write_metadata(out, metadata);
    out << "t,delta_s,frame\n";
    for (std::size_t i = 0; i < trace.times.size(); ++i)
        out << format_double(trace.times[i]) << ',' << format_double(trace.delta_s[i]) << ','
            << trace.frame << '\n';
}

void write_cascade_csv(const std::filesystem::path& path, const FrameCascade& cascade, int n,
                       const std::vector<std::string>& metadata) {
    const FrameSeries& fr = cascade.frame(n);
    auto out = open_out(path);
    write_metadata(out, metadata);
    out << "t,h_diag,c_x,c_y,c_z,q\n";
    for (std::size_t k = 0; k < cascade.times.size(); ++k)
        out << format_double(cascade.times[k]) << ',' << format_double(fr.h_diag[k]) << ','
            << format_double(fr.c_vec[k].x) << ',' << format_double(fr.c_vec[k].y) << ','
            << format_double(fr.c_vec[k].z) << ',' << format_double(fr.q[k]) << '\n';
}

nlohmann::json json_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    return v;
}

nlohmann::json cascade_summary(const FrameCascade& cascade) {
    nlohmann::json frames = nlohmann::json::array();
    for (int n = 1; n <= cascade.n_built(); ++n) {
        const QFactor qf = q_factor(cascade, n);
        frames.push_back({{"n", n},
                          {"q_min", json_number(qf.q_min)},
                          {"t_at_qmin", json_number(qf.t_at_q_min)}});
    }
    nlohmann::json j{{"frames", frames},
                     {"grid_points", cascade.times.size()},
                     {"n_max_requested", cascade.n_max_requested}};
    if (cascade.truncated_at > 0) {
        j["truncated_at"] = cascade.truncated_at;
        j["truncation_reason"] = cascade.truncation_reason;
    }
    if (cascade.n_built() >= 2) {
        const OptimalFrame opt = optimal_frame(cascade);
        j["n_star"] = opt.n_star;
        j["q_star"] = json_number(opt.q_star);
    }
    return j;
}

void write_entropy_map_csv(const std::filesystem::path& path, const EntropyMap& map,
                           const std::vector<std::string>& metadata) {
    auto out = open_out(path);
    write_metadata(out, metadata);
    out << "cell_index,cx,cy,cz,delta_s,flag\n";
    for (std::size_t i = 0; i < map.cells.size(); ++i)
        out << i << ',' << format_double(map.cells[i].x) << ',' << format_double(map.cells[i].y)
            << ',' << format_double(map.cells[i].z) << ',' << format_double(map.values[i]) << ','
            << static_cast<int>(map.flags[i]) << '\n';
}

nlohmann::json map_meta(const EntropyMap& map) {
    double vmin = 0.0, vmax = 0.0, mean = 0.0;
    std::size_t ok = 0, hot = 0, cold = 0, failed = 0;
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        if (map.flags[i] != 0) {
            ++failed;
            continue;
        }
        const double v = map.values[i];
        if (ok == 0) vmin = vmax = v;
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
        mean += v;
        if (v > 0.0) ++hot;
        if (v < 0.0) ++cold;
        ++ok;
    }
    if (ok > 0) mean /= static_cast<double>(ok);
    return nlohmann::json{
        {"epsilon", map.params.epsilon},
        {"t_start", map.params.t_start},
        {"t_end", map.params.t_end},
        {"frame", map.frame},
        {"resolution", map.resolution},
        {"anchor",
         {{"e1", {map.anchor_e1.x, map.anchor_e1.y, map.anchor_e1.z}},
          {"e2", {map.anchor_e2.x, map.anchor_e2.y, map.anchor_e2.z}},
          {"pole", {map.anchor_pole.x, map.anchor_pole.y, map.anchor_pole.z}}}},
        {"stats",
         {{"min", json_number(vmin)},
          {"max", json_number(vmax)},
          {"mean", json_number(mean)},
          {"hot_fraction", ok ? static_cast<double>(hot) / static_cast<double>(ok) : 0.0},
          {"cold_fraction", ok ? static_cast<double>(cold) / static_cast<double>(ok) : 0.0},
          {"failed_cells", failed}}}};
}

nlohmann::json compare_to_json(const MapCompareResult& r) {
    return nlohmann::json{{"pearson_r", json_number(r.pearson_r)},
                          {"sign_flip_fraction", r.sign_flip_fraction},
                          {"max_abs_diff", json_number(r.max_abs_diff)},
                          {"cells_compared", r.cells_compared}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    auto out = open_out(path);
    out << text;
}

}  // namespace qthermo::io
