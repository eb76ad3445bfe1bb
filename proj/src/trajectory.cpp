#include "pendkit/trajectory.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "pendkit/error.hpp"

namespace pendkit {

std::vector<double> Trajectory::times() const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.t);
    return out;
}

std::vector<double> Trajectory::thetas() const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.state.theta);
    return out;
}

std::vector<double> Trajectory::omegas() const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.state.omega);
    return out;
}

std::string format_double(double v) {
    char buf[48];
    auto res = std::to_chars(buf, buf + sizeof buf, v,
                             std::chars_format::scientific, 16);
    return std::string(buf, res.ptr);
}

bool parse_double(const std::string& field, double& out) {
    std::size_t begin = field.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return false;
    std::size_t end = field.find_last_not_of(" \t\r") + 1;
    const char* first = field.data() + begin;
    const char* last = field.data() + end;
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last;
}

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

constexpr const char* kTrajectoryHeader = "t,theta,omega,u_control,u_noise";

} // namespace

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
    out << kTrajectoryHeader << '\n';
    for (const auto& s : traj.samples) {
        out << format_double(s.t) << ',' << format_double(s.state.theta) << ','
            << format_double(s.state.omega) << ',' << format_double(s.u_control)
            << ',' << format_double(s.u_noise) << '\n';
    }
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::io, "cannot open for writing: " + path);
    write_trajectory_csv(traj, out);
    if (!out)
        throw Error(ErrorCode::io, "write failed: " + path);
}

Trajectory read_trajectory_csv(std::istream& in, const std::string& source_label) {
    std::string line;
    if (!std::getline(in, line))
        throw Error(ErrorCode::parse, source_label + ": empty trajectory file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kTrajectoryHeader)
        throw Error(ErrorCode::parse, source_label + ": expected header '" +
                                          std::string(kTrajectoryHeader) + "', got '" +
                                          line + "'");

    Trajectory traj;
    traj.source = source_label;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv_row(line);
        if (fields.size() != 5)
            throw Error(ErrorCode::parse, source_label + ": row " + std::to_string(row) +
                                              ": expected 5 fields, got " +
                                              std::to_string(fields.size()));
        double v[5];
        for (int i = 0; i < 5; ++i) {
            if (!parse_double(fields[i], v[i]))
                throw Error(ErrorCode::parse, source_label + ": row " +
                                                  std::to_string(row) +
                                                  ": non-numeric field '" + fields[i] + "'");
        }
        if (!traj.samples.empty() && v[0] <= traj.samples.back().t)
            throw Error(ErrorCode::parse, source_label + ": row " + std::to_string(row) +
                                              ": timestamps must be strictly increasing");
        traj.samples.push_back({v[0], {v[1], v[2]}, v[3], v[4]});
    }
    if (traj.samples.size() >= 2)
        traj.dt_nominal = traj.samples[1].t - traj.samples[0].t;
    return traj;
}

Trajectory read_trajectory_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::io, "cannot open: " + path);
    return read_trajectory_csv(in, path);
}

} // namespace pendkit
