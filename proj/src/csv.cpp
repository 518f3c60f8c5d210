#include "emloc/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "emloc/errors.hpp"

namespace emloc {

namespace {

std::string fmt(double v, const char* spec) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::string g9(double v) { return fmt(v, "%.9g"); }
std::string g17(double v) { return fmt(v, "%.17g"); }

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary); // LF line endings on every platform
    if (!out)
        throw ConfigError("cannot open " + path + " for writing");
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open " + path);
    return in;
}

std::vector<std::string> split(const std::string& line) {
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

double parse_num(const std::string& s, const std::string& path, std::size_t row) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || !std::isfinite(v))
        throw ConfigError(path + ": malformed number '" + s + "' at row "
                          + std::to_string(row));
    return v;
}

// Reads rows of `cols` numeric fields (plus optional trailing text fields handled by
// the caller), enforcing the expected header.
template <typename RowFn>
void read_rows(const std::string& path, const std::string& header, std::size_t cols,
               bool trailing_text, RowFn&& fn) {
    auto in = open_in(path);
    std::string line;
    std::size_t row = 0;
    if (!std::getline(in, line))
        throw ConfigError(path + ": empty file");
    ++row;
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != header)
        throw ConfigError(path + ": unexpected header '" + line + "'");
    while (std::getline(in, line)) {
        ++row;
        if (line.empty())
            continue;
        const auto fields = split(line);
        const std::size_t expected = cols + (trailing_text ? 1 : 0);
        if (fields.size() != expected)
            throw ConfigError(path + ": expected " + std::to_string(expected)
                              + " fields, got " + std::to_string(fields.size()) + " at row "
                              + std::to_string(row));
        std::vector<double> nums(cols);
        for (std::size_t i = 0; i < cols; ++i)
            nums[i] = parse_num(fields[i], path, row);
        fn(nums, trailing_text ? fields.back() : std::string(), row);
    }
}

} // namespace

void write_samples_csv(const std::string& path, const std::vector<SampleRow>& rows) {
    auto out = open_out(path);
    out << "t_s,bx_gauss,by_gauss,bz_gauss,yaw_rad,pitch_rad,roll_rad\n";
    for (const auto& r : rows) {
        out << g17(r.mag.t) << ',' << g17(r.mag.field.x()) << ',' << g17(r.mag.field.y()) << ','
            << g17(r.mag.field.z()) << ',' << g17(r.nav.yaw_rad) << ',' << g17(r.nav.pitch_rad)
            << ',' << g17(r.nav.roll_rad) << '\n';
    }
}

std::vector<SampleRow> read_samples_csv(const std::string& path) {
    std::vector<SampleRow> rows;
    read_rows(path, "t_s,bx_gauss,by_gauss,bz_gauss,yaw_rad,pitch_rad,roll_rad", 7, false,
              [&](const std::vector<double>& n, const std::string&, std::size_t) {
                  SampleRow r;
                  r.mag.t = n[0];
                  r.mag.field = Vec3(n[1], n[2], n[3]);
                  r.nav = Attitude{n[6], n[5], n[4]};
                  rows.push_back(r);
              });
    return rows;
}

void write_estimates_csv(const std::string& path, const std::vector<PoseEstimate>& estimates) {
    auto out = open_out(path);
    out << "t_s,x_m,y_m,z_m,beacon_yaw_rad,residual_gauss,flag\n";
    for (const auto& e : estimates) {
        out << g9(e.t) << ',' << g9(e.r.x()) << ',' << g9(e.r.y()) << ',' << g9(e.r.z()) << ','
            << g9(e.beacon_yaw) << ',' << g9(e.residual_norm) << ',' << to_string(e.flag) << '\n';
    }
}

std::vector<PoseEstimate> read_estimates_csv(const std::string& path) {
    std::vector<PoseEstimate> rows;
    read_rows(path, "t_s,x_m,y_m,z_m,beacon_yaw_rad,residual_gauss,flag", 6, true,
              [&](const std::vector<double>& n, const std::string& flag, std::size_t row) {
                  PoseEstimate e;
                  e.t = n[0];
                  e.r = Vec3(n[1], n[2], n[3]);
                  e.beacon_yaw = n[4];
                  e.residual_norm = n[5];
                  if (flag == "raw")
                      e.flag = EstimateFlag::raw;
                  else if (flag == "smoothed")
                      e.flag = EstimateFlag::smoothed;
                  else if (flag == "gated")
                      e.flag = EstimateFlag::gated;
                  else if (flag == "outlier-rejected")
                      e.flag = EstimateFlag::outlier_rejected;
                  else
                      throw ConfigError(path + ": unknown flag '" + flag + "' at row "
                                        + std::to_string(row));
                  rows.push_back(e);
              });
    return rows;
}

void write_truth_csv(const std::string& path, const std::vector<TruthRow>& rows) {
    auto out = open_out(path);
    out << "t_s,x_m,y_m,z_m,beacon_yaw_rad\n";
    for (const auto& r : rows) {
        out << g9(r.t) << ',' << g9(r.r.x()) << ',' << g9(r.r.y()) << ',' << g9(r.r.z()) << ','
            << g9(r.beacon_yaw) << '\n';
    }
}

std::vector<TruthRow> read_truth_csv(const std::string& path) {
    std::vector<TruthRow> rows;
    read_rows(path, "t_s,x_m,y_m,z_m,beacon_yaw_rad", 5, false,
              [&](const std::vector<double>& n, const std::string&, std::size_t) {
                  rows.push_back(TruthRow{n[0], Vec3(n[1], n[2], n[3]), n[4]});
              });
    return rows;
}

void write_points_csv(const std::string& path, const std::vector<Vec3>& points) {
    auto out = open_out(path);
    out << "x_m,y_m,z_m\n";
    for (const auto& p : points)
        out << g9(p.x()) << ',' << g9(p.y()) << ',' << g9(p.z()) << '\n';
}

std::vector<Vec3> read_points_csv(const std::string& path) {
    std::vector<Vec3> rows;
    read_rows(path, "x_m,y_m,z_m", 3, false,
              [&](const std::vector<double>& n, const std::string&, std::size_t) {
                  rows.emplace_back(n[0], n[1], n[2]);
              });
    return rows;
}

void write_phase_csv(const std::string& path, const std::vector<PhaseRow>& rows) {
    auto out = open_out(path);
    out << "t_s,phase_rad\n";
    for (const auto& r : rows)
        out << g9(r.t) << ',' << g9(r.phase_rad) << '\n';
}

std::vector<PhaseRow> read_phase_csv(const std::string& path) {
    std::vector<PhaseRow> rows;
    read_rows(path, "t_s,phase_rad", 2, false,
              [&](const std::vector<double>& n, const std::string&, std::size_t) {
                  rows.push_back(PhaseRow{n[0], n[1]});
              });
    return rows;
}

void validate_sample_spacing(const std::vector<SampleRow>& rows, double fs_hz) {
    const double dt = 1.0 / fs_hz;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double gap = rows[i].mag.t - rows[i - 1].mag.t;
        if (gap <= 0.0 || std::abs(gap - dt) > 1e-9)
            throw ConfigError("sample stream has a time gap at row " + std::to_string(i + 2)
                              + ": spacing " + std::to_string(gap) + " s, expected "
                              + std::to_string(dt) + " s");
    }
}

} // namespace emloc
