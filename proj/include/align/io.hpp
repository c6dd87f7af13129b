// File plumbing for the CLI: round-trippable numeric formatting, the CSV
// schemas shared with the simulator, the sectioned key/value config format,
// atomic file writes, and SVG chart emission.
//
// CSV conventions: one header row, '.' decimal separator, newline-terminated
// final line, '#' starts a comment line. Doubles are written with shortest
// round-trip formatting, so re-parsing an emitted file is lossless.
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "align/kf.hpp"
#include "align/strapdown.hpp"

namespace align::io {

// Shortest representation that parses back to the identical double.
std::string format_double(double x);
void append_field(std::string& line, double x);

// Parse error carrying the 1-based line number of the offending input.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::filesystem::path& file, int line, const std::string& message);
    int line() const { return line_; }

private:
    int line_;
};

void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// IMU stream schema: t,gx,gy,gz,ax,ay,az  (s, rad/s, m/s^2).
std::string imu_csv(const std::vector<strapdown::ImuSample>& samples);
std::vector<strapdown::ImuSample> read_imu_csv(const std::filesystem::path& path);

// Aiding stream schema: t,lat_deg,lon_deg,h_m,ve,vn,vu  (s, deg, m, m/s ENU).
std::string aiding_csv(const std::vector<kf::AidingSample>& samples);
std::vector<kf::AidingSample> read_aiding_csv(const std::filesystem::path& path);

// Sectioned key/value configuration:
//   # comment
//   [section]
//   key = value
// Values keep their raw text; typed getters parse on demand and name the
// offending section.key on failure.
class Config {
public:
    static Config parse_file(const std::filesystem::path& path);
    static Config parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    long get_long(const std::string& section, const std::string& key, long fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    // Whitespace-separated triple, e.g. "89 89 179".
    Vec3 get_vec3(const std::string& section, const std::string& key, const Vec3& fallback) const;
    std::optional<Vec3> get_vec3_opt(const std::string& section, const std::string& key) const;

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
    std::string origin_;

    [[noreturn]] void fail(const std::string& section, const std::string& key,
                           const std::string& why) const;
};

// Minimal SVG line chart; one polyline per series.
struct SvgSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
};
std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<SvgSeries>& series,
                           int width = 860, int height = 480);

}  // namespace align::io
