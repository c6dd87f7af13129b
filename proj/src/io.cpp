#include "align/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace align::io {

namespace fs = std::filesystem;

std::string format_double(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

void append_field(std::string& line, double x) {
    if (!line.empty()) line.push_back(',');
    line += format_double(x);
}

ParseError::ParseError(const fs::path& file, int line, const std::string& message)
    : std::runtime_error(file.string() + ":" + std::to_string(line) + ": " + message),
      line_(line) {}

void write_file_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kDegToRad = std::numbers::pi / 180.0;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_field(const fs::path& file, int line_no, const std::string& field) {
    const std::string f = trim(field);
    double v = 0.0;
    const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
    if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        throw ParseError(file, line_no, "cannot parse number '" + f + "'");
    }
    return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

// Streams a CSV file row by row, enforcing the expected header.
template <typename RowFn>
void read_csv(const fs::path& path, const std::string& expected_header, RowFn&& on_row) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::string line;
    int line_no = 0;
    bool saw_header = false;
    const std::size_t n_cols = split(expected_header, ',').size();
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (!saw_header) {
            if (t != expected_header) {
                throw ParseError(path, line_no,
                                 "expected header '" + expected_header + "', got '" + t + "'");
            }
            saw_header = true;
            continue;
        }
        const auto fields = split(t, ',');
        if (fields.size() != n_cols) {
            throw ParseError(path, line_no,
                             "expected " + std::to_string(n_cols) + " fields, got " +
                                 std::to_string(fields.size()));
        }
        std::vector<double> row(n_cols);
        for (std::size_t i = 0; i < n_cols; ++i) row[i] = parse_field(path, line_no, fields[i]);
        on_row(line_no, row);
    }
    if (!saw_header) throw ParseError(path, line_no, "missing header row");
}

}  // namespace

std::string imu_csv(const std::vector<strapdown::ImuSample>& samples) {
    std::string out = "t,gx,gy,gz,ax,ay,az\n";
    for (const auto& s : samples) {
        std::string line;
        append_field(line, s.t);
        for (int i = 0; i < 3; ++i) append_field(line, s.gyro[i]);
        for (int i = 0; i < 3; ++i) append_field(line, s.accel[i]);
        out += line;
        out.push_back('\n');
    }
    return out;
}

std::vector<strapdown::ImuSample> read_imu_csv(const fs::path& path) {
    std::vector<strapdown::ImuSample> out;
    read_csv(path, "t,gx,gy,gz,ax,ay,az", [&](int line_no, const std::vector<double>& row) {
        strapdown::ImuSample s;
        s.t = row[0];
        s.gyro = Vec3(row[1], row[2], row[3]);
        s.accel = Vec3(row[4], row[5], row[6]);
        if (!out.empty() && !(s.t > out.back().t)) {
            throw ParseError(path, line_no, "timestamps non-monotone");
        }
        out.push_back(s);
    });
    return out;
}

std::string aiding_csv(const std::vector<kf::AidingSample>& samples) {
    std::string out = "t,lat_deg,lon_deg,h_m,ve,vn,vu\n";
    for (const auto& s : samples) {
        std::string line;
        append_field(line, s.t);
        append_field(line, s.p.lat * kRadToDeg);
        append_field(line, s.p.lon * kRadToDeg);
        append_field(line, s.p.h);
        for (int i = 0; i < 3; ++i) append_field(line, s.v_enu[i]);
        out += line;
        out.push_back('\n');
    }
    return out;
}

std::vector<kf::AidingSample> read_aiding_csv(const fs::path& path) {
    std::vector<kf::AidingSample> out;
    read_csv(path, "t,lat_deg,lon_deg,h_m,ve,vn,vu",
             [&](int line_no, const std::vector<double>& row) {
                 kf::AidingSample s;
                 s.t = row[0];
                 try {
                     s.p = earth::GeoPosition(row[1] * kDegToRad, row[2] * kDegToRad, row[3]);
                 } catch (const std::invalid_argument& e) {
                     throw ParseError(path, line_no, e.what());
                 }
                 s.v_enu = Vec3(row[4], row[5], row[6]);
                 if (!out.empty() && !(s.t > out.back().t)) {
                     throw ParseError(path, line_no, "timestamps non-monotone");
                 }
                 out.push_back(s);
             });
    return out;
}

Config Config::parse_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path.string());
}

Config Config::parse_string(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']') {
                throw ParseError(origin, line_no, "malformed section header '" + t + "'");
            }
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ParseError(origin, line_no, "expected 'key = value', got '" + t + "'");
        }
        const std::string key = trim(t.substr(0, eq));
        if (key.empty()) throw ParseError(origin, line_no, "empty key");
        cfg.sections_[section][key] = trim(t.substr(eq + 1));
    }
    return cfg;
}

void Config::fail(const std::string& section, const std::string& key,
                  const std::string& why) const {
    throw std::runtime_error(origin_ + ": [" + section + "] " + key + ": " + why);
}

bool Config::has(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::string Config::get_string(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end() || !s->second.count(key)) fail(section, key, "missing required key");
    return s->second.at(key);
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
    return has(section, key) ? get_string(section, key) : fallback;
}

double Config::get_double(const std::string& section, const std::string& key) const {
    const std::string v = get_string(section, key);
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
        fail(section, key, "cannot parse number '" + v + "'");
    }
    return out;
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

long Config::get_long(const std::string& section, const std::string& key, long fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get_string(section, key);
    long out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
        fail(section, key, "cannot parse integer '" + v + "'");
    }
    return out;
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    if (!has(section, key)) return fallback;
    std::string v = get_string(section, key);
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    fail(section, key, "cannot parse boolean '" + v + "'");
}

Vec3 Config::get_vec3(const std::string& section, const std::string& key,
                      const Vec3& fallback) const {
    const auto v = get_vec3_opt(section, key);
    return v ? *v : fallback;
}

std::optional<Vec3> Config::get_vec3_opt(const std::string& section, const std::string& key) const {
    if (!has(section, key)) return std::nullopt;
    const std::string v = get_string(section, key);
    std::istringstream ss(v);
    Vec3 out;
    if (!(ss >> out.x() >> out.y() >> out.z())) {
        fail(section, key, "expected three numbers, got '" + v + "'");
    }
    std::string rest;
    if (ss >> rest) fail(section, key, "expected exactly three numbers, got '" + v + "'");
    return out;
}

std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<SvgSeries>& series,
                           int width, int height) {
    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b"};
    const int ml = 70, mr = 20, mt = 40, mb = 50;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool first = true;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            if (first) {
                xmin = xmax = x;
                ymin = ymax = y;
                first = false;
            } else {
                xmin = std::min(xmin, x);
                xmax = std::max(xmax, x);
                ymin = std::min(ymin, y);
                ymax = std::max(ymax, y);
            }
        }
    }
    if (xmax - xmin < 1e-12) xmax = xmin + 1.0;
    if (ymax - ymin < 1e-12) {
        ymax = ymin + 1.0;
        ymin -= 1.0;
    }
    const auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    const auto py = [&](double y) { return mt + (ymax - y) / (ymax - ymin) * ph; };

    std::string svg;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                  "font-family=\"sans-serif\" font-size=\"12\">\n",
                  width, height);
    svg += buf;
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%d\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">%s</text>\n",
                  width / 2, title.c_str());
    svg += buf;
    // Axes box and ticks.
    std::snprintf(buf, sizeof(buf),
                  "<rect x=\"%d\" y=\"%d\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" "
                  "stroke=\"#444\"/>\n",
                  ml, mt, pw, ph);
    svg += buf;
    for (int i = 0; i <= 5; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 5.0;
        const double yv = ymin + (ymax - ymin) * i / 5.0;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.1f\" y=\"%d\" text-anchor=\"middle\">%.4g</text>\n", px(xv),
                      height - mb + 18, xv);
        svg += buf;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%d\" y=\"%.1f\" text-anchor=\"end\">%.4g</text>\n", ml - 6,
                      py(yv) + 4, yv);
        svg += buf;
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"%d\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ddd\"/>\n",
                      ml, py(yv), ml + pw, py(yv));
        svg += buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%d\" y=\"%d\" text-anchor=\"middle\">%s</text>\n", width / 2,
                  height - 12, x_label.c_str());
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"16\" y=\"%d\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
                  "%d)\">%s</text>\n",
                  height / 2, height / 2, y_label.c_str());
    svg += buf;

    int ci = 0;
    for (const auto& s : series) {
        const char* color = kColors[ci % 6];
        std::string pts;
        for (const auto& [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", px(x), py(y));
            pts += buf;
        }
        svg += "<polyline fill=\"none\" stroke=\"";
        svg += color;
        svg += "\" stroke-width=\"1.3\" points=\"" + pts + "\"/>\n";
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%d\" y=\"%d\" fill=\"%s\">%s</text>\n", ml + 8 + 110 * ci,
                      mt - 8, color, s.name.c_str());
        svg += buf;
        ++ci;
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace align::io
