#include "align/earth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "align/se23.hpp"

namespace align::earth {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kPolarEps = 1e-9;

double wrap_pi(double angle) {
    angle = std::fmod(angle + kPi, 2.0 * kPi);
    if (angle < 0.0) angle += 2.0 * kPi;
    angle -= kPi;
    // fmod lands on -pi for inputs like -pi; the convention is (-pi, pi].
    return angle == -kPi ? kPi : angle;
}
}  // namespace

GeoPosition::GeoPosition(double lat_rad, double lon_rad, double height_m)
    : lat(lat_rad), lon(wrap_pi(lon_rad)), h(height_m) {
    if (!std::isfinite(lat_rad) || !std::isfinite(lon_rad) || !std::isfinite(height_m)) {
        throw std::invalid_argument("GeoPosition: non-finite component");
    }
    if (std::abs(lat_rad) > kPi / 2.0 + 1e-12) {
        throw std::invalid_argument("GeoPosition: |latitude| exceeds pi/2");
    }
}

Radii radii(double lat) {
    const double s2 = std::sin(lat) * std::sin(lat);
    const double w = 1.0 - wgs84::kEccSq * s2;
    Radii out;
    out.rn = wgs84::kSemiMajorAxis / std::sqrt(w);
    out.rm = wgs84::kSemiMajorAxis * (1.0 - wgs84::kEccSq) / (w * std::sqrt(w));
    return out;
}

Vec3 earth_rate_n(double lat) {
    return Vec3(0.0, wgs84::kEarthRate * std::cos(lat), wgs84::kEarthRate * std::sin(lat));
}

Vec3 transport_rate(const Vec3& v_enu, const GeoPosition& p) {
    if (std::abs(std::abs(p.lat) - kPi / 2.0) < kPolarEps) {
        throw std::invalid_argument("transport_rate: tan(L) singular at the pole");
    }
    const Radii r = radii(p.lat);
    return Vec3(-v_enu.y() / (r.rm + p.h),
                v_enu.x() / (r.rn + p.h),
                v_enu.x() * std::tan(p.lat) / (r.rn + p.h));
}

Mat3 curvature_matrix(const GeoPosition& p) {
    if (std::abs(std::abs(p.lat) - kPi / 2.0) < kPolarEps) {
        throw std::invalid_argument("curvature_matrix: sec(L) singular at the pole");
    }
    const Radii r = radii(p.lat);
    Mat3 rc = Mat3::Zero();
    rc(0, 1) = 1.0 / (r.rm + p.h);
    rc(1, 0) = 1.0 / (std::cos(p.lat) * (r.rn + p.h));
    rc(2, 2) = 1.0;
    return rc;
}

Vec3 geo_to_ecef(const GeoPosition& p) {
    const double rn = radii(p.lat).rn;
    const double cl = std::cos(p.lat);
    return Vec3((rn + p.h) * cl * std::cos(p.lon),
                (rn + p.h) * cl * std::sin(p.lon),
                (rn * (1.0 - wgs84::kEccSq) + p.h) * std::sin(p.lat));
}

Mat3 ecef_to_enu_dcm(const GeoPosition& p) {
    const double sl = std::sin(p.lat), cl = std::cos(p.lat);
    const double so = std::sin(p.lon), co = std::cos(p.lon);
    Mat3 c;
    c << -so, co, 0.0,
        -sl * co, -sl * so, cl,
        cl * co, cl * so, sl;
    return c;
}

Mat3 earth_spin_dcm(double t) {
    const double a = wgs84::kEarthRate * t;
    Mat3 c;
    c << std::cos(a), std::sin(a), 0.0,
        -std::sin(a), std::cos(a), 0.0,
        0.0, 0.0, 1.0;
    return c;
}

double gravity_magnitude(double lat, double h) {
    const double s2 = std::sin(lat) * std::sin(lat);
    const double g0 = wgs84::kGravityEquator * (1.0 + wgs84::kSomiglianaK * s2) /
                      std::sqrt(1.0 - wgs84::kEccSq * s2);
    const double a = wgs84::kSemiMajorAxis;
    const double f = wgs84::kFlattening;
    const double m = wgs84::kGravityM;
    return g0 * (1.0 - 2.0 / a * (1.0 + f + m - 2.0 * f * s2) * h + 3.0 / (a * a) * h * h);
}

Vec3 gravity_n(const GeoPosition& p) {
    return Vec3(0.0, 0.0, -gravity_magnitude(p.lat, p.h));
}

FrameChain::FrameChain(const GeoPosition& p0) : p0_(p0), c_e0_n0_(ecef_to_enu_dcm(p0)) {}

Mat3 FrameChain::c_e_i(double t) const {
    // C_e^i = C_{e(0)}^{n(0)} * C_e^{e(0)}, the second factor being the
    // transpose of earth_spin_dcm.
    return c_e0_n0_ * earth_spin_dcm(t).transpose();
}

Mat3 FrameChain::c_n_i(double t, const GeoPosition& p) const {
    return c_e_i(t) * ecef_to_enu_dcm(p).transpose();
}

Vec3 FrameChain::r_i(double t, const GeoPosition& p) const {
    return c_e_i(t) * geo_to_ecef(p);
}

Vec3 FrameChain::v_i(double t, const GeoPosition& p, const Vec3& v_enu) const {
    const Vec3 omega_e(0.0, 0.0, wgs84::kEarthRate);
    return c_e_i(t) * omega_e.cross(geo_to_ecef(p)) + c_n_i(t, p) * v_enu;
}

Vec3 FrameChain::gravity_i(double t, const GeoPosition& p) const {
    const Vec3 omega_e(0.0, 0.0, wgs84::kEarthRate);
    const Vec3 centripetal_e = omega_e.cross(omega_e.cross(geo_to_ecef(p)));
    return c_n_i(t, p) * gravity_n(p) + c_e_i(t) * centripetal_e;
}

}  // namespace align::earth
