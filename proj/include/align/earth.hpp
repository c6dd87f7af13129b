// WGS-84 earth model and the reference-frame chain that lets the navigation
// frame's attitude, and the inertial-frame velocity/position of a point with
// known geographic coordinates, be computed exactly at any time after the
// alignment epoch.
//
// Frames: b body, n local-level East-North-Up, e ECEF, i the navigation frame
// frozen at the alignment start (n(0)), treated as inertial.
#pragma once

#include "align/types.hpp"

namespace align::earth {

namespace wgs84 {
inline constexpr double kSemiMajorAxis = 6378137.0;          // [m]
inline constexpr double kEccSq = 6.69437999014e-3;           // first eccentricity squared
inline constexpr double kEarthRate = 7.292115e-5;            // [rad/s]
inline constexpr double kFlattening = 1.0 / 298.257223563;
// Somigliana normal gravity and free-air correction constants.
inline constexpr double kGravityEquator = 9.7803253359;      // [m/s^2]
inline constexpr double kSomiglianaK = 1.931852652458e-3;
inline constexpr double kGravityM = 3.449786506841e-3;       // omega^2 a^2 b / GM
}  // namespace wgs84

struct GeoPosition {
    double lat = 0.0;  // [rad], |lat| <= pi/2
    double lon = 0.0;  // [rad], wrapped to (-pi, pi]
    double h = 0.0;    // [m] above the ellipsoid

    GeoPosition() = default;
    // Throws std::invalid_argument on |lat| > pi/2 or non-finite input;
    // wraps the longitude.
    GeoPosition(double lat_rad, double lon_rad, double height_m);
};

struct Radii {
    double rm = 0.0;  // meridian radius of curvature [m]
    double rn = 0.0;  // transverse (normal) radius of curvature [m]
};

Radii radii(double lat);

// Earth rotation rate in ENU axes: [0, w*cos L, w*sin L].
Vec3 earth_rate_n(double lat);

// Angular rate of the local-level frame due to motion over the ellipsoid.
// Throws near the poles (tan L singularity).
Vec3 transport_rate(const Vec3& v_enu, const GeoPosition& p);

// Maps ENU velocity to geographic rates (Ldot, londot, hdot).
Mat3 curvature_matrix(const GeoPosition& p);

// Geodetic to ECEF cartesian.
Vec3 geo_to_ecef(const GeoPosition& p);

// Rotation from ECEF axes to the ENU axes at p (rows: east, north, up).
Mat3 ecef_to_enu_dcm(const GeoPosition& p);

// Attitude change of the earth frame over t seconds of rotation; returns the
// matrix mapping e(0) coordinates to e(t) coordinates, i.e. R_z(-w*t).
Mat3 earth_spin_dcm(double t);

// Normal gravity magnitude (Somigliana model + free-air height correction).
double gravity_magnitude(double lat, double h);

// Plumb gravity in ENU axes: [0, 0, -gamma(L, h)].
Vec3 gravity_n(const GeoPosition& p);

// Frame chain frozen at the alignment epoch t0 = 0 at position p0.
class FrameChain {
public:
    explicit FrameChain(const GeoPosition& p0);

    const GeoPosition& p0() const { return p0_; }
    const Mat3& c_e0_n0() const { return c_e0_n0_; }

    // C_e^i(t): ECEF -> inertial.
    Mat3 c_e_i(double t) const;

    // C_n^i(t): local-level frame at geographic position p -> inertial.
    // Identity at t = 0 with p = p0.
    Mat3 c_n_i(double t, const GeoPosition& p) const;

    // Inertial-frame position of the point with geographic coordinates p.
    Vec3 r_i(double t, const GeoPosition& p) const;

    // Inertial-frame velocity from ground velocity (ENU) and position.
    Vec3 v_i(double t, const GeoPosition& p, const Vec3& v_enu) const;

    // Gravitational acceleration in the inertial frame: plumb gravity plus
    // the earth-rotation centripetal term, so that v_i integrates the true
    // kinematics of an earth-fixed point.
    Vec3 gravity_i(double t, const GeoPosition& p) const;

private:
    GeoPosition p0_;
    Mat3 c_e0_n0_;  // ECEF(0) -> n(0), cached
};

}  // namespace align::earth
