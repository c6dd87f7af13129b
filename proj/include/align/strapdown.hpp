// SINS mechanization in the frozen-at-start inertial frame and the attitude
// decomposition C_b^n = (C_n^i)^T C_b^i.
#pragma once

#include <vector>

#include "align/earth.hpp"
#include "align/se23.hpp"
#include "align/types.hpp"

namespace align::strapdown {

struct ImuSample {
    double t = 0.0;   // [s]
    Vec3 gyro = Vec3::Zero();   // angular rate w_ib^b [rad/s]
    Vec3 accel = Vec3::Zero();  // specific force f^b [m/s^2]
};

struct NavStateI {
    Mat3 c_b_i = Mat3::Identity();
    Vec3 v_i = Vec3::Zero();  // [m/s]
    Vec3 r_i = Vec3::Zero();  // [m]
    double t = 0.0;

    se23::GroupElement group() const { return {c_b_i, v_i, r_i}; }
    static NavStateI from_group(const se23::GroupElement& g, double t) {
        return {g.C, g.v, g.r, t};
    }
};

// Initializes the inertial-frame state at t = 0 from GNSS position/velocity
// and an attitude guess (stored verbatim besides one orthonormality repair).
NavStateI init_state(const earth::GeoPosition& p0, const Vec3& v0_enu, const Mat3& c_b_n_guess,
                     const earth::FrameChain& chain);

// One mechanization step from sample a to sample b (dt = b.t - a.t).
// Attitude: rotation-vector update with the interval-average rate.
// Velocity: midpoint-attitude specific force plus the supplied gravity input
// g_i_mid (gravitation in inertial axes at the interval midpoint).
// Position: trapezoidal in velocity. Throws on non-increasing timestamps.
NavStateI mechanize_step(const NavStateI& s, const ImuSample& a, const ImuSample& b,
                         const Vec3& g_i_mid);

// C_b^n from the decomposition (both inputs orthonormal).
Mat3 compose_attitude(const Mat3& c_n_i, const Mat3& c_b_i);

struct EulerAngles {
    double pitch = 0.0;  // [rad], about the body/nav x after yaw
    double roll = 0.0;   // [rad]
    double yaw = 0.0;    // [rad], wrapped to (-pi, pi]
};

// ENU attitude as C_b^n = Rz(yaw) * Rx(pitch) * Ry(roll); pitch in
// [-pi/2, pi/2]. At gimbal lock (|pitch| -> pi/2) roll is set to zero and yaw
// absorbs the remaining rotation.
EulerAngles dcm_to_euler(const Mat3& c_b_n);
Mat3 euler_to_dcm(const EulerAngles& e);

}  // namespace align::strapdown
