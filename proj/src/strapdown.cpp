#include "align/strapdown.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace align::strapdown {

NavStateI init_state(const earth::GeoPosition& p0, const Vec3& v0_enu, const Mat3& c_b_n_guess,
                     const earth::FrameChain& chain) {
    NavStateI s;
    // C_n^i(0) = I, so the body-to-inertial guess equals the body-to-nav guess.
    s.c_b_i = se23::orthonormalize(c_b_n_guess);
    s.v_i = chain.v_i(0.0, p0, v0_enu);
    s.r_i = chain.r_i(0.0, p0);
    s.t = 0.0;
    return s;
}

NavStateI mechanize_step(const NavStateI& s, const ImuSample& a, const ImuSample& b,
                         const Vec3& g_i_mid) {
    const double dt = b.t - a.t;
    if (!(dt > 0.0)) {
        throw std::invalid_argument("mechanize_step: non-increasing timestamps");
    }
    const Vec3 omega = 0.5 * (a.gyro + b.gyro);
    const Vec3 f = 0.5 * (a.accel + b.accel);

    NavStateI out;
    out.t = b.t;
    out.c_b_i = s.c_b_i * se23::so3_exp(omega * dt);
    const Mat3 c_mid = s.c_b_i * se23::so3_exp(omega * (0.5 * dt));
    const Vec3 dv = (c_mid * f + g_i_mid) * dt;
    out.v_i = s.v_i + dv;
    out.r_i = s.r_i + s.v_i * dt + 0.5 * dv * dt;
    return out;
}

Mat3 compose_attitude(const Mat3& c_n_i, const Mat3& c_b_i) {
    return c_n_i.transpose() * c_b_i;
}

EulerAngles dcm_to_euler(const Mat3& c) {
    EulerAngles e;
    const double s_pitch = std::clamp(c(2, 1), -1.0, 1.0);
    e.pitch = std::asin(s_pitch);
    if (std::abs(s_pitch) > 1.0 - 1e-12) {
        // Gimbal lock: split by convention roll := 0.
        e.roll = 0.0;
        e.yaw = std::atan2(c(1, 0), c(0, 0));
    } else {
        e.roll = std::atan2(-c(2, 0), c(2, 2));
        e.yaw = std::atan2(-c(0, 1), c(1, 1));
    }
    if (e.yaw == -std::numbers::pi) e.yaw = std::numbers::pi;
    return e;
}

Mat3 euler_to_dcm(const EulerAngles& e) {
    const double sp = std::sin(e.pitch), cp = std::cos(e.pitch);
    const double sr = std::sin(e.roll), cr = std::cos(e.roll);
    const double sy = std::sin(e.yaw), cy = std::cos(e.yaw);
    Mat3 c;
    c << cy * cr - sy * sp * sr, -sy * cp, cy * sr + sy * sp * cr,
        sy * cr + cy * sp * sr, cy * cp, sy * sr - cy * sp * cr,
        -cp * sr, sp, cp * cr;
    return c;
}

}  // namespace align::strapdown
