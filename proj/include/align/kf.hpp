// Discrete linear Kalman filter, the SO(3)/SE2(3) retractions of the error
// estimate onto the navigation state, and the full indirect alignment loop:
// mechanize, predict, update at aiding epochs, retract, reset.
#pragma once

#include <span>
#include <utility>
#include <vector>

#include "align/earth.hpp"
#include "align/errmodel.hpp"
#include "align/strapdown.hpp"
#include "align/types.hpp"

namespace align::kf {

struct FilterConfig {
    Vec3 att_sigma0 = Vec3::Zero();     // [rad] per axis, typically misalignment/3
    double vel_sigma0 = 0.1;            // [m/s]
    double pos_sigma0 = 1.0;            // [m]
    double gyro_bias_sigma0 = 0.0;      // [rad/s]
    double accel_bias_sigma0 = 0.0;     // [m/s^2]
    errmodel::NoiseSpec noise;          // continuous densities for Q
    double r_vel = 0.05;                // [m/s] measurement std per axis
    double meas_rate_hz = 1.0;
    double gyro_bias_psd = 0.0;         // optional bias random-walk PSD [(rad/s)^2/Hz], default off
    double accel_bias_psd = 0.0;        // [(m/s^2)^2/Hz]
    bool compensate_imu = true;         // feed bias estimates back into the IMU
    bool lse_transformed_h = false;     // use the constant-H transformed measurement
    double max_aiding_gap_s = 2.5;      // gaps beyond this are warned about
};

struct FilterState {
    Vec15 dx = Vec15::Zero();
    Mat15 P = Mat15::Zero();
    Mat6 Q = Mat6::Zero();   // continuous noise PSD (gyro, accel)
    Mat3 R = Mat3::Zero();
    errmodel::ModelKind kind = errmodel::ModelKind::Lse;
};

// Second-order transition matrix and trapezoidal discrete noise:
//   Phi = I + F dt + F^2 dt^2 / 2
//   Qk  = (Phi G Q G' Phi' + G Q G') dt / 2, symmetrized.
std::pair<Mat15, Mat15> discretize(const Mat15& F, const Mat15x6& G, const Mat6& Q, double dt);

// Predict with (Phi, Qk), then update with (H, y) unless H is exactly zero
// (prediction-only step). Joseph-form covariance update; a numerically
// singular innovation covariance is regularized with a small diagonal and
// logged.
void kf_step(FilterState& fs, const Mat15& Phi, const Mat15& Qk, const Mat3x15& H, const Vec3& y);

// Applies the first nine error-state components onto the navigation state.
strapdown::NavStateI retract_right(const strapdown::NavStateI& s, const Vec9& dx_nav);
strapdown::NavStateI retract_left(const strapdown::NavStateI& s, const Vec9& dx_nav);
strapdown::NavStateI retract_so3(const strapdown::NavStateI& s, const Vec9& dx_nav,
                                 errmodel::ModelKind kind);
strapdown::NavStateI retract(const strapdown::NavStateI& s, const Vec9& dx_nav,
                             errmodel::ModelKind kind);

struct AidingSample {
    double t = 0.0;
    earth::GeoPosition p;
    Vec3 v_enu = Vec3::Zero();
};

struct EpochRecord {
    double t = 0.0;       // seconds since the alignment epoch
    Mat3 c_b_n;           // recomposed attitude estimate
    Vec3 p_att_diag;      // attitude covariance diagonal
    Vec15 dx_post;        // estimate after the update, before the reset
    Mat3 c_b_i;
    Vec3 v_i;
    Vec3 r_i;
    double p_min_eig = 0.0;  // smallest eigenvalue of P after the update
    double p_trace = 0.0;
};

struct AlignmentRun {
    std::vector<EpochRecord> epochs;
    strapdown::NavStateI final_state;
    Vec3 gyro_bias_est = Vec3::Zero();
    Vec3 accel_bias_est = Vec3::Zero();
    Mat15 final_P = Mat15::Zero();
    int aiding_gap_warnings = 0;
};

// Runs the full alignment on an IMU stream with GNSS aiding. aiding[0]
// initializes position/velocity; subsequent samples are measurement epochs
// associated with the nearest IMU sample. Timestamps are taken relative to
// imu[0].t. Throws std::invalid_argument on empty/short streams or
// non-monotonic time.
AlignmentRun align_run(std::span<const strapdown::ImuSample> imu,
                       std::span<const AidingSample> aiding, errmodel::ModelKind kind,
                       const FilterConfig& cfg, const Mat3& c_b_n_guess);

}  // namespace align::kf
