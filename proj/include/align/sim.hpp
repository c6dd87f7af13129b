// Static-condition IMU synthesis, the Monte Carlo harness for comparing the
// four error models on identical sensor data, attitude-error metrics, and the
// analytic precision bound of static alignment.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "align/kf.hpp"
#include "align/strapdown.hpp"
#include "align/types.hpp"

namespace align::sim {

// Unit conversion table for the sensor-spec unit styles.
double deg_per_hour_to_rad_s(double x);
// Angle random walk: deg/sqrt(hour) -> rad/sqrt(s) (== rad/s/sqrt(Hz)).
double deg_per_sqrt_hour_to_si(double x);
// micro-g relative to a supplied gravity magnitude.
double micro_g_to_mps2(double x, double gravity);

struct MisalignSpec {
    enum class Kind { Fixed, Uniform };
    Kind kind = Kind::Uniform;
    Vec3 fixed_deg = Vec3::Zero();   // (pitch, roll, yaw)
    double horiz_max_deg = 90.0;     // uniform bounds for pitch/roll
    double yaw_max_deg = 180.0;
};

struct SimConfig {
    earth::GeoPosition p0;
    strapdown::EulerAngles true_att;       // constant true attitude [rad]
    double duration_s = 600.0;
    double imu_rate_hz = 100.0;
    double aiding_rate_hz = 1.0;
    Vec3 gyro_bias = Vec3::Zero();         // [rad/s], body axes
    double gyro_noise_density = 0.0;       // [rad/s/sqrt(Hz)]
    Vec3 accel_bias = Vec3::Zero();        // [m/s^2], body axes
    double accel_noise_density = 0.0;      // [m/s^2/sqrt(Hz)]
    MisalignSpec misalign;
    std::uint64_t seed = 1;
};

struct SimStreams {
    std::vector<strapdown::ImuSample> imu;
    std::vector<kf::AidingSample> aiding;
    Mat3 c_b_n_true;
};

// Deterministic per-purpose RNG streams split from the master seed.
std::mt19937_64 misalignment_rng(std::uint64_t seed, std::uint64_t trial);
std::mt19937_64 noise_rng(std::uint64_t seed, std::uint64_t trial);

// Truth: omega = C_b^n^T w_ie^n, f = -C_b^n^T g^n; measured adds the constant
// biases and white noise of std density*sqrt(rate) per sample. Aiding is the
// exact constant position with zero velocity.
SimStreams simulate_static_imu(const SimConfig& cfg, std::mt19937_64& noise);

// Draws (pitch, roll, yaw) misalignment in degrees.
Vec3 sample_misalignment(std::mt19937_64& rng, const MisalignSpec& spec);

// Initial attitude guess: true Euler angles plus the misalignment triple.
Mat3 apply_misalignment(const strapdown::EulerAngles& true_att, const Vec3& mis_deg);

// Analytic precision bound of static alignment from constant sensor biases
// expressed in navigation axes: (phi_x, phi_y, phi_z) [rad].
Vec3 utmost_precision(const Vec3& accel_bias_n, const Vec3& gyro_bias_n, double lat,
                      double gravity);

// Per-channel Euler difference true - estimate in degrees, each channel
// wrapped to (-180, 180].
Vec3 attitude_error(const Mat3& c_true, const Mat3& c_est);

// Attitude error time series of an alignment run against a constant truth.
std::vector<std::pair<double, Vec3>> error_series(const kf::AlignmentRun& run,
                                                  const Mat3& c_b_n_true);

// Mean over the series entries with t >= t_from.
Vec3 series_mean(const std::vector<std::pair<double, Vec3>>& series, double t_from);

struct TrialOutcome {
    Vec3 mis_deg = Vec3::Zero();
    Vec3 steady_mean_deg = Vec3::Zero();  // signed mean over the final window
    Vec3 final_err_deg = Vec3::Zero();
    bool converged = false;               // |final yaw error| < 1 deg
};

struct McResult {
    errmodel::ModelKind kind{};
    std::vector<TrialOutcome> trials;
    double converged_fraction = 0.0;
    Vec3 steady_mean_deg = Vec3::Zero();
    Vec3 steady_std_deg = Vec3::Zero();
    Vec3 steady_mean_abs_deg = Vec3::Zero();
};

inline constexpr double kSteadyWindowS = 100.0;
inline constexpr double kConvergedYawDeg = 1.0;

// Runs `trials` paired alignments (all kinds see identical sensor data per
// trial). Per-trial attitude covariance is initialized to (misalignment/3)^2;
// the rest of `base` is used as-is. Deterministic for a fixed seed regardless
// of thread count.
std::vector<McResult> monte_carlo(const SimConfig& cfg,
                                  const std::vector<errmodel::ModelKind>& kinds,
                                  unsigned trials, const kf::FilterConfig& base,
                                  unsigned threads = 0);

// Navigation-frame mechanization used only to cross-check the static truth
// generation against the inertial-frame path.
struct NavFrameState {
    Mat3 c_b_n = Mat3::Identity();
    Vec3 v_n = Vec3::Zero();
    earth::GeoPosition p;
};

NavFrameState nav_frame_step(const NavFrameState& s, const strapdown::ImuSample& a,
                             const strapdown::ImuSample& b);

}  // namespace align::sim
