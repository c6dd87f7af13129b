// Builders for the four linear error-state models and the machine checks of
// the properties that justify them: the group-affine identity of the
// inertial-frame dynamics, the log-linear attitude error solution, and a
// dual-trajectory finite-difference check of each model's F matrix.
//
// State layout is always (attitude err, velocity err, position err,
// gyro bias, accel bias); the meaning of the first nine components depends on
// the model kind:
//   Rso  inertial-frame attitude error, additive velocity/position errors
//   Lso  body-frame attitude error, additive velocity/position errors
//   Rse  right group error T * T_computed^-1
//   Lse  left group error T_computed^-1 * T
#pragma once

#include <functional>
#include <string>

#include "align/se23.hpp"
#include "align/strapdown.hpp"
#include "align/types.hpp"

namespace align::errmodel {

enum class ModelKind { Rso, Lso, Rse, Lse };

const char* to_string(ModelKind kind);
// Parses "rso|lso|rse|lse" (case-insensitive); throws std::invalid_argument.
ModelKind model_kind_from_string(const std::string& s);

struct NoiseSpec {
    double gyro_density = 0.0;   // [rad/s/sqrt(Hz)]
    double accel_density = 0.0;  // [m/s^2/sqrt(Hz)]
};

struct SystemMatrices {
    Mat15 F = Mat15::Zero();
    Mat15x6 G = Mat15x6::Zero();
    Mat3x15 H = Mat3x15::Zero();
};

// Evaluation-time inputs shared by the builders. gyro/accel are the measured
// (bias-compensated, if feedback is active) IMU readings; g_i is the known
// gravity input in inertial axes.
struct BuildInputs {
    Vec3 gyro = Vec3::Zero();
    Vec3 accel = Vec3::Zero();
    Vec3 g_i = Vec3::Zero();
};

SystemMatrices build_rso(const strapdown::NavStateI& s, const BuildInputs& in);
SystemMatrices build_lso(const strapdown::NavStateI& s, const BuildInputs& in);
SystemMatrices build_rse(const strapdown::NavStateI& s, const BuildInputs& in);
// With transformed_measurement set, H is the constant form that pairs with an
// innovation premultiplied by C_b^i^T.
SystemMatrices build_lse(const strapdown::NavStateI& s, const BuildInputs& in,
                         bool transformed_measurement);

SystemMatrices build_model(ModelKind kind, const strapdown::NavStateI& s, const BuildInputs& in,
                           bool lse_transformed_measurement = false);

// The inertial-frame dynamics as a function of the group state: 5x5 matrix
// [C*(w x), C*f + g_i, v; 0; 0].
Mat5 gamma_u(const se23::GroupElement& T, const BuildInputs& u);

// Frobenius norm of Gamma(T1*T2) - Gamma(T1)*T2 - T1*Gamma(T2) + T1*Gamma(I)*T2,
// divided by max(1, ||Gamma(T1*T2)||_F). Zero (to roundoff) for the true
// dynamics; this is the group-affine property.
double group_affine_residual(const se23::GroupElement& T1, const se23::GroupElement& T2,
                             const BuildInputs& u);

// Integrates the body-frame attitude-error matrix ODE
//   d(dC)/dt = dC*(w x) - (w x)*dC
// by RK4 from dC(0) = exp(phi0) along the attitude trajectory C(t) generated
// by the constant body rate omega_b from C(0) = I, and returns the maximum
// angular deviation of log(dC_t) from the closed form C_t^T * phi0. Small for
// arbitrarily large |phi0|; this is the log-linear property.
double log_linear_check(const Vec3& omega_b, double duration, double dt, const Vec3& phi0);

// Dual-trajectory finite-difference check of a model's F matrix. The error
// dx0 is injected exactly per the model's error definition, the true and
// computed trajectories advance by one explicit Euler step of the nonlinear
// inertial-frame kinematics (matching the O(dt^2) truncation of I + F*dt on
// the linear side), the new error is extracted exactly, and its increment is
// compared against F*dx0*dt blockwise. Returns the worst per-block relative
// error over the nine navigation components. `tamper`, when set, is applied
// to F first (negative-control hook).
double finite_difference_error(ModelKind kind, const strapdown::NavStateI& truth,
                               const Vec3& omega_true, const Vec3& f_true, const Vec3& g_i,
                               const Vec15& dx0, double dt,
                               const std::function<void(Mat15&)>& tamper = nullptr);

}  // namespace align::errmodel
