#include "align/kf.hpp"

#include <cmath>
#include <stdexcept>

#include "align/log.hpp"

namespace align::kf {

using errmodel::ModelKind;
using strapdown::NavStateI;

std::pair<Mat15, Mat15> discretize(const Mat15& F, const Mat15x6& G, const Mat6& Q, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("discretize: dt must be positive");
    const Mat15 Fdt = F * dt;
    const Mat15 Phi = Mat15::Identity() + Fdt + 0.5 * Fdt * Fdt;
    const Mat15 GQG = G * Q * G.transpose();
    Mat15 Qk = 0.5 * dt * (Phi * GQG * Phi.transpose() + GQG);
    Qk = 0.5 * (Qk + Qk.transpose()).eval();
    return {Phi, Qk};
}

void kf_step(FilterState& fs, const Mat15& Phi, const Mat15& Qk, const Mat3x15& H, const Vec3& y) {
    // Predict.
    fs.dx = Phi * fs.dx;
    fs.P = Phi * fs.P * Phi.transpose() + Qk;
    fs.P = 0.5 * (fs.P + fs.P.transpose()).eval();

    if (H.isZero(0.0)) return;

    // Update, Joseph form.
    Mat3 S = H * fs.P * H.transpose() + fs.R;
    Eigen::LDLT<Mat3> ldlt(S);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        const double eps = 1e-12 * std::max(1.0, S.trace() / 3.0);
        ALIGN_LOG_WARN("kf_step: regularizing singular innovation covariance (eps=%g)", eps);
        S += eps * Mat3::Identity();
        ldlt.compute(S);
    }
    const Eigen::Matrix<double, 15, 3> K = ldlt.solve(H * fs.P).transpose();
    fs.dx += K * (y - H * fs.dx);
    const Mat15 IKH = Mat15::Identity() - K * H;
    fs.P = IKH * fs.P * IKH.transpose() + K * fs.R * K.transpose();
    fs.P = 0.5 * (fs.P + fs.P.transpose()).eval();
}

NavStateI retract_right(const NavStateI& s, const Vec9& dx_nav) {
    if (dx_nav.isZero(0.0)) return s;
    const Vec3 phi = dx_nav.segment<3>(0);
    const Mat3 dC = se23::so3_exp(phi);
    const Mat3 jl = se23::left_jacobian(phi);
    NavStateI out = s;
    out.c_b_i = dC * s.c_b_i;
    out.v_i = dC * s.v_i + jl * dx_nav.segment<3>(3);
    out.r_i = dC * s.r_i + jl * dx_nav.segment<3>(6);
    return out;
}

NavStateI retract_left(const NavStateI& s, const Vec9& dx_nav) {
    if (dx_nav.isZero(0.0)) return s;
    const Vec3 phi = dx_nav.segment<3>(0);
    const Mat3 jl = se23::left_jacobian(phi);
    NavStateI out = s;
    out.c_b_i = s.c_b_i * se23::so3_exp(phi);
    out.v_i = s.c_b_i * (jl * dx_nav.segment<3>(3)) + s.v_i;
    out.r_i = s.c_b_i * (jl * dx_nav.segment<3>(6)) + s.r_i;
    return out;
}

NavStateI retract_so3(const NavStateI& s, const Vec9& dx_nav, ModelKind kind) {
    if (dx_nav.isZero(0.0)) return s;
    const Vec3 phi = dx_nav.segment<3>(0);
    NavStateI out = s;
    if (kind == ModelKind::Rso) {
        out.c_b_i = se23::so3_exp(phi) * s.c_b_i;
    } else {
        out.c_b_i = s.c_b_i * se23::so3_exp(phi);
    }
    // Additive errors are defined as computed minus true, so they subtract.
    out.v_i = s.v_i - dx_nav.segment<3>(3);
    out.r_i = s.r_i - dx_nav.segment<3>(6);
    return out;
}

NavStateI retract(const NavStateI& s, const Vec9& dx_nav, ModelKind kind) {
    switch (kind) {
        case ModelKind::Rso:
        case ModelKind::Lso: return retract_so3(s, dx_nav, kind);
        case ModelKind::Rse: return retract_right(s, dx_nav);
        case ModelKind::Lse: return retract_left(s, dx_nav);
    }
    throw std::invalid_argument("retract: bad kind");
}

AlignmentRun align_run(std::span<const strapdown::ImuSample> imu,
                       std::span<const AidingSample> aiding, ModelKind kind,
                       const FilterConfig& cfg, const Mat3& c_b_n_guess) {
    if (imu.size() < 2) throw std::invalid_argument("align_run: need at least two IMU samples");
    if (aiding.empty()) throw std::invalid_argument("align_run: need at least one aiding sample");

    const double t0 = imu[0].t;
    const earth::FrameChain chain(aiding[0].p);
    NavStateI state = strapdown::init_state(aiding[0].p, aiding[0].v_enu, c_b_n_guess, chain);

    FilterState fs;
    fs.kind = kind;
    fs.P.setZero();
    fs.P.block<3, 3>(kAttIdx, kAttIdx) = cfg.att_sigma0.cwiseProduct(cfg.att_sigma0).asDiagonal();
    fs.P.block<3, 3>(kVelIdx, kVelIdx) = cfg.vel_sigma0 * cfg.vel_sigma0 * Mat3::Identity();
    fs.P.block<3, 3>(kPosIdx, kPosIdx) = cfg.pos_sigma0 * cfg.pos_sigma0 * Mat3::Identity();
    fs.P.block<3, 3>(kBgIdx, kBgIdx) =
        cfg.gyro_bias_sigma0 * cfg.gyro_bias_sigma0 * Mat3::Identity();
    fs.P.block<3, 3>(kBaIdx, kBaIdx) =
        cfg.accel_bias_sigma0 * cfg.accel_bias_sigma0 * Mat3::Identity();
    fs.Q.setZero();
    fs.Q.topLeftCorner<3, 3>() =
        cfg.noise.gyro_density * cfg.noise.gyro_density * Mat3::Identity();
    fs.Q.bottomRightCorner<3, 3>() =
        cfg.noise.accel_density * cfg.noise.accel_density * Mat3::Identity();
    fs.R = cfg.r_vel * cfg.r_vel * Mat3::Identity();

    AlignmentRun run;
    Vec3 bg = Vec3::Zero();
    Vec3 ba = Vec3::Zero();
    std::size_t j = 1;  // next aiding sample; aiding[0] was consumed by init
    AidingSample held = aiding[0];

    for (std::size_t k = 1; k < imu.size(); ++k) {
        strapdown::ImuSample a = imu[k - 1];
        strapdown::ImuSample b = imu[k];
        const double dt = b.t - a.t;
        if (!(dt > 0.0)) throw std::invalid_argument("align_run: non-monotonic IMU timestamps");
        if (cfg.compensate_imu) {
            a.gyro -= bg;
            a.accel -= ba;
            b.gyro -= bg;
            b.accel -= ba;
        }

        errmodel::BuildInputs in;
        in.gyro = 0.5 * (a.gyro + b.gyro);
        in.accel = 0.5 * (a.accel + b.accel);
        const double tau_mid = 0.5 * (a.t + b.t) - t0;
        in.g_i = chain.gravity_i(tau_mid, held.p);

        const errmodel::SystemMatrices sm = errmodel::build_model(kind, state, in,
                                                                  cfg.lse_transformed_h);
        auto [Phi, Qk] = discretize(sm.F, sm.G, fs.Q, dt);
        if (cfg.gyro_bias_psd > 0.0 || cfg.accel_bias_psd > 0.0) {
            Qk.block<3, 3>(kBgIdx, kBgIdx) += cfg.gyro_bias_psd * dt * Mat3::Identity();
            Qk.block<3, 3>(kBaIdx, kBaIdx) += cfg.accel_bias_psd * dt * Mat3::Identity();
        }

        state = strapdown::mechanize_step(state, a, b, in.g_i);
        if (k % 100 == 0) state.c_b_i = se23::orthonormalize(state.c_b_i);

        const bool measure =
            j < aiding.size() && aiding[j].t - t0 <= b.t - t0 + 0.5 * dt;
        if (!measure) {
            kf_step(fs, Phi, Qk, Mat3x15::Zero(), Vec3::Zero());
            continue;
        }

        const AidingSample& m = aiding[j];
        if (!(m.t > held.t)) {
            throw std::invalid_argument("align_run: non-monotonic aiding timestamps");
        }
        if (m.t - held.t > cfg.max_aiding_gap_s) {
            ++run.aiding_gap_warnings;
            ALIGN_LOG_WARN("align_run: aiding gap of %.3f s before t=%.3f (prediction-only)",
                           m.t - held.t, m.t);
        }
        const double tau = b.t - t0;
        const Vec3 v_gps_i = chain.v_i(tau, m.p, m.v_enu);
        Vec3 y = state.v_i - v_gps_i;
        if (kind == ModelKind::Lse && cfg.lse_transformed_h) {
            y = state.c_b_i.transpose() * y;
        }
        // H at the post-mechanization state (fresh state-dependent blocks).
        const Mat3x15 H = errmodel::build_model(kind, state, in, cfg.lse_transformed_h).H;
        kf_step(fs, Phi, Qk, H, y);

        state = retract(state, fs.dx.head<9>(), kind);

        EpochRecord rec;
        rec.t = tau;
        rec.dx_post = fs.dx;
        if (cfg.compensate_imu) {
            bg += fs.dx.segment<3>(kBgIdx);
            ba += fs.dx.segment<3>(kBaIdx);
            fs.dx.setZero();
        } else {
            fs.dx.head<9>().setZero();
        }
        rec.c_b_n = strapdown::compose_attitude(chain.c_n_i(tau, m.p), state.c_b_i);
        rec.p_att_diag = fs.P.diagonal().head<3>();
        rec.c_b_i = state.c_b_i;
        rec.v_i = state.v_i;
        rec.r_i = state.r_i;
        rec.p_min_eig = Eigen::SelfAdjointEigenSolver<Mat15>(fs.P).eigenvalues().minCoeff();
        rec.p_trace = fs.P.trace();
        run.epochs.push_back(rec);

        held = m;
        ++j;
    }

    run.final_state = state;
    run.gyro_bias_est = cfg.compensate_imu ? bg : Vec3(fs.dx.segment<3>(kBgIdx));
    run.accel_bias_est = cfg.compensate_imu ? ba : Vec3(fs.dx.segment<3>(kBaIdx));
    run.final_P = fs.P;
    return run;
}

}  // namespace align::kf
