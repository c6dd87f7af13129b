#include "align/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace align::sim {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;

double wrap_deg(double x) {
    x = std::fmod(x + 180.0, 360.0);
    if (x < 0.0) x += 360.0;
    x -= 180.0;
    return x == -180.0 ? 180.0 : x;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace

double deg_per_hour_to_rad_s(double x) {
    return x * kDegToRad / 3600.0;
}

double deg_per_sqrt_hour_to_si(double x) {
    return x * kDegToRad / 60.0;
}

double micro_g_to_mps2(double x, double gravity) {
    return x * 1e-6 * gravity;
}

std::mt19937_64 misalignment_rng(std::uint64_t seed, std::uint64_t trial) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(0x6d69730000ULL + trial)));
}

std::mt19937_64 noise_rng(std::uint64_t seed, std::uint64_t trial) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(0x6e6f690000ULL + trial)));
}

SimStreams simulate_static_imu(const SimConfig& cfg, std::mt19937_64& noise) {
    if (!(cfg.duration_s > 0.0) || !(cfg.imu_rate_hz > 0.0) || !(cfg.aiding_rate_hz > 0.0)) {
        throw std::invalid_argument("simulate_static_imu: rates and duration must be positive");
    }
    SimStreams out;
    out.c_b_n_true = strapdown::euler_to_dcm(cfg.true_att);

    const Vec3 omega_true = out.c_b_n_true.transpose() * earth::earth_rate_n(cfg.p0.lat);
    const Vec3 f_true = -out.c_b_n_true.transpose() * earth::gravity_n(cfg.p0);

    const double dt = 1.0 / cfg.imu_rate_hz;
    const long n = std::lround(cfg.duration_s * cfg.imu_rate_hz);
    const double gyro_sigma = cfg.gyro_noise_density * std::sqrt(cfg.imu_rate_hz);
    const double accel_sigma = cfg.accel_noise_density * std::sqrt(cfg.imu_rate_hz);
    std::normal_distribution<double> gauss(0.0, 1.0);

    out.imu.reserve(static_cast<std::size_t>(n) + 1);
    for (long k = 0; k <= n; ++k) {
        strapdown::ImuSample s;
        s.t = k * dt;
        Vec3 ng = Vec3::Zero(), na = Vec3::Zero();
        if (gyro_sigma > 0.0 || accel_sigma > 0.0) {
            for (int i = 0; i < 3; ++i) ng[i] = gyro_sigma * gauss(noise);
            for (int i = 0; i < 3; ++i) na[i] = accel_sigma * gauss(noise);
        }
        s.gyro = omega_true + cfg.gyro_bias + ng;
        s.accel = f_true + cfg.accel_bias + na;
        out.imu.push_back(s);
    }

    const long na = std::lround(cfg.duration_s * cfg.aiding_rate_hz);
    out.aiding.reserve(static_cast<std::size_t>(na) + 1);
    for (long k = 0; k <= na; ++k) {
        kf::AidingSample a;
        a.t = k / cfg.aiding_rate_hz;
        a.p = cfg.p0;
        a.v_enu = Vec3::Zero();
        out.aiding.push_back(a);
    }
    return out;
}

Vec3 sample_misalignment(std::mt19937_64& rng, const MisalignSpec& spec) {
    if (spec.kind == MisalignSpec::Kind::Fixed) return spec.fixed_deg;
    if (spec.horiz_max_deg < 0.0 || spec.yaw_max_deg < 0.0) {
        throw std::invalid_argument("sample_misalignment: negative bound");
    }
    std::uniform_real_distribution<double> horiz(-spec.horiz_max_deg, spec.horiz_max_deg);
    std::uniform_real_distribution<double> yaw(-spec.yaw_max_deg, spec.yaw_max_deg);
    Vec3 m;
    m.x() = horiz(rng);
    m.y() = horiz(rng);
    m.z() = yaw(rng);
    return m;
}

Mat3 apply_misalignment(const strapdown::EulerAngles& true_att, const Vec3& mis_deg) {
    strapdown::EulerAngles e;
    e.pitch = true_att.pitch + mis_deg.x() * kDegToRad;
    e.roll = true_att.roll + mis_deg.y() * kDegToRad;
    e.yaw = true_att.yaw + mis_deg.z() * kDegToRad;
    return strapdown::euler_to_dcm(e);
}

Vec3 utmost_precision(const Vec3& accel_bias_n, const Vec3& gyro_bias_n, double lat,
                      double gravity) {
    if (std::abs(std::abs(lat) - std::numbers::pi / 2.0) < 1e-9) {
        throw std::invalid_argument("utmost_precision: singular at the pole");
    }
    Vec3 phi;
    phi.x() = -accel_bias_n.y() / gravity;
    phi.y() = accel_bias_n.x() / gravity;
    phi.z() = std::tan(lat) * accel_bias_n.x() / gravity -
              gyro_bias_n.x() / (earth::wgs84::kEarthRate * std::cos(lat));
    return phi;
}

Vec3 attitude_error(const Mat3& c_true, const Mat3& c_est) {
    const strapdown::EulerAngles t = strapdown::dcm_to_euler(c_true);
    const strapdown::EulerAngles e = strapdown::dcm_to_euler(c_est);
    Vec3 d;
    d.x() = wrap_deg((t.pitch - e.pitch) / kDegToRad);
    d.y() = wrap_deg((t.roll - e.roll) / kDegToRad);
    d.z() = wrap_deg((t.yaw - e.yaw) / kDegToRad);
    return d;
}

std::vector<std::pair<double, Vec3>> error_series(const kf::AlignmentRun& run,
                                                  const Mat3& c_b_n_true) {
    std::vector<std::pair<double, Vec3>> out;
    out.reserve(run.epochs.size());
    for (const auto& e : run.epochs) {
        out.emplace_back(e.t, attitude_error(c_b_n_true, e.c_b_n));
    }
    return out;
}

Vec3 series_mean(const std::vector<std::pair<double, Vec3>>& series, double t_from) {
    Vec3 acc = Vec3::Zero();
    long n = 0;
    for (const auto& [t, v] : series) {
        if (t >= t_from) {
            acc += v;
            ++n;
        }
    }
    return n > 0 ? Vec3(acc / static_cast<double>(n)) : acc;
}

namespace {

TrialOutcome run_trial(const SimConfig& cfg, errmodel::ModelKind kind,
                       const kf::FilterConfig& base, const SimStreams& streams,
                       const Vec3& mis_deg) {
    kf::FilterConfig fc = base;
    fc.att_sigma0 = (mis_deg * kDegToRad / 3.0).cwiseAbs();
    const Mat3 guess = apply_misalignment(cfg.true_att, mis_deg);
    const kf::AlignmentRun run = kf::align_run(streams.imu, streams.aiding, kind, fc, guess);
    const auto series = error_series(run, streams.c_b_n_true);

    TrialOutcome out;
    out.mis_deg = mis_deg;
    out.steady_mean_deg = series_mean(series, cfg.duration_s - kSteadyWindowS);
    out.final_err_deg = series.empty() ? Vec3::Zero() : Vec3(series.back().second);
    out.converged = std::abs(out.final_err_deg.z()) < kConvergedYawDeg;
    return out;
}

}  // namespace

std::vector<McResult> monte_carlo(const SimConfig& cfg,
                                  const std::vector<errmodel::ModelKind>& kinds, unsigned trials,
                                  const kf::FilterConfig& base, unsigned threads) {
    if (trials < 1) throw std::invalid_argument("monte_carlo: trials must be >= 1");
    std::vector<McResult> results(kinds.size());
    for (std::size_t k = 0; k < kinds.size(); ++k) {
        results[k].kind = kinds[k];
        results[k].trials.resize(trials);
    }

    const auto worker = [&](unsigned first, unsigned stride) {
        for (unsigned i = first; i < trials; i += stride) {
            auto rng_mis = misalignment_rng(cfg.seed, i);
            const Vec3 mis_deg = sample_misalignment(rng_mis, cfg.misalign);
            auto rng_noise = noise_rng(cfg.seed, i);
            const SimStreams streams = simulate_static_imu(cfg, rng_noise);
            for (std::size_t k = 0; k < kinds.size(); ++k) {
                results[k].trials[i] = run_trial(cfg, kinds[k], base, streams, mis_deg);
            }
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, trials);
    if (threads <= 1) {
        worker(0, 1);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t, threads);
        for (auto& th : pool) th.join();
    }

    for (auto& res : results) {
        unsigned converged = 0;
        Vec3 mean = Vec3::Zero(), mean_abs = Vec3::Zero();
        for (const auto& tr : res.trials) {
            converged += tr.converged ? 1 : 0;
            mean += tr.steady_mean_deg;
            mean_abs += tr.steady_mean_deg.cwiseAbs();
        }
        const double n = static_cast<double>(res.trials.size());
        res.converged_fraction = converged / n;
        res.steady_mean_deg = mean / n;
        res.steady_mean_abs_deg = mean_abs / n;
        Vec3 var = Vec3::Zero();
        for (const auto& tr : res.trials) {
            const Vec3 d = tr.steady_mean_deg - res.steady_mean_deg;
            var += d.cwiseProduct(d);
        }
        res.steady_std_deg = (var / std::max(1.0, n - 1.0)).cwiseSqrt();
    }
    return results;
}

NavFrameState nav_frame_step(const NavFrameState& s, const strapdown::ImuSample& a,
                             const strapdown::ImuSample& b) {
    const double dt = b.t - a.t;
    if (!(dt > 0.0)) throw std::invalid_argument("nav_frame_step: non-increasing timestamps");
    const Vec3 omega_ib = 0.5 * (a.gyro + b.gyro);
    const Vec3 f_b = 0.5 * (a.accel + b.accel);

    struct Deriv {
        Mat3 c_dot;
        Vec3 v_dot;
        Vec3 p_dot;
    };
    const auto f = [&](const NavFrameState& x) -> Deriv {
        const Vec3 w_ie = earth::earth_rate_n(x.p.lat);
        const Vec3 w_en = earth::transport_rate(x.v_n, x.p);
        const Vec3 w_nb = omega_ib - x.c_b_n.transpose() * (w_ie + w_en);
        Deriv d;
        d.c_dot = x.c_b_n * se23::skew(w_nb);
        d.v_dot = x.c_b_n * f_b - (2.0 * w_ie + w_en).cross(x.v_n) + earth::gravity_n(x.p);
        d.p_dot = earth::curvature_matrix(x.p) * x.v_n;
        return d;
    };
    const auto advance = [](const NavFrameState& x, const Deriv& d, double h) {
        NavFrameState y;
        y.c_b_n = x.c_b_n + h * d.c_dot;
        y.v_n = x.v_n + h * d.v_dot;
        y.p = earth::GeoPosition(x.p.lat + h * d.p_dot.x(), x.p.lon + h * d.p_dot.y(),
                                 x.p.h + h * d.p_dot.z());
        return y;
    };

    const Deriv k1 = f(s);
    const Deriv k2 = f(advance(s, k1, 0.5 * dt));
    const Deriv k3 = f(advance(s, k2, 0.5 * dt));
    const Deriv k4 = f(advance(s, k3, dt));
    Deriv sum;
    sum.c_dot = (k1.c_dot + 2.0 * k2.c_dot + 2.0 * k3.c_dot + k4.c_dot) / 6.0;
    sum.v_dot = (k1.v_dot + 2.0 * k2.v_dot + 2.0 * k3.v_dot + k4.v_dot) / 6.0;
    sum.p_dot = (k1.p_dot + 2.0 * k2.p_dot + 2.0 * k3.p_dot + k4.p_dot) / 6.0;
    NavFrameState out = advance(s, sum, dt);
    out.c_b_n = se23::orthonormalize(out.c_b_n);
    return out;
}

}  // namespace align::sim
