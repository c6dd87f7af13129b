#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "align/earth.hpp"
#include "align/se23.hpp"
#include "oracles.hpp"

using namespace align;
using namespace align::earth;
using std::numbers::pi;

namespace {
constexpr double kDeg = pi / 180.0;

// Iterative ECEF -> geodetic inversion, used only as an oracle.
GeoPosition ecef_to_geo_oracle(const Vec3& r) {
    const double p = std::hypot(r.x(), r.y());
    double lat = std::atan2(r.z(), p * (1.0 - wgs84::kEccSq));
    double h = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double rn = radii(lat).rn;
        h = p / std::cos(lat) - rn;
        lat = std::atan2(r.z(), p * (1.0 - wgs84::kEccSq * rn / (rn + h)));
    }
    return GeoPosition(lat, std::atan2(r.y(), r.x()), h);
}
}  // namespace

TEST_CASE("radii at reference latitudes") {
    const Radii eq = radii(0.0);
    CHECK(eq.rn == wgs84::kSemiMajorAxis);
    CHECK(eq.rm == doctest::Approx(wgs84::kSemiMajorAxis * (1.0 - wgs84::kEccSq)).epsilon(1e-15));

    const Radii pole = radii(pi / 2.0);
    CHECK(pole.rm == doctest::Approx(pole.rn).epsilon(1e-12));
}

TEST_CASE("earth_rate_n") {
    CHECK((earth_rate_n(0.0) - Vec3(0, wgs84::kEarthRate, 0)).norm() == 0.0);
    CHECK((earth_rate_n(pi / 2) - Vec3(0, 0, wgs84::kEarthRate)).norm() < 1e-20);
    const Vec3 w = earth_rate_n(34.0 * kDeg);
    CHECK(w.x() == 0.0);
    CHECK(w.y() == doctest::Approx(wgs84::kEarthRate * std::cos(34.0 * kDeg)).epsilon(1e-15));
    CHECK(w.z() == doctest::Approx(wgs84::kEarthRate * std::sin(34.0 * kDeg)).epsilon(1e-15));
}

TEST_CASE("transport_rate") {
    const GeoPosition p(34.0 * kDeg, 108.0 * kDeg, 0.0);
    CHECK(transport_rate(Vec3::Zero(), p).norm() == 0.0);

    const GeoPosition eq(0.0, 0.0, 0.0);
    const Vec3 w = transport_rate(Vec3(5.0, 0.0, 0.0), eq);
    CHECK(w.x() == 0.0);
    CHECK(w.y() == doctest::Approx(5.0 / radii(0.0).rn).epsilon(1e-15));
    CHECK(w.z() == 0.0);

    const Radii r34 = radii(34.0 * kDeg);
    const Vec3 v(10.0, 5.0, 0.0);
    const Vec3 w34 = transport_rate(v, p);
    CHECK(w34.x() == doctest::Approx(-5.0 / r34.rm).epsilon(1e-15));
    CHECK(w34.y() == doctest::Approx(10.0 / r34.rn).epsilon(1e-15));
    CHECK(w34.z() == doctest::Approx(10.0 * std::tan(34.0 * kDeg) / r34.rn).epsilon(1e-15));

    CHECK_THROWS_AS(transport_rate(v, GeoPosition(pi / 2, 0, 0)), std::invalid_argument);
}

TEST_CASE("curvature_matrix") {
    const GeoPosition eq(0.0, 0.0, 0.0);
    const Mat3 rc = curvature_matrix(eq);
    Mat3 expect = Mat3::Zero();
    expect(0, 1) = 1.0 / radii(0.0).rm;
    expect(1, 0) = 1.0 / radii(0.0).rn;
    expect(2, 2) = 1.0;
    CHECK((rc - expect).norm() == 0.0);

    // Height channel passes straight through.
    CHECK((rc * Vec3(0, 0, 2.5) - Vec3(0, 0, 2.5)).norm() == 0.0);

    const GeoPosition p60(60.0 * kDeg, 0.0, 0.0);
    const Mat3 rc60 = curvature_matrix(p60);
    CHECK(rc60(1, 0) == doctest::Approx(2.0 / radii(60.0 * kDeg).rn).epsilon(1e-12));
}

TEST_CASE("geo_to_ecef") {
    const Vec3 eq = geo_to_ecef(GeoPosition(0.0, 0.0, 0.0));
    CHECK((eq - Vec3(wgs84::kSemiMajorAxis, 0, 0)).norm() < 1e-9);

    const Vec3 pole = geo_to_ecef(GeoPosition(pi / 2, 0.0, 10.0));
    CHECK(std::hypot(pole.x(), pole.y()) < 1e-9);
    CHECK(pole.z() ==
          doctest::Approx(radii(pi / 2).rn * (1.0 - wgs84::kEccSq) + 10.0).epsilon(1e-12));

    const GeoPosition p(34.0 * kDeg, 108.0 * kDeg, 100.0);
    const GeoPosition back = ecef_to_geo_oracle(geo_to_ecef(p));
    CHECK((geo_to_ecef(back) - geo_to_ecef(p)).norm() < 1e-6);
    CHECK(std::abs(back.lat - p.lat) * radii(p.lat).rm < 1e-6);
    CHECK(std::abs(back.h - p.h) < 1e-6);
}

TEST_CASE("earth_spin_dcm") {
    CHECK(earth_spin_dcm(0.0).isApprox(Mat3::Identity(), 0.0));

    const double t_quarter = (pi / 2.0) / wgs84::kEarthRate;
    Mat3 expect;
    expect << 0, 1, 0, -1, 0, 0, 0, 0, 1;
    CHECK((earth_spin_dcm(t_quarter) - expect).norm() < 1e-12);

    for (double t : {10.0, 600.0, 4000.0}) {
        const Mat3 c = earth_spin_dcm(t);
        CHECK((c.transpose() * c - Mat3::Identity()).norm() < 1e-14);
        CHECK(se23::so3_log(c).norm() == doctest::Approx(wgs84::kEarthRate * t).epsilon(1e-12));
    }
}

TEST_CASE("ecef_to_enu_dcm") {
    Mat3 expect;
    expect << 0, 1, 0, 0, 0, 1, 1, 0, 0;
    CHECK((ecef_to_enu_dcm(GeoPosition(0, 0, 0)) - expect).norm() == 0.0);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ulat(-pi / 2, pi / 2), ulon(-pi, pi);
    for (int i = 0; i < 50; ++i) {
        const GeoPosition p(ulat(rng), ulon(rng), 0.0);
        const Mat3 c = ecef_to_enu_dcm(p);
        CHECK((c.transpose() * c - Mat3::Identity()).norm() < 1e-14);
        const Vec3 up(std::cos(p.lat) * std::cos(p.lon), std::cos(p.lat) * std::sin(p.lon),
                      std::sin(p.lat));
        CHECK((c.row(2).transpose() - up).norm() < 1e-15);
    }
}

TEST_CASE("frame chain composition") {
    const GeoPosition p0(34.0 * kDeg, 108.0 * kDeg, 50.0);
    const FrameChain chain(p0);

    CHECK((chain.c_e_i(0.0) - chain.c_e0_n0()).norm() == 0.0);
    CHECK((chain.c_n_i(0.0, p0) - Mat3::Identity()).norm() < 1e-15);

    for (double t : {5.0, 120.0, 600.0}) {
        const Mat3 c = chain.c_e_i(t);
        CHECK((c.transpose() * c - Mat3::Identity()).norm() < 1e-14);
        // Chain consistency: C_n^i * (ENU from ECEF) = C_e^i.
        CHECK((chain.c_n_i(t, p0) * ecef_to_enu_dcm(p0) - c).norm() < 1e-10);
    }

    const double t1 = 100.0, t2 = 480.0;
    const Mat3 rel = chain.c_e_i(t2) * chain.c_e_i(t1).transpose();
    CHECK(se23::so3_log(rel).norm() ==
          doctest::Approx(wgs84::kEarthRate * (t2 - t1)).epsilon(1e-11));
}

TEST_CASE("c_n_i closed form matches the attitude-rate ODE") {
    // Static position: integrate Cdot = C (w_in^n x) with w_in^n = w_ie^n and
    // compare against the closed chain over 600 s.
    const GeoPosition p0(34.0 * kDeg, 108.0 * kDeg, 0.0);
    const FrameChain chain(p0);
    const Mat3 wx = se23::skew(earth_rate_n(p0.lat));

    Mat3 c = Mat3::Identity();
    const double dt = 0.05;
    const auto ode = [&](const Mat3& x) -> Mat3 { return x * wx; };
    for (int k = 0; k < 12000; ++k) {
        const Mat3 k1 = ode(c);
        const Mat3 k2 = ode(c + 0.5 * dt * k1);
        const Mat3 k3 = ode(c + 0.5 * dt * k2);
        const Mat3 k4 = ode(c + dt * k3);
        c += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    const Mat3 closed = chain.c_n_i(600.0, p0);
    CHECK(se23::so3_log(closed.transpose() * se23::orthonormalize(c)).norm() < 1e-9);
}

TEST_CASE("r_i traces a circle about the earth axis") {
    const GeoPosition p0(34.0 * kDeg, 108.0 * kDeg, 50.0);
    const FrameChain chain(p0);

    CHECK((chain.r_i(0.0, p0) - chain.c_e0_n0() * geo_to_ecef(p0)).norm() == 0.0);

    const Vec3 axis = chain.c_e0_n0() * Vec3(0, 0, 1);
    const double axial0 = chain.r_i(0.0, p0).dot(axis);
    const double norm0 = chain.r_i(0.0, p0).norm();
    for (double t : {60.0, 300.0, 600.0}) {
        const Vec3 r = chain.r_i(t, p0);
        CHECK(r.norm() == doctest::Approx(norm0).epsilon(1e-14));
        CHECK(r.dot(axis) == doctest::Approx(axial0).epsilon(1e-14));
    }
}

TEST_CASE("v_i geometry and derivative consistency") {
    const GeoPosition p0(34.0 * kDeg, 108.0 * kDeg, 50.0);
    const FrameChain chain(p0);

    const double expected = wgs84::kEarthRate * (radii(p0.lat).rn + p0.h) * std::cos(p0.lat);
    CHECK(chain.v_i(0.0, p0, Vec3::Zero()).norm() == doctest::Approx(expected).epsilon(1e-12));

    const GeoPosition near_pole(pi / 2 - 1e-12, 0.0, 0.0);
    const FrameChain polar(near_pole);
    CHECK(polar.v_i(0.0, near_pole, Vec3::Zero()).norm() < 1e-3);

    // Central difference of r_i against the analytic v_i for the static case.
    const double h = 0.5;
    for (double t : {0.5, 42.0, 599.0}) {
        const Vec3 numeric = (chain.r_i(t + h, p0) - chain.r_i(t - h, p0)) / (2.0 * h);
        CHECK((numeric - chain.v_i(t, p0, Vec3::Zero())).norm() < 1e-6);
    }
}

TEST_CASE("gravity model") {
    CHECK(gravity_magnitude(0.0, 0.0) == doctest::Approx(9.7803253359).epsilon(1e-12));
    CHECK(gravity_magnitude(pi / 2, 0.0) > gravity_magnitude(0.0, 0.0));
    CHECK(gravity_magnitude(34.0 * kDeg, 1000.0) < gravity_magnitude(34.0 * kDeg, 0.0));

    const Vec3 g = gravity_n(GeoPosition(34.0 * kDeg, 0.0, 0.0));
    CHECK(g.x() == 0.0);
    CHECK(g.y() == 0.0);
    CHECK(g.z() < 0.0);
}

TEST_CASE("gravity_i is consistent with the static second derivative of r_i") {
    // For an earth-fixed point, d2r/dt2 must equal f^i + gravity_i with
    // f^b = -C_b^n^T g^n the static accelerometer output.
    const GeoPosition p0(34.0 * kDeg, 108.0 * kDeg, 0.0);
    const FrameChain chain(p0);
    const double h = 0.5;
    for (double t : {10.0, 200.0}) {
        const Vec3 acc =
            (chain.r_i(t + h, p0) - 2.0 * chain.r_i(t, p0) + chain.r_i(t - h, p0)) / (h * h);
        const Vec3 f_i = chain.c_n_i(t, p0) * (-gravity_n(p0));
        CHECK((acc - (f_i + chain.gravity_i(t, p0))).norm() < 1e-5);
    }
}

TEST_CASE("GeoPosition validation") {
    CHECK_THROWS_AS(GeoPosition(1.7, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(GeoPosition(0.0, 0.0, std::nan("")), std::invalid_argument);
    CHECK(GeoPosition(0.0, 2.0 * pi + 0.25, 0.0).lon == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(GeoPosition(0.0, -pi, 0.0).lon == doctest::Approx(pi).epsilon(1e-12));
}
