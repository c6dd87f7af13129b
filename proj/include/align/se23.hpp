// Closed-form SO(3) / SE2(3) group operations: exponential and logarithm maps,
// left Jacobian and its inverse, composition and inversion.
//
// An SE2(3) element bundles a direction-cosine matrix C with a velocity and a
// position column; it is stored as explicit (C, v, r) blocks and materialized
// to its 5x5 matrix form only on request.
#pragma once

#include <Eigen/Dense>

#include "align/types.hpp"

namespace align::se23 {

// Below this rotation angle the trig ratios switch to their 2-term Taylor
// series to avoid cancellation.
inline constexpr double kAngleEps = 1e-7;

struct Tangent {
    Vec3 phi = Vec3::Zero();  // rotation part [rad]
    Vec3 nu = Vec3::Zero();   // velocity part
    Vec3 rho = Vec3::Zero();  // position part

    Tangent() = default;
    Tangent(const Vec3& phi_, const Vec3& nu_, const Vec3& rho_) : phi(phi_), nu(nu_), rho(rho_) {}
    explicit Tangent(const Vec9& zeta)
        : phi(zeta.segment<3>(0)), nu(zeta.segment<3>(3)), rho(zeta.segment<3>(6)) {}

    Vec9 vec() const;
    Mat5 wedge() const;
    static Tangent vee(const Mat5& xi);
};

struct GroupElement {
    Mat3 C = Mat3::Identity();
    Vec3 v = Vec3::Zero();
    Vec3 r = Vec3::Zero();

    GroupElement() = default;
    GroupElement(const Mat3& C_, const Vec3& v_, const Vec3& r_) : C(C_), v(v_), r(r_) {}

    static GroupElement Identity() { return {}; }

    Mat5 matrix() const;
    static GroupElement from_matrix(const Mat5& m);
};

Mat3 skew(const Vec3& a);
Vec3 unskew(const Mat3& m);

// Rodrigues' formula; series fallback below kAngleEps. Throws
// std::invalid_argument on non-finite input.
Mat3 so3_exp(const Vec3& phi);

// Canonical logarithm with angle in [0, pi]. Input must be orthonormal to
// 1e-9 (throws std::invalid_argument otherwise). Near angle pi the axis is
// recovered from the symmetric part (C + I)/2; ties at exactly pi are broken
// by making the first nonzero axis component positive.
Vec3 so3_log(const Mat3& C);

Mat3 left_jacobian(const Vec3& phi);

// Closed form with the (phi/2)cot(phi/2) scalar. Requires |phi| < 2*pi
// (cot singularity); throws std::invalid_argument at or beyond it.
Mat3 left_jacobian_inv(const Vec3& phi);

GroupElement se23_exp(const Tangent& zeta);
Tangent se23_log(const GroupElement& T);
GroupElement se23_inverse(const GroupElement& T);
GroupElement se23_compose(const GroupElement& a, const GroupElement& b);

// Symmetric one-step orthonormality repair: 0.5 * (3I - C*C^T) * C.
Mat3 orthonormalize(const Mat3& C);

}  // namespace align::se23
