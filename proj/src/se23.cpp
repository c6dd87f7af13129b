#include "align/se23.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace align::se23 {

namespace {

void require_finite(const Vec3& x, const char* what) {
    if (!x.allFinite()) {
        throw std::invalid_argument(std::string(what) + ": non-finite input");
    }
}

// Trig ratio helpers with 2-term Taylor fallbacks below kAngleEps.
// a = (1 - cos t) / t^2, b = (t - sin t) / t^3.
double ratio_one_minus_cos(double t) {
    if (t < kAngleEps) return 0.5 - t * t / 24.0;
    return (1.0 - std::cos(t)) / (t * t);
}

double ratio_t_minus_sin(double t) {
    if (t < kAngleEps) return 1.0 / 6.0 - t * t / 120.0;
    return (t - std::sin(t)) / (t * t * t);
}

}  // namespace

Vec9 Tangent::vec() const {
    Vec9 z;
    z << phi, nu, rho;
    return z;
}

Mat5 Tangent::wedge() const {
    Mat5 xi = Mat5::Zero();
    xi.topLeftCorner<3, 3>() = skew(phi);
    xi.block<3, 1>(0, 3) = nu;
    xi.block<3, 1>(0, 4) = rho;
    return xi;
}

Tangent Tangent::vee(const Mat5& xi) {
    return Tangent(unskew(xi.topLeftCorner<3, 3>()), xi.block<3, 1>(0, 3), xi.block<3, 1>(0, 4));
}

Mat5 GroupElement::matrix() const {
    Mat5 m = Mat5::Identity();
    m.topLeftCorner<3, 3>() = C;
    m.block<3, 1>(0, 3) = v;
    m.block<3, 1>(0, 4) = r;
    return m;
}

GroupElement GroupElement::from_matrix(const Mat5& m) {
    return GroupElement(m.topLeftCorner<3, 3>(), m.block<3, 1>(0, 3), m.block<3, 1>(0, 4));
}

Mat3 skew(const Vec3& a) {
    Mat3 m;
    m << 0.0, -a.z(), a.y(),
        a.z(), 0.0, -a.x(),
        -a.y(), a.x(), 0.0;
    return m;
}

Vec3 unskew(const Mat3& m) {
    return Vec3(m(2, 1), m(0, 2), m(1, 0));
}

Mat3 so3_exp(const Vec3& phi) {
    require_finite(phi, "so3_exp");
    const double t = phi.norm();
    const Mat3 px = skew(phi);
    double s;  // sin t / t
    if (t < kAngleEps) {
        s = 1.0 - t * t / 6.0;
    } else {
        s = std::sin(t) / t;
    }
    return Mat3::Identity() + s * px + ratio_one_minus_cos(t) * px * px;
}

Vec3 so3_log(const Mat3& C) {
    if (!C.allFinite()) throw std::invalid_argument("so3_log: non-finite input");
    if ((C.transpose() * C - Mat3::Identity()).norm() > 1e-9) {
        throw std::invalid_argument("so3_log: input is not orthonormal to 1e-9");
    }
    const Vec3 w = unskew(C - C.transpose()) * 0.5;  // sin(t) * axis
    const double c = 0.5 * (C.trace() - 1.0);
    const double angle = std::atan2(w.norm(), c);  // equals acos(c), stabler at the ends

    if (angle < kAngleEps) {
        // First-order: C ~ I + phi^; w already carries sin(t)*a ~ phi.
        return w;
    }
    if (angle < 3.0 * std::numbers::pi / 4.0) {
        return angle / std::sin(angle) * w;
    }

    // Near pi the antisymmetric part degrades; recover the axis from the
    // symmetric part: (C + C^T)/2 = cos(t)I + (1-cos(t))aa^T.
    const Mat3 M =
        (0.5 * (C + C.transpose()) - std::cos(angle) * Mat3::Identity()) / (1.0 - std::cos(angle));
    int k = 0;
    M.diagonal().maxCoeff(&k);
    Vec3 a;
    a[k] = std::sqrt(std::max(M(k, k), 0.0));
    for (int i = 0; i < 3; ++i) {
        if (i != k) a[i] = M(k, i) / a[k];
    }
    a.normalize();
    // Fix the sign from the antisymmetric part when it is usable, otherwise
    // (angle == pi) make the first nonzero component positive.
    if (w.norm() > 1e-12) {
        if (a.dot(w) < 0.0) a = -a;
    } else {
        for (int i = 0; i < 3; ++i) {
            if (std::abs(a[i]) > 1e-12) {
                if (a[i] < 0.0) a = -a;
                break;
            }
        }
    }
    return angle * a;
}

Mat3 left_jacobian(const Vec3& phi) {
    require_finite(phi, "left_jacobian");
    const double t = phi.norm();
    const Mat3 px = skew(phi);
    return Mat3::Identity() + ratio_one_minus_cos(t) * px + ratio_t_minus_sin(t) * px * px;
}

Mat3 left_jacobian_inv(const Vec3& phi) {
    require_finite(phi, "left_jacobian_inv");
    const double t = phi.norm();
    if (t >= 2.0 * std::numbers::pi - 1e-9) {
        throw std::invalid_argument("left_jacobian_inv: |phi| at or beyond the 2*pi singularity");
    }
    const Mat3 px = skew(phi);
    double d;  // (1 - (t/2)cot(t/2)) / t^2
    if (t < kAngleEps) {
        d = 1.0 / 12.0 + t * t / 720.0;
    } else {
        const double half = 0.5 * t;
        d = (1.0 - half * std::cos(half) / std::sin(half)) / (t * t);
    }
    return Mat3::Identity() - 0.5 * px + d * px * px;
}

GroupElement se23_exp(const Tangent& zeta) {
    require_finite(zeta.phi, "se23_exp");
    require_finite(zeta.nu, "se23_exp");
    require_finite(zeta.rho, "se23_exp");
    const Mat3 jl = left_jacobian(zeta.phi);
    return GroupElement(so3_exp(zeta.phi), jl * zeta.nu, jl * zeta.rho);
}

Tangent se23_log(const GroupElement& T) {
    const Vec3 phi = so3_log(T.C);
    const Mat3 jli = left_jacobian_inv(phi);
    return Tangent(phi, jli * T.v, jli * T.r);
}

GroupElement se23_inverse(const GroupElement& T) {
    const Mat3 Ct = T.C.transpose();
    return GroupElement(Ct, -Ct * T.v, -Ct * T.r);
}

GroupElement se23_compose(const GroupElement& a, const GroupElement& b) {
    return GroupElement(a.C * b.C, a.C * b.v + a.v, a.C * b.r + a.r);
}

Mat3 orthonormalize(const Mat3& C) {
    return 0.5 * (3.0 * Mat3::Identity() - C * C.transpose()) * C;
}

}  // namespace align::se23
