/*
 * faceforge - differentiable 3D head model fitting, detail displacement,
 * and scan-to-mesh evaluation.
 *
 * Copyright 2026 The faceforge authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "faceforge/core/rotation.hpp"

#include <cmath>

namespace faceforge {

namespace {

// R(a) = I + s(phi) K + c(phi) K^2 with K = [a]_x, phi = |a|,
// s = sin(phi)/phi, c = (1 - cos(phi))/phi^2. Series below keep the
// coefficients and their phi-derivatives finite through phi -> 0.
struct RodriguesCoeffs {
    double s, c;       // s(phi), c(phi)
    double ds_over_phi; // (ds/dphi)/phi
    double dc_over_phi; // (dc/dphi)/phi
};

RodriguesCoeffs coeffs(double phi2) {
    RodriguesCoeffs r;
    if (phi2 < 1e-8) {
        r.s = 1.0 - phi2 / 6.0 + phi2 * phi2 / 120.0;
        r.c = 0.5 - phi2 / 24.0 + phi2 * phi2 / 720.0;
        r.ds_over_phi = -1.0 / 3.0 + phi2 / 30.0;
        r.dc_over_phi = -1.0 / 12.0 + phi2 / 180.0;
    } else {
        const double phi = std::sqrt(phi2);
        const double sp = std::sin(phi);
        const double cp = std::cos(phi);
        r.s = sp / phi;
        r.c = (1.0 - cp) / phi2;
        r.ds_over_phi = (phi * cp - sp) / (phi2 * phi);
        r.dc_over_phi = (phi * sp - 2.0 * (1.0 - cp)) / (phi2 * phi2);
    }
    return r;
}

} // namespace

Mat3 skew(const Vec3& v) {
    Mat3 m;
    m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
    return m;
}

Mat3 rodrigues(const Vec3& axis_angle) {
    const double phi2 = axis_angle.squaredNorm();
    const RodriguesCoeffs cf = coeffs(phi2);
    const Mat3 k = skew(axis_angle);
    return Mat3::Identity() + cf.s * k + cf.c * (k * k);
}

std::array<Mat3, 3> rodrigues_jacobian(const Vec3& axis_angle) {
    const double phi2 = axis_angle.squaredNorm();
    const RodriguesCoeffs cf = coeffs(phi2);
    const Mat3 k = skew(axis_angle);
    const Mat3 k2 = k * k;
    std::array<Mat3, 3> jac;
    for (int i = 0; i < 3; ++i) {
        const Mat3 dk = skew(Vec3::Unit(i));
        // d(phi)/da_i = a_i/phi, folded into the /phi coefficient forms.
        jac[i] = (cf.ds_over_phi * axis_angle[i]) * k + cf.s * dk +
                 (cf.dc_over_phi * axis_angle[i]) * k2 + cf.c * (dk * k + k * dk);
    }
    return jac;
}

Vec3 rodrigues_backward(const Vec3& axis_angle, const Mat3& grad_rotation) {
    const std::array<Mat3, 3> jac = rodrigues_jacobian(axis_angle);
    Vec3 g;
    for (int i = 0; i < 3; ++i) {
        g[i] = (grad_rotation.array() * jac[i].array()).sum();
    }
    return g;
}

Vec3 rotate_towards(const Vec3& from, const Vec3& to, const Vec3& v) {
    const Vec3 w = from.cross(to);
    const double c = from.dot(to);
    // R v = v + w x v + (w x (w x v)) / (1 + c); exact identity when w == 0.
    const Vec3 wv = w.cross(v);
    return v + wv + w.cross(wv) / (1.0 + c);
}

Vec3 rotate_towards_backward_to(const Vec3& from, const Vec3& to, const Vec3& v,
                                const Vec3& grad_out) {
    const Vec3 w = from.cross(to);
    const double c = from.dot(to);
    const double inv = 1.0 / (1.0 + c);
    const Vec3 wv = w.cross(v);

    // r = v + w x v + (w x (w x v)) * inv
    // <g, dw x v>            => grad_w += v x g
    // <g, dw x (w x v)> inv  => grad_w += ((w x v) x g) inv
    // <g, w x (dw x v)> inv  => grad_w += (v x (g x w)) inv
    // <g, -(w x (w x v))> inv^2 dc => grad_c
    Vec3 grad_w = v.cross(grad_out);
    grad_w += wv.cross(grad_out) * inv;
    grad_w += v.cross(grad_out.cross(w)) * inv;
    const double grad_c = -grad_out.dot(w.cross(wv)) * inv * inv;

    // w = from x to  => <grad_w, from x dto> = <dto, grad_w x from>
    // c = from . to  => grad_to += grad_c * from
    return grad_w.cross(from) + grad_c * from;
}

} // namespace faceforge
