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
#include "faceforge/render/sh.hpp"

#include <cmath>

#include "faceforge/core/error.hpp"

namespace faceforge {

namespace {

constexpr double kBand0 = 0.282095;
constexpr double kBand1 = 0.488603;
constexpr double kBand2 = 1.092548;
constexpr double kBand2zz = 0.315392;
constexpr double kBand2xy = 0.546274;

inline void sh_eval(double x, double y, double z, double* h) {
    h[0] = kBand0;
    h[1] = kBand1 * y;
    h[2] = kBand1 * z;
    h[3] = kBand1 * x;
    h[4] = kBand2 * x * y;
    h[5] = kBand2 * y * z;
    h[6] = kBand2zz * (3.0 * z * z - 1.0);
    h[7] = kBand2 * x * z;
    h[8] = kBand2xy * (x * x - y * y);
}

} // namespace

ShBasis sh_basis(const Vec3& normal) {
    if (std::abs(normal.norm() - 1.0) > 1e-6) {
        throw ValidationError("sh_basis: normal must be unit length");
    }
    ShBasis h;
    sh_eval(normal.x(), normal.y(), normal.z(), h.data());
    return h;
}

Eigen::Matrix<double, 9, 3> sh_basis_jacobian(const Vec3& normal) {
    const double x = normal.x();
    const double y = normal.y();
    const double z = normal.z();
    Eigen::Matrix<double, 9, 3> jac;
    jac.setZero();
    jac.row(1) = Vec3(0.0, kBand1, 0.0);
    jac.row(2) = Vec3(0.0, 0.0, kBand1);
    jac.row(3) = Vec3(kBand1, 0.0, 0.0);
    jac.row(4) = Vec3(kBand2 * y, kBand2 * x, 0.0);
    jac.row(5) = Vec3(0.0, kBand2 * z, kBand2 * y);
    jac.row(6) = Vec3(0.0, 0.0, kBand2zz * 6.0 * z);
    jac.row(7) = Vec3(kBand2 * z, 0.0, kBand2 * x);
    jac.row(8) = Vec3(kBand2xy * 2.0 * x, -kBand2xy * 2.0 * y, 0.0);
    return jac;
}

Image shade(const Image& albedo_uv, const Lighting& lighting, const Image& normal_uv,
            const std::vector<uint8_t>& mask) {
    const int d = albedo_uv.height();
    normal_uv.require_shape(d, albedo_uv.width(), 3, "shade normals");
    if (mask.size() != static_cast<std::size_t>(d) * albedo_uv.width()) {
        throw DimensionError("shade: mask size mismatch");
    }
    const auto l = lighting.bands(); // 3 x 9
    Image out(d, albedo_uv.width(), albedo_uv.channels(), 0.0, ChannelTag::shaded);
    double h[9];
    for (int y = 0; y < d; ++y) {
        for (int x = 0; x < albedo_uv.width(); ++x) {
            if (!mask[static_cast<std::size_t>(y) * albedo_uv.width() + x]) {
                continue;
            }
            sh_eval(normal_uv.at(y, x, 0), normal_uv.at(y, x, 1), normal_uv.at(y, x, 2), h);
            for (int c = 0; c < albedo_uv.channels(); ++c) {
                double irradiance = 0.0;
                for (int k = 0; k < 9; ++k) {
                    irradiance += l(c, k) * h[k];
                }
                out.at(y, x, c) = albedo_uv.at(y, x, c) * irradiance;
            }
        }
    }
    return out;
}

ShadeGrads shade_backward(const Image& albedo_uv, const Lighting& lighting,
                          const Image& normal_uv, const std::vector<uint8_t>& mask,
                          const Image& grad_shaded) {
    const int d = albedo_uv.height();
    const int w = albedo_uv.width();
    const int channels = albedo_uv.channels();
    const auto l = lighting.bands();

    ShadeGrads grads;
    grads.albedo = Image(d, w, channels);
    grads.normals = Image(d, w, 3);
    grads.lighting = VecX::Zero(27);

    double h[9];
    for (int y = 0; y < d; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask[static_cast<std::size_t>(y) * w + x]) {
                continue;
            }
            const Vec3 n(normal_uv.at(y, x, 0), normal_uv.at(y, x, 1), normal_uv.at(y, x, 2));
            sh_eval(n.x(), n.y(), n.z(), h);
            const Eigen::Matrix<double, 9, 3> jac = sh_basis_jacobian(n);
            Vec3 grad_n = Vec3::Zero();
            for (int c = 0; c < channels; ++c) {
                const double g = grad_shaded.at(y, x, c);
                if (g == 0.0) {
                    continue;
                }
                const double a = albedo_uv.at(y, x, c);
                double irradiance = 0.0;
                for (int k = 0; k < 9; ++k) {
                    irradiance += l(c, k) * h[k];
                    grads.lighting[3 * k + c] += g * a * h[k];
                    grad_n += (g * a * l(c, k)) * Vec3(jac.row(k));
                }
                grads.albedo.at(y, x, c) = g * irradiance;
            }
            for (int c = 0; c < 3; ++c) {
                grads.normals.at(y, x, c) = grad_n[c];
            }
        }
    }
    return grads;
}

} // namespace faceforge
