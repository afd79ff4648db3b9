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
#pragma once

#include <array>
#include <vector>

#include "faceforge/core/types.hpp"
#include "faceforge/render/image.hpp"

namespace faceforge {

/// Lighting coefficients: 9 real SH bands x 3 color channels, stored
/// band-major (l[3k + c] is band k, channel c).
struct Lighting {
    VecX coefficients = VecX::Zero(27);

    Eigen::Map<const Eigen::Matrix<double, 3, 9>> bands() const {
        return Eigen::Map<const Eigen::Matrix<double, 3, 9>>(coefficients.data());
    }
};

using ShBasis = Eigen::Matrix<double, 9, 1>;

/// Real spherical harmonics bands 0-2 evaluated at a unit normal:
/// 0.282095, 0.488603*(y, z, x), 1.092548*xy, 1.092548*yz,
/// 0.315392*(3z^2-1), 1.092548*xz, 0.546274*(x^2-y^2).
/// Throws ValidationError when |n| deviates from 1 by more than 1e-6.
ShBasis sh_basis(const Vec3& normal);

/// Rows are dH_k/dn.
Eigen::Matrix<double, 9, 3> sh_basis_jacobian(const Vec3& normal);

/**
 * Lambertian SH shading in UV space: per texel inside the mask,
 * B = A (Hadamard) sum_k l_k H_k(N); zero outside the mask.
 */
Image shade(const Image& albedo_uv, const Lighting& lighting, const Image& normal_uv,
            const std::vector<uint8_t>& mask);

struct ShadeGrads {
    Image albedo;    // same shape as albedo_uv
    VecX lighting;   // 27
    Image normals;   // same shape as normal_uv
};

ShadeGrads shade_backward(const Image& albedo_uv, const Lighting& lighting,
                          const Image& normal_uv, const std::vector<uint8_t>& mask,
                          const Image& grad_shaded);

} // namespace faceforge
