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

#include "faceforge/core/head_model.hpp"
#include "faceforge/render/camera.hpp"
#include "faceforge/render/sh.hpp"

namespace faceforge {

/// Per-image parameter bundle: shape, expression, pose, albedo, lighting and
/// camera (the coarse code) plus the detail code delta.
struct LatentCode {
    VecX beta;
    VecX psi;
    VecX theta;
    VecX alpha;
    Lighting lighting;
    Camera camera;
    VecX delta;

    static LatentCode zeros(const ParametricHeadModel& model, int albedo_dim,
                            int detail_dim = 128) {
        LatentCode code;
        code.beta = VecX::Zero(model.shape_dim());
        code.psi = VecX::Zero(model.expression_dim());
        code.theta = VecX::Zero(model.pose_dim());
        code.alpha = VecX::Zero(albedo_dim);
        code.delta = VecX::Zero(detail_dim);
        return code;
    }

    Vec3 jaw_pose(const ParametricHeadModel& model) const {
        if (model.jaw_joint < 0) {
            return Vec3::Zero();
        }
        return theta.segment<3>(3 + 3 * model.jaw_joint);
    }

    void validate_for(const ParametricHeadModel& model, int albedo_dim) const {
        if (beta.size() != model.shape_dim() || psi.size() != model.expression_dim() ||
            theta.size() != model.pose_dim() || alpha.size() != albedo_dim ||
            lighting.coefficients.size() != 27) {
            throw DimensionError("latent code dimensions do not match the bound model");
        }
        camera.validate();
    }
};

} // namespace faceforge
