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

#include "faceforge/core/error.hpp"
#include "faceforge/core/types.hpp"

namespace faceforge {

/**
 * Orthographic camera: v = s * (x, y) + t in image units (pixels). The
 * projection drops z; camera-space z is used as rasterization depth with
 * larger z closer to the camera.
 */
struct Camera {
    double scale = 1.0;
    Vec2 translation = Vec2::Zero();

    void validate() const {
        if (!(scale > 0.0)) {
            throw ValidationError("camera scale must be positive");
        }
    }
};

/// Projects n x 3 points to n x 2 image coordinates.
Points2d project(const PointMatrix& points, const Camera& camera);

struct ProjectionGrads {
    PointMatrix points; // gradient w.r.t. the 3D points (z rows are zero)
    double scale = 0.0;
    Vec2 translation = Vec2::Zero();
};

ProjectionGrads project_backward(const PointMatrix& points, const Camera& camera,
                                 const Points2d& grad_projected);

} // namespace faceforge
