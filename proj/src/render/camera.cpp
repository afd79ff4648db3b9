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
#include "faceforge/render/camera.hpp"

namespace faceforge {

Points2d project(const PointMatrix& points, const Camera& camera) {
    Points2d out(points.rows(), 2);
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        out(i, 0) = camera.scale * points(i, 0) + camera.translation.x();
        out(i, 1) = camera.scale * points(i, 1) + camera.translation.y();
    }
    return out;
}

ProjectionGrads project_backward(const PointMatrix& points, const Camera& camera,
                                 const Points2d& grad_projected) {
    ProjectionGrads grads;
    grads.points = PointMatrix::Zero(points.rows(), 3);
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        const double gx = grad_projected(i, 0);
        const double gy = grad_projected(i, 1);
        grads.points(i, 0) = camera.scale * gx;
        grads.points(i, 1) = camera.scale * gy;
        grads.scale += gx * points(i, 0) + gy * points(i, 1);
        grads.translation.x() += gx;
        grads.translation.y() += gy;
    }
    return grads;
}

} // namespace faceforge
