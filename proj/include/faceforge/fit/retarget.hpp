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

#include <vector>

#include "faceforge/detail/detail_renderer.hpp"

namespace faceforge {

/**
 * Animation recombination: shape, head pose, albedo, lighting, camera and
 * detail code come from the identity capture; expression and jaw pose come
 * from the expression capture.
 */
LatentCode retarget(const ParametricHeadModel& model, const LatentCode& identity,
                    const LatentCode& expression);

struct RetargetResult {
    LatentCode code;
    Image displacement; // decoder evaluated at (delta_id, psi_expr, jaw_expr)
};

RetargetResult retarget_with_displacement(const ParametricHeadModel& model,
                                          const LatentCode& identity,
                                          const LatentCode& expression,
                                          const DetailDecoder& decoder);

struct AnimationFrame {
    LatentCode code;
    Image displacement;
    Image image;      // detail render
    Mesh mesh;        // displaced vertex-level mesh
};

/// Per-frame retarget, detail render and displaced-mesh export.
std::vector<AnimationFrame> animate_sequence(const SceneContext& scene,
                                             const LatentCode& identity,
                                             const std::vector<LatentCode>& expressions,
                                             const DetailDecoder& decoder);

} // namespace faceforge
