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
#include "faceforge/fit/retarget.hpp"

#include "faceforge/core/error.hpp"

namespace faceforge {

LatentCode retarget(const ParametricHeadModel& model, const LatentCode& identity,
                    const LatentCode& expression) {
    if (identity.theta.size() != expression.theta.size() ||
        identity.psi.size() != expression.psi.size()) {
        throw DimensionError("retarget: codes are bound to different models");
    }
    LatentCode out = identity;
    out.psi = expression.psi;
    if (model.jaw_joint >= 0) {
        out.theta.segment<3>(3 + 3 * model.jaw_joint) =
            expression.theta.segment<3>(3 + 3 * model.jaw_joint);
    }
    return out;
}

RetargetResult retarget_with_displacement(const ParametricHeadModel& model,
                                          const LatentCode& identity,
                                          const LatentCode& expression,
                                          const DetailDecoder& decoder) {
    RetargetResult result;
    result.code = retarget(model, identity, expression);
    result.displacement = decoder.decode(identity.delta, result.code.psi,
                                         result.code.jaw_pose(model));
    return result;
}

std::vector<AnimationFrame> animate_sequence(const SceneContext& scene,
                                             const LatentCode& identity,
                                             const std::vector<LatentCode>& expressions,
                                             const DetailDecoder& decoder) {
    std::vector<AnimationFrame> frames;
    frames.reserve(expressions.size());
    for (const LatentCode& expression : expressions) {
        AnimationFrame frame;
        frame.code = retarget(*scene.head, identity, expression);
        const CoarseRender coarse = render_coarse(scene, frame.code);
        const DetailRender detail =
            render_detail(scene, frame.code, coarse, decoder, identity.delta);
        frame.displacement = detail.displacement;
        frame.image = detail.image;
        Mesh mesh = coarse.mesh;
        mesh.normals = coarse.vertex_normals_value;
        frame.mesh = displaced_mesh(mesh, detail.displacement);
        frames.push_back(std::move(frame));
    }
    return frames;
}

} // namespace faceforge
