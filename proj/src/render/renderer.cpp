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
#include "faceforge/render/renderer.hpp"

namespace faceforge {

CoarseRender render_coarse(const SceneContext& scene, const LatentCode& code,
                           bool with_image) {
    const ParametricHeadModel& head = *scene.head;
    code.validate_for(head, scene.albedo->dim());

    CoarseRender fwd;
    fwd.mesh = decode_geometry(head, code.beta, code.theta, code.psi, &fwd.geom);
    fwd.projected = project(fwd.mesh.vertices, code.camera);
    fwd.landmarks3d = surface_landmarks(fwd.mesh, head.landmark_embedding);
    fwd.landmarks2d = project(fwd.landmarks3d, code.camera);
    if (!with_image) {
        return fwd;
    }

    fwd.vertex_normals_value =
        vertex_normals(fwd.mesh.vertices, fwd.mesh.triangles, &fwd.normals_cache);
    fwd.normal_map = mesh_to_uv(scene.uv_table, head.triangles, fwd.vertex_normals_value,
                                ChannelTag::normal);
    fwd.position_map =
        mesh_to_uv(scene.uv_table, head.triangles, fwd.mesh.vertices, ChannelTag::position);
    fwd.albedo_uv = albedo_map(*scene.albedo, code.alpha);
    fwd.shaded_uv = shade(fwd.albedo_uv, code.lighting, fwd.normal_map, scene.uv_table.mask);
    fwd.frags = rasterize(fwd.projected, fwd.mesh.vertices.col(2), head.triangles,
                          scene.image_width, scene.image_height);
    fwd.image = render_image(fwd.frags, fwd.projected, head.uv_coords, head.triangles,
                             fwd.shaded_uv);
    fwd.has_image = true;
    return fwd;
}

CoarseGrads render_coarse_backward(const SceneContext& scene, const LatentCode& code,
                                   const CoarseRender& fwd, const Image* grad_image,
                                   const Points2d* grad_landmarks2d) {
    const ParametricHeadModel& head = *scene.head;
    CoarseGrads grads;
    grads.alpha = VecX::Zero(scene.albedo->dim());

    PointMatrix grad_vertices = PointMatrix::Zero(head.vertex_count(), 3);

    if (grad_image != nullptr) {
        const RenderImageGrads img_grads = render_image_backward(
            fwd.frags, fwd.projected, head.uv_coords, head.triangles, fwd.shaded_uv,
            *grad_image);
        const ShadeGrads sg = shade_backward(fwd.albedo_uv, code.lighting, fwd.normal_map,
                                             scene.uv_table.mask, img_grads.shaded_uv);
        grads.alpha = albedo_map_backward(*scene.albedo, sg.albedo);
        grads.lighting = sg.lighting;
        const MatX grad_vertex_normals = mesh_to_uv_backward(
            scene.uv_table, head.triangles, fwd.vertex_normals_value, ChannelTag::normal,
            sg.normals);
        grad_vertices += vertex_normals_backward(fwd.mesh.vertices, fwd.mesh.triangles,
                                                 fwd.normals_cache,
                                                 PointMatrix(grad_vertex_normals));
        const ProjectionGrads proj_grads =
            project_backward(fwd.mesh.vertices, code.camera, img_grads.projected);
        grad_vertices += proj_grads.points;
        grads.scale += proj_grads.scale;
        grads.translation += proj_grads.translation;
    }

    if (grad_landmarks2d != nullptr) {
        const ProjectionGrads lmk_grads =
            project_backward(fwd.landmarks3d, code.camera, *grad_landmarks2d);
        grads.scale += lmk_grads.scale;
        grads.translation += lmk_grads.translation;
        grad_vertices +=
            surface_landmarks_backward(fwd.mesh, head.landmark_embedding, lmk_grads.points);
    }

    const GeometryGrads geo = decode_geometry_backward(head, fwd.geom, grad_vertices);
    grads.beta = geo.beta;
    grads.theta = geo.theta;
    grads.psi = geo.psi;
    return grads;
}

Image coverage_mask(const FragmentBuffer& frags) {
    Image mask(frags.height, frags.width, 1, 0.0, ChannelTag::mask);
    for (int row = 0; row < frags.height; ++row) {
        for (int col = 0; col < frags.width; ++col) {
            if (frags.covered(row, col)) {
                mask.at(row, col, 0) = 1.0;
            }
        }
    }
    return mask;
}

} // namespace faceforge
