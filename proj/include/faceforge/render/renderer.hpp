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
#include "faceforge/latent_code.hpp"
#include "faceforge/render/albedo.hpp"
#include "faceforge/render/rasterizer.hpp"
#include "faceforge/render/uv_sampler.hpp"

namespace faceforge {

/// Immutable per-run binding of a head model, albedo model, output image
/// size and the precomputed UV raster table. Shareable across threads.
struct SceneContext {
    const ParametricHeadModel* head = nullptr;
    const AlbedoModel* albedo = nullptr;
    UvRasterTable uv_table;
    int image_width = 0;
    int image_height = 0;

    static SceneContext create(const ParametricHeadModel& head, const AlbedoModel& albedo,
                               int image_size, int uv_size) {
        SceneContext scene;
        scene.head = &head;
        scene.albedo = &albedo;
        scene.image_width = image_size;
        scene.image_height = image_size;
        scene.uv_table = build_uv_table(head.uv_coords, head.triangles, uv_size);
        return scene;
    }
};

/// Forward render with every intermediate needed for the backward pass.
struct CoarseRender {
    Mesh mesh;
    GeometryCache geom;
    VertexNormalsCache normals_cache;
    PointMatrix vertex_normals_value; // n x 3
    Points2d projected;               // n x 2
    PointMatrix landmarks3d;          // 68 x 3
    Points2d landmarks2d;             // 68 x 2
    Image albedo_uv;   // A(alpha)
    Image normal_map;  // resampled vertex normals in UV space
    Image position_map; // M_uv (vertex positions in UV space)
    Image shaded_uv;   // B
    FragmentBuffer frags;
    Image image;       // I_r
    bool has_image = false;
};

/// Decodes geometry, shades the UV texture with SH lighting, rasterizes and
/// samples it. With with_image = false only geometry and landmarks are
/// computed (landmark-only fitting stages).
CoarseRender render_coarse(const SceneContext& scene, const LatentCode& code,
                           bool with_image = true);

struct CoarseGrads {
    VecX beta, theta, psi, alpha;
    VecX lighting = VecX::Zero(27);
    double scale = 0.0;
    Vec2 translation = Vec2::Zero();
};

/**
 * Reverse-mode accumulation of an image gradient and/or a projected-landmark
 * gradient onto every coarse parameter. Either gradient may be null. `code`
 * must be the code that produced `fwd`.
 */
CoarseGrads render_coarse_backward(const SceneContext& scene, const LatentCode& code,
                                   const CoarseRender& fwd, const Image* grad_image,
                                   const Points2d* grad_landmarks2d);

/// Coverage mask of the rendered image (1 where a fragment exists).
Image coverage_mask(const FragmentBuffer& frags);

} // namespace faceforge
