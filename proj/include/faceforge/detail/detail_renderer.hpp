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

#include "faceforge/detail/decoder.hpp"
#include "faceforge/detail/displacement.hpp"
#include "faceforge/render/renderer.hpp"

namespace faceforge {

/// Detail forward pass with the intermediates needed for the backward pass.
struct DetailRender {
    DecoderCache decoder_cache;
    Image displacement; // D
    Image mprime;       // M'_uv
    Image fd_coarse;    // finite-difference normals of M_uv
    Image fd_detail;    // finite-difference normals of M'_uv
    Image nprime;       // shading normals N'
    Image shaded_uv;    // B' = B(alpha, l, N')
    Image image;        // I'_r
};

/**
 * Detail rendering: the displacement decoded from (delta, psi, jaw) offsets
 * the coarse position map along the smooth normals; the induced normal tilt
 * (rotation between finite-difference normals before and after) is applied
 * to the smooth shading normals and the coarse geometry is re-rendered with
 * that normal map. Rasterization is reused from the coarse pass, so the
 * coverage of I'_r equals that of I_r for any displacement, and a zero
 * displacement reproduces the coarse render exactly.
 */
DetailRender render_detail(const SceneContext& scene, const LatentCode& code,
                           const CoarseRender& coarse, const DetailDecoder& decoder,
                           const VecX& delta);

struct DetailGrads {
    VecX delta;
    VecX decoder; // flattened; empty unless requested
};

/**
 * Pullback of an image gradient and/or a direct displacement gradient
 * (symmetry and L1 regularizers) onto the detail code and, optionally, the
 * decoder weights. The coarse stage is frozen: gradients toward coarse
 * parameters are not produced.
 */
DetailGrads render_detail_backward(const SceneContext& scene, const LatentCode& code,
                                   const CoarseRender& coarse, const DetailDecoder& decoder,
                                   const DetailRender& fwd, const Image* grad_image,
                                   const Image* grad_displacement, bool want_decoder_grads);

} // namespace faceforge
