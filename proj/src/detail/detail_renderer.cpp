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
#include "faceforge/detail/detail_renderer.hpp"

namespace faceforge {

DetailRender render_detail(const SceneContext& scene, const LatentCode& code,
                           const CoarseRender& coarse, const DetailDecoder& decoder,
                           const VecX& delta) {
    const std::vector<uint8_t>& mask = scene.uv_table.mask;
    DetailRender fwd;
    fwd.displacement =
        decoder.decode(delta, code.psi, code.jaw_pose(*scene.head), &fwd.decoder_cache);
    fwd.mprime =
        apply_displacement(coarse.position_map, coarse.normal_map, fwd.displacement, mask);
    fwd.fd_coarse = fd_normals(coarse.position_map, mask, coarse.normal_map).normals;
    fwd.fd_detail = fd_normals(fwd.mprime, mask, coarse.normal_map).normals;
    fwd.nprime = transfer_normals(fwd.fd_coarse, fwd.fd_detail, coarse.normal_map, mask);
    fwd.shaded_uv = shade(coarse.albedo_uv, code.lighting, fwd.nprime, mask);
    fwd.image = render_image(coarse.frags, coarse.projected, scene.head->uv_coords,
                             scene.head->triangles, fwd.shaded_uv);
    return fwd;
}

DetailGrads render_detail_backward(const SceneContext& scene, const LatentCode& code,
                                   const CoarseRender& coarse, const DetailDecoder& decoder,
                                   const DetailRender& fwd, const Image* grad_image,
                                   const Image* grad_displacement, bool want_decoder_grads) {
    const std::vector<uint8_t>& mask = scene.uv_table.mask;
    const int d = scene.uv_table.size;

    Image grad_d_total(d, d, 1);
    if (grad_displacement != nullptr) {
        grad_d_total = *grad_displacement;
    }

    if (grad_image != nullptr) {
        const RenderImageGrads img_grads =
            render_image_backward(coarse.frags, coarse.projected, scene.head->uv_coords,
                                  scene.head->triangles, fwd.shaded_uv, *grad_image);
        // The coarse stage is frozen: the projected-vertex gradient is dropped.
        const ShadeGrads sg = shade_backward(coarse.albedo_uv, code.lighting, fwd.nprime, mask,
                                             img_grads.shaded_uv);
        const Image grad_fd_detail =
            transfer_normals_backward(fwd.fd_coarse, fwd.fd_detail, coarse.normal_map, mask,
                                      sg.normals);
        const Image grad_mprime = fd_normals_backward(fwd.mprime, mask, grad_fd_detail);
        const Image grad_d_img =
            apply_displacement_backward(coarse.normal_map, mask, grad_mprime);
        for (std::size_t i = 0; i < grad_d_total.data().size(); ++i) {
            grad_d_total.data()[i] += grad_d_img.data()[i];
        }
    }

    DetailGrads grads;
    VecX weight_grads;
    const VecX grad_input = decoder.decode_backward(
        fwd.decoder_cache, grad_d_total, want_decoder_grads ? &weight_grads : nullptr);
    grads.delta = grad_input.head(decoder.spec().latent_dim);
    if (want_decoder_grads) {
        grads.decoder = std::move(weight_grads);
    }
    return grads;
}

} // namespace faceforge
