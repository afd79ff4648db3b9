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
#include "faceforge/loss/consistency.hpp"

namespace faceforge {

Image uv_mask_image(const SceneContext& scene) {
    const int d = scene.uv_table.size;
    Image mask(d, d, 1, 0.0, ChannelTag::mask);
    for (int y = 0; y < d; ++y) {
        for (int x = 0; x < d; ++x) {
            mask.at(y, x, 0) = scene.uv_table.covered(y, x) ? 1.0 : 0.0;
        }
    }
    return mask;
}

SwapRenderLoss shape_consistency_loss(const SceneContext& scene, const LatentCode& code,
                                      const VecX& beta_donor, const Image& image,
                                      const Image& mask, const FeatureExtractor& extractor,
                                      const LossWeights& weights, CoarseGrads* grads) {
    LatentCode swapped = code;
    swapped.beta = beta_donor;
    const CoarseRender fwd = render_coarse(scene, swapped);

    SwapRenderLoss result;
    Image grad_pho, grad_id;
    result.photometric = photometric_loss(image, fwd.image, mask,
                                          grads != nullptr ? &grad_pho : nullptr);
    result.identity =
        identity_loss(extractor, image, fwd.image, grads != nullptr ? &grad_id : nullptr);
    result.total = weights.pho * result.photometric + weights.id * result.identity;

    if (grads != nullptr) {
        Image grad_image(fwd.image.height(), fwd.image.width(), fwd.image.channels());
        for (std::size_t i = 0; i < grad_image.data().size(); ++i) {
            grad_image.data()[i] =
                weights.pho * grad_pho.data()[i] + weights.id * grad_id.data()[i];
        }
        *grads = render_coarse_backward(scene, swapped, fwd, &grad_image, nullptr);
    }
    return result;
}

DetailLossTerms detail_objective(const SceneContext& scene, const LatentCode& code,
                                 const CoarseRender& coarse, const DetailDecoder& decoder,
                                 const VecX& delta, const Image& image, const Image& mask,
                                 const FeatureExtractor& extractor, const LossWeights& weights,
                                 const IdMrfConfig& mrf_config, DetailGrads* grads,
                                 bool want_decoder_grads) {
    const DetailRender fwd = render_detail(scene, code, coarse, decoder, delta);

    DetailLossTerms terms;
    Image grad_pho, grad_mrf, grad_sym, grad_reg;
    terms.photometric = photometric_loss(image, fwd.image, mask,
                                         grads != nullptr ? &grad_pho : nullptr);
    terms.mrf = idmrf_loss(extractor, image, fwd.image, mask, mrf_config,
                           grads != nullptr ? &grad_mrf : nullptr);
    const Image uv_mask = uv_mask_image(scene);
    terms.symmetry =
        symmetry_loss(fwd.displacement, uv_mask, grads != nullptr ? &grad_sym : nullptr);
    terms.regularizer =
        displacement_l1(fwd.displacement, grads != nullptr ? &grad_reg : nullptr);
    terms.total = weights.phoD * terms.photometric + weights.mrf * terms.mrf +
                  weights.sym * terms.symmetry + weights.regD * terms.regularizer;

    if (grads != nullptr) {
        Image grad_image(fwd.image.height(), fwd.image.width(), fwd.image.channels());
        for (std::size_t i = 0; i < grad_image.data().size(); ++i) {
            grad_image.data()[i] =
                weights.phoD * grad_pho.data()[i] + weights.mrf * grad_mrf.data()[i];
        }
        Image grad_displacement(fwd.displacement.height(), fwd.displacement.width(), 1);
        for (std::size_t i = 0; i < grad_displacement.data().size(); ++i) {
            grad_displacement.data()[i] =
                weights.sym * grad_sym.data()[i] + weights.regD * grad_reg.data()[i];
        }
        *grads = render_detail_backward(scene, code, coarse, decoder, fwd, &grad_image,
                                        &grad_displacement, want_decoder_grads);
    }
    return terms;
}

DetailLossTerms detail_consistency_loss(const SceneContext& scene, const LatentCode& code,
                                        const VecX& delta_donor, const CoarseRender& coarse,
                                        const DetailDecoder& decoder, const Image& image,
                                        const Image& mask, const FeatureExtractor& extractor,
                                        const LossWeights& weights,
                                        const IdMrfConfig& mrf_config, DetailGrads* grads,
                                        bool want_decoder_grads) {
    return detail_objective(scene, code, coarse, decoder, delta_donor, image, mask, extractor,
                            weights, mrf_config, grads, want_decoder_grads);
}

} // namespace faceforge
