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

#include "faceforge/detail/detail_renderer.hpp"
#include "faceforge/loss/idmrf.hpp"
#include "faceforge/loss/losses.hpp"
#include "faceforge/render/renderer.hpp"

namespace faceforge {

/// The UV-space face mask as a 1-channel image (from the raster table).
Image uv_mask_image(const SceneContext& scene);

struct SwapRenderLoss {
    double total = 0.0;   // weighted photometric + identity of the swap render
    double photometric = 0.0;
    double identity = 0.0;
};

/**
 * Shape consistency: re-renders image i's code with its shape vector
 * replaced by beta_donor and evaluates the weighted photometric and
 * identity terms against image i. Optional gradients are with respect to
 * the full swapped code (the beta block belongs to the donor).
 */
SwapRenderLoss shape_consistency_loss(const SceneContext& scene, const LatentCode& code,
                                      const VecX& beta_donor, const Image& image,
                                      const Image& mask, const FeatureExtractor& extractor,
                                      const LossWeights& weights,
                                      CoarseGrads* grads = nullptr);

/// The four detail terms of one render, and their weighted sum.
struct DetailLossTerms {
    double photometric = 0.0;
    double mrf = 0.0;
    double symmetry = 0.0;
    double regularizer = 0.0;
    double total = 0.0;
};

/**
 * Evaluates the detail objective (photometric-detail, ID-MRF, soft
 * symmetry, displacement L1) for a given detail code on top of a fixed
 * coarse render. Gradients, when requested, are of the weighted total.
 */
DetailLossTerms detail_objective(const SceneContext& scene, const LatentCode& code,
                                 const CoarseRender& coarse, const DetailDecoder& decoder,
                                 const VecX& delta, const Image& image, const Image& mask,
                                 const FeatureExtractor& extractor, const LossWeights& weights,
                                 const IdMrfConfig& mrf_config, DetailGrads* grads = nullptr,
                                 bool want_decoder_grads = false);

/**
 * Detail consistency: the detail objective of image i evaluated with a
 * donor detail code (decoded against image i's expression and jaw pose).
 */
DetailLossTerms detail_consistency_loss(const SceneContext& scene, const LatentCode& code,
                                        const VecX& delta_donor, const CoarseRender& coarse,
                                        const DetailDecoder& decoder, const Image& image,
                                        const Image& mask, const FeatureExtractor& extractor,
                                        const LossWeights& weights,
                                        const IdMrfConfig& mrf_config,
                                        DetailGrads* grads = nullptr,
                                        bool want_decoder_grads = false);

} // namespace faceforge
