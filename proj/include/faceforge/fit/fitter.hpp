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

#include <string>
#include <vector>

#include "faceforge/fit/fit_config.hpp"
#include "faceforge/latent_code.hpp"
#include "faceforge/loss/consistency.hpp"

namespace faceforge {

/// One observed image with its landmarks and skin mask.
struct FitObservation {
    Image image;
    Points2d landmarks; // 68 x 2, image coordinates
    Image mask;         // 1-channel skin mask
};

struct FitResult {
    LatentCode code;
    std::vector<LossReport> trace;
    bool aborted = false;
    std::string abort_reason;
};

/// Camera/pose init from the landmark bounding boxes (used when no init
/// code is given).
LatentCode initial_code_from_landmarks(const SceneContext& scene, const Points2d& landmarks);

/// Per-iteration coarse objective; grads (optional) are of the weighted
/// total over the losses the stage enables.
LossReport evaluate_coarse(const SceneContext& scene, const LatentCode& code,
                           const FitObservation& obs, const FeatureExtractor& extractor,
                           const LossWeights& weights, const StageConfig& stage,
                           CoarseGrads* grads = nullptr);

/**
 * Analysis-by-synthesis fit of the coarse code to one image by staged
 * adaptive-moment descent. The shape consistency term is inactive (single
 * image). Returns the best-so-far code of the final stage; a non-finite
 * loss aborts with the last finite best.
 */
FitResult fit_coarse(const SceneContext& scene, const FitObservation& obs,
                     const FeatureExtractor& extractor, const FitConfig& config,
                     const LatentCode* init = nullptr);

struct MultiFitResult {
    std::vector<LatentCode> codes;
    std::vector<LossReport> trace; // summed over images, plus the swap terms
    bool aborted = false;
    std::string abort_reason;
};

/**
 * Joint fit over several images of one subject, adding the shape
 * consistency loss with round-robin shape swaps once the photometric stage
 * is active. With config.shared_beta the images share one shape vector.
 */
MultiFitResult fit_multi(const SceneContext& scene, const std::vector<FitObservation>& subject,
                         const FeatureExtractor& extractor, const FitConfig& config);

struct DetailFitResult {
    VecX delta;
    Image displacement;
    std::vector<LossReport> trace;
    bool aborted = false;
    std::string abort_reason;
};

/// Optimizes the detail code against the detail objective with the coarse
/// code frozen; the decoder is fixed. init_delta defaults to zero.
DetailFitResult fit_detail(const SceneContext& scene, const LatentCode& coarse_code,
                           const DetailDecoder& decoder, const FitObservation& obs,
                           const FeatureExtractor& extractor, const FitConfig& config,
                           const VecX* init_delta = nullptr);

struct DetailTrainingImage {
    LatentCode code; // fixed coarse parameters
    Image image;
    Image mask;
};

struct DetailTrainingSubject {
    std::string id;
    std::vector<DetailTrainingImage> images;
};

struct TrainResult {
    DetailDecoder decoder;
    std::vector<std::vector<VecX>> deltas; // [subject][image]
    std::vector<double> trace;             // total objective per iteration
    bool aborted = false;
    std::string abort_reason;
};

/**
 * Joint optimization of decoder weights and per-image detail codes with
 * the within-subject swap term: each step adds, per image, the detail
 * objective of the round-robin partner's code decoded against this image's
 * expression, weighted by the detail-consistency weight.
 */
TrainResult train_detail_decoder(const SceneContext& scene,
                                 const std::vector<DetailTrainingSubject>& subjects,
                                 const DetailDecoder& init, const FeatureExtractor& extractor,
                                 const TrainConfig& config);

} // namespace faceforge
