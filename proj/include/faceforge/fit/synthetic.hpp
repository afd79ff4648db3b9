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

#include "faceforge/core/rng.hpp"
#include "faceforge/fit/fitter.hpp"

namespace faceforge {

/// A plausible random ground-truth code framed for the scene's image size.
LatentCode synthetic_ground_truth(const SceneContext& scene, Rng& rng, int detail_dim = 8);

/// Renders a code into an observation (image, landmarks, coverage mask).
FitObservation synthetic_observation(const SceneContext& scene, const LatentCode& code);

/// Seeded perturbation of every parameter group (fit initialization noise).
LatentCode perturb_code(const LatentCode& code, Rng& rng, double strength);

/// Band-limited random displacement field with |values| <= amplitude.
Image random_displacement_field(int size, uint64_t seed, double amplitude);

/// Wraps a fixed displacement map in a linear decoder (zero weights, bias =
/// atanh(D/scale)), so fixed ground-truth details render through the
/// ordinary detail path.
DetailDecoder decoder_for_fixed_displacement(const Image& displacement, int latent_dim,
                                             int psi_dim, double scale = 0.01);

/**
 * Separable-detail dataset: ground-truth displacement is
 * f(subject) + g(expression) with g linear in the expression vector,
 * so held-out expressions are predictable by a disentangled decoder.
 * The last `held_out` expressions per subject are split off.
 */
struct SyntheticDetailDataset {
    std::vector<DetailTrainingSubject> train;
    std::vector<DetailTrainingSubject> held_out;
};

SyntheticDetailDataset make_separable_detail_dataset(const SceneContext& scene, uint64_t seed,
                                                     int subjects, int expressions,
                                                     int held_out);

/// Mean detail-consistency loss of held-out images against trained donor
/// deltas of the same subject.
double held_out_swap_loss(const SceneContext& scene, const SyntheticDetailDataset& dataset,
                          const TrainResult& result, const FeatureExtractor& extractor,
                          const LossWeights& weights, const IdMrfConfig& mrf);

} // namespace faceforge
