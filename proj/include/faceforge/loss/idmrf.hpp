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

#include "faceforge/core/types.hpp"
#include "faceforge/loss/extractor.hpp"

namespace faceforge {

struct IdMrfConfig {
    double bandwidth = 0.5; // softmax sharpening h
    double epsilon = 1e-5;  // stabilizer in the relative similarity
    double coarse_weight = 2.0;
    double fine_weight = 1.0;
    double mask_threshold = 0.5; // minimum mean mask coverage to keep a cell
};

/**
 * Implicit diversified MRF matching on one set of feature patches:
 * cosine similarities are turned into relative similarities against each
 * generated patch's best other match, sharpened by exp(./h), normalized,
 * and the loss penalizes -log of the mean best matched similarity over
 * reference patches. Max selections are treated as piecewise constant in
 * the gradient.
 */
double idmrf_from_patches(const std::vector<VecX>& generated,
                          const std::vector<VecX>& reference, const IdMrfConfig& config,
                          std::vector<VecX>* grad_generated = nullptr);

/**
 * Image-level ID-MRF: extractor patch grids of both images, restricted to
 * cells covered by the face mask, matched per scale; scales are combined
 * coarse:fine with the configured 2:1 weights. An empty mask yields 0 with
 * a warning on stderr.
 */
double idmrf_loss(const FeatureExtractor& extractor, const Image& image,
                  const Image& rendered, const Image& face_mask, const IdMrfConfig& config,
                  Image* grad_rendered = nullptr);

} // namespace faceforge
