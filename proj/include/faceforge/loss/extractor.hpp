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

#include <memory>
#include <vector>

#include "faceforge/core/types.hpp"
#include "faceforge/render/image.hpp"

namespace faceforge {

/// One spatial grid of feature vectors (rows x cols cells, `channels`
/// values per cell), as produced by one scale of a patch extractor.
struct FeatureGrid {
    int rows = 0;
    int cols = 0;
    int channels = 0;
    int cell_size = 0; // pixel footprint of a cell at full image resolution
    std::vector<double> data;

    double& at(int r, int c, int ch) {
        return data[(static_cast<std::size_t>(r) * cols + c) * channels + ch];
    }
    double at(int r, int c, int ch) const {
        return data[(static_cast<std::size_t>(r) * cols + c) * channels + ch];
    }
};

/**
 * Deterministic image-feature source standing in for pretrained networks.
 * Embedding mode produces a unit-norm identity vector; patch mode produces
 * feature grids at a fixed set of scales (coarsest last). Implementations
 * are stateless and safe to share across threads.
 */
class FeatureExtractor {
public:
    virtual ~FeatureExtractor() = default;

    virtual VecX embed(const Image& image) const = 0;
    virtual Image embed_backward(const Image& image, const VecX& grad_embedding) const = 0;

    virtual std::vector<FeatureGrid> patch_features(const Image& image) const = 0;
    virtual Image patch_features_backward(const Image& image,
                                          const std::vector<FeatureGrid>& grad_grids) const = 0;

    virtual int scale_count() const = 0;
};

/**
 * Built-in toy extractor: grayscale gradient-orientation histograms (8 soft
 * bins, magnitude weighted) over 8x8 cells at full and half resolution.
 * The embedding is the global plus 2x2-block pooled histogram stack with a
 * fixed epsilon floor, unit-normalized, so constant images still embed.
 */
class HogFeatureExtractor : public FeatureExtractor {
public:
    VecX embed(const Image& image) const override;
    Image embed_backward(const Image& image, const VecX& grad_embedding) const override;
    std::vector<FeatureGrid> patch_features(const Image& image) const override;
    Image patch_features_backward(const Image& image,
                                  const std::vector<FeatureGrid>& grad_grids) const override;
    int scale_count() const override { return 2; }

    static constexpr int kCellSize = 8;
    static constexpr int kBins = 8;
    static constexpr double kEpsilonFloor = 1e-8;
};

} // namespace faceforge
