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

#include <cstdint>
#include <vector>

#include "faceforge/core/types.hpp"
#include "faceforge/render/image.hpp"

namespace faceforge {

/// Linear UV albedo model: mean map plus weighted basis offsets.
struct AlbedoModel {
    Image mean;                // d x d x 3
    std::vector<Image> basis;  // |alpha| maps of d x d x 3

    int texture_size() const { return mean.height(); }
    int dim() const { return static_cast<int>(basis.size()); }
    void validate() const;
};

/// mean + sum_i alpha_i basis_i. Values are left unclamped; [0,1] clamping
/// happens only at export.
Image albedo_map(const AlbedoModel& model, const VecX& alpha);

/// Pullback of an albedo-map gradient onto alpha.
VecX albedo_map_backward(const AlbedoModel& model, const Image& grad_map);

/// Deterministic band-limited toy albedo model (skin-toned mean plus
/// low-frequency random basis maps).
AlbedoModel synthesize_toy_albedo(uint64_t seed, int texture_size, int dim);

} // namespace faceforge
