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

/**
 * Static texel-to-surface assignment for a fixed UV layout: each texel whose
 * center falls inside a UV triangle stores that triangle and the barycentric
 * coordinates of the center. Texel (row, col) covers
 * u = (col + 0.5)/size, v = 1 - (row + 0.5)/size (v up, OBJ convention).
 * Built once per model and texture size; resampling then reduces to a
 * constant sparse linear map.
 */
struct UvRasterTable {
    int size = 0;
    std::vector<int32_t> triangle;  // size*size, -1 where uncovered
    std::vector<double> barycentric; // 3 per texel
    std::vector<uint8_t> mask;      // 1 where covered
    int overlap_count = 0;          // texels claimed by more than one triangle

    bool covered(int row, int col) const {
        return mask[static_cast<std::size_t>(row) * size + col] != 0;
    }
};

UvRasterTable build_uv_table(const UvMatrix& uv_coords, const TriangleMatrix& triangles,
                             int size);

/**
 * Resamples a per-vertex attribute into UV space via the table. With
 * tag == ChannelTag::normal the interpolated vectors are renormalized per
 * texel. Texels outside all UV triangles stay zero (mask 0).
 */
Image mesh_to_uv(const UvRasterTable& table, const TriangleMatrix& triangles,
                 const MatX& attribute, ChannelTag tag = ChannelTag::none);

/// Pullback of a UV-map gradient onto the per-vertex attribute.
MatX mesh_to_uv_backward(const UvRasterTable& table, const TriangleMatrix& triangles,
                         const MatX& attribute, ChannelTag tag, const Image& grad_map);

} // namespace faceforge
