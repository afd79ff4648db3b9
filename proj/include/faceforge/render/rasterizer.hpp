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
 * Per-pixel visibility: nearest triangle id, barycentric coordinates of the
 * pixel center, and camera-space depth. Pixel (row, col) has its center at
 * image coordinates (col + 0.5, row + 0.5), origin top-left. Depth is
 * camera-space z with larger z closer; equal depths resolve to the lower
 * triangle id, so the result is independent of triangle processing order.
 */
struct FragmentBuffer {
    int width = 0;
    int height = 0;
    std::vector<int32_t> triangle;   // -1 where uncovered
    std::vector<double> depth;
    std::vector<double> barycentric; // 3 per pixel
    int coverage = 0;                // number of covered pixels

    bool covered(int row, int col) const {
        return triangle[static_cast<std::size_t>(row) * width + col] >= 0;
    }
};

/// Z-buffer rasterization of projected triangles over pixel centers.
FragmentBuffer rasterize(const Points2d& projected, const VecX& vertex_depth,
                         const TriangleMatrix& triangles, int width, int height);

/**
 * Samples the shaded UV texture at the interpolated UV coordinate of every
 * covered pixel (bilinear, clamp-to-edge); background stays zero.
 */
Image render_image(const FragmentBuffer& frags, const Points2d& projected,
                   const UvMatrix& uv_coords, const TriangleMatrix& triangles,
                   const Image& shaded_uv);

struct RenderImageGrads {
    Image shaded_uv;       // gradient w.r.t. the sampled texture
    Points2d projected;    // gradient w.r.t. projected vertex positions
};

/**
 * Reverse-mode pullback of a pixel gradient through UV sampling and the
 * barycentric coordinates. Visibility (coverage and triangle assignment)
 * is treated as piecewise constant.
 */
RenderImageGrads render_image_backward(const FragmentBuffer& frags, const Points2d& projected,
                                       const UvMatrix& uv_coords, const TriangleMatrix& triangles,
                                       const Image& shaded_uv, const Image& grad_image);

} // namespace faceforge
