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
#include "faceforge/render/uv_sampler.hpp"

#include <algorithm>
#include <cmath>

#include "faceforge/core/error.hpp"

namespace faceforge {

namespace {

inline double cross2(double ax, double ay, double bx, double by) {
    return ax * by - ay * bx;
}

} // namespace

UvRasterTable build_uv_table(const UvMatrix& uv_coords, const TriangleMatrix& triangles,
                             int size) {
    if (size < 1) {
        throw ValidationError("uv table size must be >= 1");
    }
    UvRasterTable table;
    table.size = size;
    const std::size_t texels = static_cast<std::size_t>(size) * size;
    table.triangle.assign(texels, -1);
    table.barycentric.assign(texels * 3, 0.0);
    table.mask.assign(texels, 0);

    const double d = static_cast<double>(size);
    for (Eigen::Index f = 0; f < triangles.rows(); ++f) {
        const Vec2 a = uv_coords.row(triangles(f, 0));
        const Vec2 b = uv_coords.row(triangles(f, 1));
        const Vec2 c = uv_coords.row(triangles(f, 2));
        const double area = cross2(b.x() - a.x(), b.y() - a.y(), c.x() - a.x(), c.y() - a.y());
        if (std::abs(area) < 1e-14) {
            continue;
        }
        const double min_u = std::min({a.x(), b.x(), c.x()});
        const double max_u = std::max({a.x(), b.x(), c.x()});
        const double min_v = std::min({a.y(), b.y(), c.y()});
        const double max_v = std::max({a.y(), b.y(), c.y()});
        // col covers u = (col + 0.5)/d, row covers v = 1 - (row + 0.5)/d.
        const int col_lo = std::max(0, static_cast<int>(std::ceil(min_u * d - 0.5)));
        const int col_hi = std::min(size - 1, static_cast<int>(std::floor(max_u * d - 0.5)));
        const int row_lo = std::max(0, static_cast<int>(std::ceil((1.0 - max_v) * d - 0.5)));
        const int row_hi = std::min(size - 1, static_cast<int>(std::floor((1.0 - min_v) * d - 0.5)));
        for (int row = row_lo; row <= row_hi; ++row) {
            const double v = 1.0 - (row + 0.5) / d;
            for (int col = col_lo; col <= col_hi; ++col) {
                const double u = (col + 0.5) / d;
                const double w0 = cross2(b.x() - u, b.y() - v, c.x() - u, c.y() - v) / area;
                const double w1 = cross2(c.x() - u, c.y() - v, a.x() - u, a.y() - v) / area;
                const double w2 = 1.0 - w0 - w1;
                if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) {
                    continue;
                }
                const std::size_t idx = static_cast<std::size_t>(row) * size + col;
                if (table.mask[idx]) {
                    ++table.overlap_count;
                    continue; // first writer wins
                }
                table.mask[idx] = 1;
                table.triangle[idx] = static_cast<int32_t>(f);
                table.barycentric[idx * 3 + 0] = w0;
                table.barycentric[idx * 3 + 1] = w1;
                table.barycentric[idx * 3 + 2] = w2;
            }
        }
    }
    return table;
}

Image mesh_to_uv(const UvRasterTable& table, const TriangleMatrix& triangles,
                 const MatX& attribute, ChannelTag tag) {
    const int d = table.size;
    const int channels = static_cast<int>(attribute.cols());
    Image out(d, d, channels, 0.0, tag);
    for (int row = 0; row < d; ++row) {
        for (int col = 0; col < d; ++col) {
            const std::size_t idx = static_cast<std::size_t>(row) * d + col;
            const int32_t f = table.triangle[idx];
            if (f < 0) {
                continue;
            }
            for (int c = 0; c < channels; ++c) {
                double val = 0.0;
                for (int corner = 0; corner < 3; ++corner) {
                    val += table.barycentric[idx * 3 + corner] *
                           attribute(triangles(f, corner), c);
                }
                out.at(row, col, c) = val;
            }
            if (tag == ChannelTag::normal) {
                double norm2 = 0.0;
                for (int c = 0; c < channels; ++c) {
                    norm2 += out.at(row, col, c) * out.at(row, col, c);
                }
                const double inv = 1.0 / std::sqrt(norm2);
                for (int c = 0; c < channels; ++c) {
                    out.at(row, col, c) *= inv;
                }
            }
        }
    }
    return out;
}

MatX mesh_to_uv_backward(const UvRasterTable& table, const TriangleMatrix& triangles,
                         const MatX& attribute, ChannelTag tag, const Image& grad_map) {
    const int d = table.size;
    const int channels = static_cast<int>(attribute.cols());
    MatX grad_attr = MatX::Zero(attribute.rows(), channels);
    VecX raw(channels), grad_raw(channels);
    for (int row = 0; row < d; ++row) {
        for (int col = 0; col < d; ++col) {
            const std::size_t idx = static_cast<std::size_t>(row) * d + col;
            const int32_t f = table.triangle[idx];
            if (f < 0) {
                continue;
            }
            for (int c = 0; c < channels; ++c) {
                raw[c] = 0.0;
                for (int corner = 0; corner < 3; ++corner) {
                    raw[c] += table.barycentric[idx * 3 + corner] *
                              attribute(triangles(f, corner), c);
                }
                grad_raw[c] = grad_map.at(row, col, c);
            }
            if (tag == ChannelTag::normal) {
                const double len = raw.norm();
                const VecX unit = raw / len;
                grad_raw = (grad_raw - unit * unit.dot(grad_raw)) / len;
            }
            for (int corner = 0; corner < 3; ++corner) {
                const double w = table.barycentric[idx * 3 + corner];
                for (int c = 0; c < channels; ++c) {
                    grad_attr(triangles(f, corner), c) += w * grad_raw[c];
                }
            }
        }
    }
    return grad_attr;
}

} // namespace faceforge
