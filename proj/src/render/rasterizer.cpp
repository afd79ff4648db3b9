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
#include "faceforge/render/rasterizer.hpp"

#include <algorithm>
#include <cmath>

#include "faceforge/core/error.hpp"

namespace faceforge {

namespace {

inline double cross2(double ax, double ay, double bx, double by) {
    return ax * by - ay * bx;
}

struct BilinearFoot {
    int x0, x1, y0, y1;
    double fx, fy;
};

// Texture coordinate (u, v) with v up; texel centers at integer + 0.5.
inline BilinearFoot bilinear_foot(double u, double v, int d) {
    const double tx = u * d - 0.5;
    const double ty = (1.0 - v) * d - 0.5;
    BilinearFoot f;
    const double fx0 = std::floor(tx);
    const double fy0 = std::floor(ty);
    f.fx = tx - fx0;
    f.fy = ty - fy0;
    f.x0 = std::clamp(static_cast<int>(fx0), 0, d - 1);
    f.x1 = std::clamp(static_cast<int>(fx0) + 1, 0, d - 1);
    f.y0 = std::clamp(static_cast<int>(fy0), 0, d - 1);
    f.y1 = std::clamp(static_cast<int>(fy0) + 1, 0, d - 1);
    return f;
}

} // namespace

FragmentBuffer rasterize(const Points2d& projected, const VecX& vertex_depth,
                         const TriangleMatrix& triangles, int width, int height) {
    if (width < 1 || height < 1) {
        throw ValidationError("rasterize: image size must be >= 1");
    }
    FragmentBuffer frags;
    frags.width = width;
    frags.height = height;
    const std::size_t pixels = static_cast<std::size_t>(width) * height;
    frags.triangle.assign(pixels, -1);
    frags.depth.assign(pixels, -std::numeric_limits<double>::infinity());
    frags.barycentric.assign(pixels * 3, 0.0);

    for (Eigen::Index f = 0; f < triangles.rows(); ++f) {
        const int i0 = triangles(f, 0);
        const int i1 = triangles(f, 1);
        const int i2 = triangles(f, 2);
        const double ax = projected(i0, 0), ay = projected(i0, 1);
        const double bx = projected(i1, 0), by = projected(i1, 1);
        const double cx = projected(i2, 0), cy = projected(i2, 1);
        const double area = cross2(bx - ax, by - ay, cx - ax, cy - ay);
        if (std::abs(area) < 1e-14) {
            continue;
        }
        const double min_x = std::min({ax, bx, cx});
        const double max_x = std::max({ax, bx, cx});
        const double min_y = std::min({ay, by, cy});
        const double max_y = std::max({ay, by, cy});
        const int col_lo = std::max(0, static_cast<int>(std::ceil(min_x - 0.5)));
        const int col_hi = std::min(width - 1, static_cast<int>(std::floor(max_x - 0.5)));
        const int row_lo = std::max(0, static_cast<int>(std::ceil(min_y - 0.5)));
        const int row_hi = std::min(height - 1, static_cast<int>(std::floor(max_y - 0.5)));
        for (int row = row_lo; row <= row_hi; ++row) {
            const double py = row + 0.5;
            for (int col = col_lo; col <= col_hi; ++col) {
                const double px = col + 0.5;
                const double w0 = cross2(bx - px, by - py, cx - px, cy - py) / area;
                const double w1 = cross2(cx - px, cy - py, ax - px, ay - py) / area;
                const double w2 = 1.0 - w0 - w1;
                if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) {
                    continue;
                }
                const double z =
                    w0 * vertex_depth[i0] + w1 * vertex_depth[i1] + w2 * vertex_depth[i2];
                const std::size_t idx = static_cast<std::size_t>(row) * width + col;
                const int32_t current = frags.triangle[idx];
                if (current >= 0 &&
                    (z < frags.depth[idx] ||
                     (z == frags.depth[idx] && static_cast<int32_t>(f) > current))) {
                    continue;
                }
                if (current < 0) {
                    ++frags.coverage;
                }
                frags.triangle[idx] = static_cast<int32_t>(f);
                frags.depth[idx] = z;
                frags.barycentric[idx * 3 + 0] = w0;
                frags.barycentric[idx * 3 + 1] = w1;
                frags.barycentric[idx * 3 + 2] = w2;
            }
        }
    }
    return frags;
}

Image render_image(const FragmentBuffer& frags, const Points2d& projected,
                   const UvMatrix& uv_coords, const TriangleMatrix& triangles,
                   const Image& shaded_uv) {
    (void)projected;
    const int d = shaded_uv.height();
    const int channels = shaded_uv.channels();
    Image out(frags.height, frags.width, channels);
    for (int row = 0; row < frags.height; ++row) {
        for (int col = 0; col < frags.width; ++col) {
            const std::size_t idx = static_cast<std::size_t>(row) * frags.width + col;
            const int32_t f = frags.triangle[idx];
            if (f < 0) {
                continue;
            }
            double u = 0.0, v = 0.0;
            for (int corner = 0; corner < 3; ++corner) {
                const double w = frags.barycentric[idx * 3 + corner];
                u += w * uv_coords(triangles(f, corner), 0);
                v += w * uv_coords(triangles(f, corner), 1);
            }
            const BilinearFoot foot = bilinear_foot(u, v, d);
            for (int c = 0; c < channels; ++c) {
                const double v00 = shaded_uv.at(foot.y0, foot.x0, c);
                const double v01 = shaded_uv.at(foot.y0, foot.x1, c);
                const double v10 = shaded_uv.at(foot.y1, foot.x0, c);
                const double v11 = shaded_uv.at(foot.y1, foot.x1, c);
                out.at(row, col, c) = (1.0 - foot.fy) * ((1.0 - foot.fx) * v00 + foot.fx * v01) +
                                      foot.fy * ((1.0 - foot.fx) * v10 + foot.fx * v11);
            }
        }
    }
    return out;
}

RenderImageGrads render_image_backward(const FragmentBuffer& frags, const Points2d& projected,
                                       const UvMatrix& uv_coords, const TriangleMatrix& triangles,
                                       const Image& shaded_uv, const Image& grad_image) {
    const int d = shaded_uv.height();
    const int channels = shaded_uv.channels();
    RenderImageGrads grads;
    grads.shaded_uv = Image(d, d, channels);
    grads.projected = Points2d::Zero(projected.rows(), 2);

    for (int row = 0; row < frags.height; ++row) {
        for (int col = 0; col < frags.width; ++col) {
            const std::size_t idx = static_cast<std::size_t>(row) * frags.width + col;
            const int32_t f = frags.triangle[idx];
            if (f < 0) {
                continue;
            }
            const int i0 = triangles(f, 0);
            const int i1 = triangles(f, 1);
            const int i2 = triangles(f, 2);
            const double w0 = frags.barycentric[idx * 3 + 0];
            const double w1 = frags.barycentric[idx * 3 + 1];
            const double w2 = frags.barycentric[idx * 3 + 2];
            const double u = w0 * uv_coords(i0, 0) + w1 * uv_coords(i1, 0) + w2 * uv_coords(i2, 0);
            const double v = w0 * uv_coords(i0, 1) + w1 * uv_coords(i1, 1) + w2 * uv_coords(i2, 1);
            const BilinearFoot foot = bilinear_foot(u, v, d);

            double grad_tx = 0.0;
            double grad_ty = 0.0;
            for (int c = 0; c < channels; ++c) {
                const double g = grad_image.at(row, col, c);
                if (g == 0.0) {
                    continue;
                }
                const double v00 = shaded_uv.at(foot.y0, foot.x0, c);
                const double v01 = shaded_uv.at(foot.y0, foot.x1, c);
                const double v10 = shaded_uv.at(foot.y1, foot.x0, c);
                const double v11 = shaded_uv.at(foot.y1, foot.x1, c);
                grads.shaded_uv.at(foot.y0, foot.x0, c) += g * (1.0 - foot.fy) * (1.0 - foot.fx);
                grads.shaded_uv.at(foot.y0, foot.x1, c) += g * (1.0 - foot.fy) * foot.fx;
                grads.shaded_uv.at(foot.y1, foot.x0, c) += g * foot.fy * (1.0 - foot.fx);
                grads.shaded_uv.at(foot.y1, foot.x1, c) += g * foot.fy * foot.fx;
                grad_tx += g * ((1.0 - foot.fy) * (v01 - v00) + foot.fy * (v11 - v10));
                grad_ty += g * ((1.0 - foot.fx) * (v10 - v00) + foot.fx * (v11 - v01));
            }
            // u = tx mapping: tx = u d - 0.5; ty = (1 - v) d - 0.5.
            const double grad_u = grad_tx * d;
            const double grad_v = -grad_ty * d;
            const Vec3 grad_bary(grad_u * uv_coords(i0, 0) + grad_v * uv_coords(i0, 1),
                                 grad_u * uv_coords(i1, 0) + grad_v * uv_coords(i1, 1),
                                 grad_u * uv_coords(i2, 0) + grad_v * uv_coords(i2, 1));

            // Barycentric derivative w.r.t. the three projected vertices.
            const double px = col + 0.5;
            const double py = row + 0.5;
            const double ax = projected(i0, 0), ay = projected(i0, 1);
            const double bx = projected(i1, 0), by = projected(i1, 1);
            const double cx = projected(i2, 0), cy = projected(i2, 1);
            const double area = cross2(bx - ax, by - ay, cx - ax, cy - ay);
            const double inv_area = 1.0 / area;

            // d(raw)/d(vertex) from cross2(p - q, r - q) partials.
            // raw0 = cross(b - p, c - p), raw1 = cross(c - p, a - p),
            // raw2 = cross(a - p, b - p) with p the pixel center.
            const Vec2 draw0_db(cy - py, -(cx - px));
            const Vec2 draw0_dc(-(by - py), bx - px);
            const Vec2 draw1_dc(ay - py, -(ax - px));
            const Vec2 draw1_da(-(cy - py), cx - px);
            const Vec2 draw2_da(by - py, -(bx - px));
            const Vec2 draw2_db(-(ay - py), ax - px);
            // Area derivatives (independent of the pixel).
            const Vec2 darea_db(cy - ay, -(cx - ax));
            const Vec2 darea_dc(-(by - ay), bx - ax);
            const Vec2 darea_da = -darea_db - darea_dc;

            // d(b_i)/dvertex = (d(raw_i)/dvertex - b_i d(area)/dvertex) / area
            const auto d_bary = [&](const Vec2& draw, double b, const Vec2& darea) {
                return Vec2(inv_area * (draw - b * darea));
            };
            const Vec2 ga = grad_bary[0] * d_bary(Vec2::Zero(), w0, darea_da) +
                            grad_bary[1] * d_bary(draw1_da, w1, darea_da) +
                            grad_bary[2] * d_bary(draw2_da, w2, darea_da);
            const Vec2 gb = grad_bary[0] * d_bary(draw0_db, w0, darea_db) +
                            grad_bary[1] * d_bary(Vec2::Zero(), w1, darea_db) +
                            grad_bary[2] * d_bary(draw2_db, w2, darea_db);
            const Vec2 gc = grad_bary[0] * d_bary(draw0_dc, w0, darea_dc) +
                            grad_bary[1] * d_bary(draw1_dc, w1, darea_dc) +
                            grad_bary[2] * d_bary(Vec2::Zero(), w2, darea_dc);
            grads.projected(i0, 0) += ga.x();
            grads.projected(i0, 1) += ga.y();
            grads.projected(i1, 0) += gb.x();
            grads.projected(i1, 1) += gb.y();
            grads.projected(i2, 0) += gc.x();
            grads.projected(i2, 1) += gc.y();
        }
    }
    return grads;
}

} // namespace faceforge
