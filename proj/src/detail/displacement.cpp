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
#include "faceforge/detail/displacement.hpp"

#include <algorithm>
#include <cmath>

#include "faceforge/core/error.hpp"
#include "faceforge/core/rotation.hpp"

namespace faceforge {

namespace {

// Stencil of a one-dimensional derivative at index i restricted to the mask:
// central where both neighbors exist, one-sided otherwise.
struct DiffStencil {
    int lo = 0, hi = 0; // sample indices
    double scale = 0.0; // (f[hi] - f[lo]) * scale
    bool valid = false;
};

DiffStencil stencil(int i, int limit, const auto& in_mask) {
    const bool has_lo = i > 0 && in_mask(i - 1);
    const bool has_hi = i + 1 < limit && in_mask(i + 1);
    DiffStencil s;
    if (has_lo && has_hi) {
        s = {i - 1, i + 1, 0.5, true};
    } else if (has_hi) {
        s = {i, i + 1, 1.0, true};
    } else if (has_lo) {
        s = {i - 1, i, 1.0, true};
    }
    return s;
}

} // namespace

Image apply_displacement(const Image& position_uv, const Image& normal_uv,
                         const Image& displacement, const std::vector<uint8_t>& mask) {
    const int d = position_uv.height();
    normal_uv.require_shape(d, d, 3, "apply_displacement normals");
    displacement.require_shape(d, d, 1, "apply_displacement displacement");
    Image out = position_uv;
    out.set_tag(ChannelTag::position);
    for (int y = 0; y < d; ++y) {
        for (int x = 0; x < d; ++x) {
            if (!mask[static_cast<std::size_t>(y) * d + x]) {
                continue;
            }
            const double dd = displacement.at(y, x, 0);
            for (int c = 0; c < 3; ++c) {
                out.at(y, x, c) += dd * normal_uv.at(y, x, c);
            }
        }
    }
    return out;
}

Image apply_displacement_backward(const Image& normal_uv, const std::vector<uint8_t>& mask,
                                  const Image& grad_mprime) {
    const int d = normal_uv.height();
    Image grad_displacement(d, d, 1);
    for (int y = 0; y < d; ++y) {
        for (int x = 0; x < d; ++x) {
            if (!mask[static_cast<std::size_t>(y) * d + x]) {
                continue;
            }
            double g = 0.0;
            for (int c = 0; c < 3; ++c) {
                g += grad_mprime.at(y, x, c) * normal_uv.at(y, x, c);
            }
            grad_displacement.at(y, x, 0) = g;
        }
    }
    return grad_displacement;
}

FdNormals fd_normals(const Image& position_uv, const std::vector<uint8_t>& mask,
                     const Image& fallback_normals) {
    const int d = position_uv.height();
    position_uv.require_shape(d, d, 3, "fd_normals positions");
    FdNormals result;
    result.normals = Image(d, d, 3, 0.0, ChannelTag::normal);
    const double du = 1.0 / d;

    for (int y = 0; y < d; ++y) {
        for (int x = 0; x < d; ++x) {
            const auto texel_in = [&](int yy, int xx) {
                return mask[static_cast<std::size_t>(yy) * d + xx] != 0;
            };
            const auto set_fallback = [&] {
                for (int c = 0; c < 3; ++c) {
                    result.normals.at(y, x, c) = fallback_normals.at(y, x, c);
                }
            };
            if (!texel_in(y, x)) {
                set_fallback();
                continue;
            }
            const DiffStencil su = stencil(x, d, [&](int xx) { return texel_in(y, xx); });
            const DiffStencil sv = stencil(y, d, [&](int yy) { return texel_in(yy, x); });
            if (!su.valid || !sv.valid) {
                set_fallback();
                ++result.degenerate_count;
                continue;
            }
            Vec3 tu, trow;
            for (int c = 0; c < 3; ++c) {
                tu[c] = (position_uv.at(y, su.hi, c) - position_uv.at(y, su.lo, c)) *
                        (su.scale / du);
                trow[c] = (position_uv.at(sv.hi, x, c) - position_uv.at(sv.lo, x, c)) *
                          (sv.scale / du);
            }
            // v runs opposite to the row index.
            const Vec3 tv = -trow;
            const Vec3 cross = tu.cross(tv);
            const double len = cross.norm();
            if (len < 1e-20) {
                set_fallback();
                ++result.degenerate_count;
                continue;
            }
            for (int c = 0; c < 3; ++c) {
                result.normals.at(y, x, c) = cross[c] / len;
            }
        }
    }
    return result;
}

Image fd_normals_backward(const Image& position_uv, const std::vector<uint8_t>& mask,
                          const Image& grad_normals) {
    const int d = position_uv.height();
    Image grad_positions(d, d, 3);
    const double du = 1.0 / d;

    for (int y = 0; y < d; ++y) {
        for (int x = 0; x < d; ++x) {
            const auto texel_in = [&](int yy, int xx) {
                return mask[static_cast<std::size_t>(yy) * d + xx] != 0;
            };
            if (!texel_in(y, x)) {
                continue;
            }
            const DiffStencil su = stencil(x, d, [&](int xx) { return texel_in(y, xx); });
            const DiffStencil sv = stencil(y, d, [&](int yy) { return texel_in(yy, x); });
            if (!su.valid || !sv.valid) {
                continue;
            }
            Vec3 tu, trow;
            for (int c = 0; c < 3; ++c) {
                tu[c] = (position_uv.at(y, su.hi, c) - position_uv.at(y, su.lo, c)) *
                        (su.scale / du);
                trow[c] = (position_uv.at(sv.hi, x, c) - position_uv.at(sv.lo, x, c)) *
                          (sv.scale / du);
            }
            const Vec3 tv = -trow;
            const Vec3 cross = tu.cross(tv);
            const double len = cross.norm();
            if (len < 1e-20) {
                continue;
            }
            const Vec3 n = cross / len;
            const Vec3 g(grad_normals.at(y, x, 0), grad_normals.at(y, x, 1),
                         grad_normals.at(y, x, 2));
            const Vec3 grad_cross = (g - n * n.dot(g)) / len;
            // cross = tu x tv
            const Vec3 grad_tu = tv.cross(grad_cross);
            const Vec3 grad_tv = grad_cross.cross(tu);
            const Vec3 grad_trow = -grad_tv;
            for (int c = 0; c < 3; ++c) {
                grad_positions.at(y, su.hi, c) += grad_tu[c] * (su.scale / du);
                grad_positions.at(y, su.lo, c) -= grad_tu[c] * (su.scale / du);
                grad_positions.at(sv.hi, x, c) += grad_trow[c] * (sv.scale / du);
                grad_positions.at(sv.lo, x, c) -= grad_trow[c] * (sv.scale / du);
            }
        }
    }
    return grad_positions;
}

Image transfer_normals(const Image& coarse_fd, const Image& detail_fd,
                       const Image& smooth_normals, const std::vector<uint8_t>& mask) {
    const int d = coarse_fd.height();
    Image out(d, d, 3, 0.0, ChannelTag::normal);
    for (int y = 0; y < d; ++y) {
        for (int x = 0; x < d; ++x) {
            const Vec3 smooth(smooth_normals.at(y, x, 0), smooth_normals.at(y, x, 1),
                              smooth_normals.at(y, x, 2));
            Vec3 n = smooth;
            if (mask[static_cast<std::size_t>(y) * d + x]) {
                const Vec3 from(coarse_fd.at(y, x, 0), coarse_fd.at(y, x, 1),
                                coarse_fd.at(y, x, 2));
                const Vec3 to(detail_fd.at(y, x, 0), detail_fd.at(y, x, 1),
                              detail_fd.at(y, x, 2));
                if (1.0 + from.dot(to) > 1e-8) {
                    n = rotate_towards(from, to, smooth);
                }
            }
            for (int c = 0; c < 3; ++c) {
                out.at(y, x, c) = n[c];
            }
        }
    }
    return out;
}

Image transfer_normals_backward(const Image& coarse_fd, const Image& detail_fd,
                                const Image& smooth_normals,
                                const std::vector<uint8_t>& mask, const Image& grad_out) {
    const int d = coarse_fd.height();
    Image grad_detail(d, d, 3);
    for (int y = 0; y < d; ++y) {
        for (int x = 0; x < d; ++x) {
            if (!mask[static_cast<std::size_t>(y) * d + x]) {
                continue;
            }
            const Vec3 from(coarse_fd.at(y, x, 0), coarse_fd.at(y, x, 1),
                            coarse_fd.at(y, x, 2));
            const Vec3 to(detail_fd.at(y, x, 0), detail_fd.at(y, x, 1), detail_fd.at(y, x, 2));
            if (1.0 + from.dot(to) <= 1e-8) {
                continue;
            }
            const Vec3 smooth(smooth_normals.at(y, x, 0), smooth_normals.at(y, x, 1),
                              smooth_normals.at(y, x, 2));
            const Vec3 g(grad_out.at(y, x, 0), grad_out.at(y, x, 1), grad_out.at(y, x, 2));
            const Vec3 grad_to = rotate_towards_backward_to(from, to, smooth, g);
            for (int c = 0; c < 3; ++c) {
                grad_detail.at(y, x, c) = grad_to[c];
            }
        }
    }
    return grad_detail;
}

Mesh displaced_mesh(const Mesh& mesh, const Image& displacement) {
    if (!mesh.has_uv() || !mesh.has_normals()) {
        throw ValidationError("displaced_mesh needs per-vertex UVs and normals");
    }
    const int d = displacement.height();
    Mesh out = mesh;
    for (int i = 0; i < mesh.vertex_count(); ++i) {
        const double tx = mesh.uv(i, 0) * d - 0.5;
        const double ty = (1.0 - mesh.uv(i, 1)) * d - 0.5;
        const int x0 = std::clamp(static_cast<int>(std::floor(tx)), 0, d - 1);
        const int y0 = std::clamp(static_cast<int>(std::floor(ty)), 0, d - 1);
        const int x1 = std::min(x0 + 1, d - 1);
        const int y1 = std::min(y0 + 1, d - 1);
        const double fx = std::clamp(tx - std::floor(tx), 0.0, 1.0);
        const double fy = std::clamp(ty - std::floor(ty), 0.0, 1.0);
        const double value =
            (1.0 - fy) * ((1.0 - fx) * displacement.at(y0, x0, 0) +
                          fx * displacement.at(y0, x1, 0)) +
            fy * ((1.0 - fx) * displacement.at(y1, x0, 0) + fx * displacement.at(y1, x1, 0));
        out.vertices.row(i) += value * mesh.normals.row(i);
    }
    return out;
}

} // namespace faceforge
