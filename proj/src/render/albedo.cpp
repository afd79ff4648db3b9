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
#include "faceforge/render/albedo.hpp"

#include <cmath>

#include "faceforge/core/error.hpp"
#include "faceforge/core/rng.hpp"

namespace faceforge {

void AlbedoModel::validate() const {
    if (mean.channels() != 3 || mean.height() != mean.width() || mean.height() == 0) {
        throw ValidationError("albedo mean must be a square 3-channel map");
    }
    for (const Image& b : basis) {
        if (!b.same_shape(mean)) {
            throw ValidationError("albedo basis map shape differs from the mean");
        }
    }
}

Image albedo_map(const AlbedoModel& model, const VecX& alpha) {
    if (alpha.size() != model.dim()) {
        throw DimensionError("albedo_map: alpha has dimension " + std::to_string(alpha.size()) +
                             ", model expects " + std::to_string(model.dim()));
    }
    Image out = model.mean;
    out.set_tag(ChannelTag::albedo);
    for (int b = 0; b < model.dim(); ++b) {
        const double a = alpha[b];
        if (a == 0.0) {
            continue;
        }
        const std::vector<double>& src = model.basis[static_cast<std::size_t>(b)].data();
        std::vector<double>& dst = out.data();
        for (std::size_t i = 0; i < dst.size(); ++i) {
            dst[i] += a * src[i];
        }
    }
    return out;
}

VecX albedo_map_backward(const AlbedoModel& model, const Image& grad_map) {
    VecX grad = VecX::Zero(model.dim());
    for (int b = 0; b < model.dim(); ++b) {
        const std::vector<double>& basis = model.basis[static_cast<std::size_t>(b)].data();
        const std::vector<double>& g = grad_map.data();
        double acc = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            acc += g[i] * basis[i];
        }
        grad[b] = acc;
    }
    return grad;
}

AlbedoModel synthesize_toy_albedo(uint64_t seed, int texture_size, int dim) {
    Rng rng(seed ^ 0xa5a5a5a55a5a5a5aull);
    AlbedoModel model;
    const int d = texture_size;
    model.mean = Image(d, d, 3, 0.0, ChannelTag::albedo);
    const double base[3] = {0.78, 0.60, 0.50};
    for (int y = 0; y < d; ++y) {
        for (int x = 0; x < d; ++x) {
            const double u = (x + 0.5) / d;
            const double v = (y + 0.5) / d;
            const double shade = 0.06 * std::cos(2.0 * M_PI * u) * std::sin(M_PI * v);
            for (int c = 0; c < 3; ++c) {
                model.mean.at(y, x, c) = base[c] + shade * (c == 0 ? 1.0 : 0.6);
            }
        }
    }
    for (int b = 0; b < dim; ++b) {
        Image map(d, d, 3);
        // Low-frequency separable cosine fields per channel.
        double fu[3], fv[3], pu[3], pv[3], amp[3];
        for (int c = 0; c < 3; ++c) {
            fu[c] = rng.uniform_int(1, 3);
            fv[c] = rng.uniform_int(1, 3);
            pu[c] = rng.uniform(0.0, 2.0 * M_PI);
            pv[c] = rng.uniform(0.0, 2.0 * M_PI);
            amp[c] = rng.uniform(0.02, 0.08);
        }
        for (int y = 0; y < d; ++y) {
            for (int x = 0; x < d; ++x) {
                const double u = (x + 0.5) / d;
                const double v = (y + 0.5) / d;
                for (int c = 0; c < 3; ++c) {
                    map.at(y, x, c) = amp[c] * std::cos(2.0 * M_PI * fu[c] * u + pu[c]) *
                                      std::cos(2.0 * M_PI * fv[c] * v + pv[c]);
                }
            }
        }
        model.basis.push_back(std::move(map));
    }
    model.validate();
    return model;
}

} // namespace faceforge
