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
#include <string>
#include <vector>

#include "faceforge/core/types.hpp"
#include "faceforge/render/image.hpp"

namespace faceforge {

/// Simple (channels, height, width) feature map.
struct Tensor3 {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> data;

    Tensor3() = default;
    Tensor3(int c, int h, int w) : channels(c), height(h), width(w),
        data(static_cast<std::size_t>(c) * h * w, 0.0) {}
    double& at(int c, int y, int x) {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    double at(int c, int y, int x) const {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
};

struct DecoderSpec {
    enum class Kind { linear, conv };
    Kind kind = Kind::conv;
    int latent_dim = 128;
    int psi_dim = 50;
    int uv_size = 256;
    int base_size = 16;                     // conv: coarse grid before upsampling
    std::vector<int> channels = {32, 16, 8}; // conv: channel schedule, repeated if short
    double output_scale = 0.01;
    double leaky_slope = 0.2;

    int input_dim() const { return latent_dim + psi_dim + 3; }
};

struct DecoderCache {
    VecX input;
    VecX fc_out;
    std::vector<Tensor3> upsampled;   // per stage, input to the conv
    std::vector<Tensor3> pre_act;     // per stage, conv output before leaky
    Tensor3 final_in;                 // feature map entering the final conv
    Image raw;                        // pre-tanh map
};

/**
 * Expression-conditioned displacement decoder: input [delta, psi, jaw pose]
 * maps to a d x d displacement map squashed to [-output_scale, output_scale]
 * by scale * tanh(raw).
 *
 * conv kind: fully connected layer to a (channels[0], base, base) grid, then
 * nearest-neighbor x2 upsampling with a 3x3 convolution and leaky rectifier
 * per stage up to uv_size, and a final 3x3 convolution down to one channel.
 * linear kind: a single fully connected map to d^2 (oracle tests).
 */
class DetailDecoder {
public:
    DetailDecoder() = default;
    explicit DetailDecoder(const DecoderSpec& spec); // zero-initialized

    static DetailDecoder seeded(const DecoderSpec& spec, uint64_t seed);

    const DecoderSpec& spec() const { return spec_; }

    Image decode(const VecX& delta, const VecX& psi, const Vec3& jaw_pose,
                 DecoderCache* cache = nullptr) const;

    /// Pullback of a displacement gradient onto the full input vector
    /// [delta, psi, jaw]; optionally accumulates flattened weight grads.
    VecX decode_backward(const DecoderCache& cache, const Image& grad_displacement,
                         VecX* weight_grads = nullptr) const;

    Eigen::Index parameter_count() const;
    VecX parameters() const;
    void set_parameters(const VecX& flat);

    void save(const std::string& path) const;
    static DetailDecoder load(const std::string& path);

private:
    int stage_count() const;
    int stage_channels(int i) const;

    DecoderSpec spec_;
    MatX fc_weight; // (out x input_dim)
    VecX fc_bias;
    struct ConvLayer {
        int in = 0, out = 0;
        std::vector<double> weight; // out*in*3*3
        VecX bias;
    };
    std::vector<ConvLayer> convs; // stages, then the final 3x3 down to 1 channel
};

} // namespace faceforge
