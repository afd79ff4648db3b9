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
#include "faceforge/detail/decoder.hpp"

#include <json.hpp>

#include <cmath>
#include <cstring>

#include "faceforge/core/error.hpp"
#include "faceforge/core/rng.hpp"
#include "faceforge/io/container.hpp"

namespace faceforge {

namespace {

constexpr const char* kDecoderMagic = "FFDECOD1";

int int_log2(int value) {
    int log = 0;
    while ((1 << log) < value) {
        ++log;
    }
    return (1 << log) == value ? log : -1;
}

Tensor3 conv3x3(const Tensor3& in, const std::vector<double>& weight, const VecX& bias,
                int out_channels) {
    Tensor3 out(out_channels, in.height, in.width);
    for (int co = 0; co < out_channels; ++co) {
        for (int y = 0; y < in.height; ++y) {
            for (int x = 0; x < in.width; ++x) {
                double sum = bias[co];
                for (int ci = 0; ci < in.channels; ++ci) {
                    const std::size_t wbase =
                        (static_cast<std::size_t>(co) * in.channels + ci) * 9;
                    for (int dy = -1; dy <= 1; ++dy) {
                        const int iy = y + dy;
                        if (iy < 0 || iy >= in.height) {
                            continue;
                        }
                        for (int dx = -1; dx <= 1; ++dx) {
                            const int ix = x + dx;
                            if (ix < 0 || ix >= in.width) {
                                continue;
                            }
                            sum += weight[wbase + (dy + 1) * 3 + (dx + 1)] * in.at(ci, iy, ix);
                        }
                    }
                }
                out.at(co, y, x) = sum;
            }
        }
    }
    return out;
}

void conv3x3_backward(const Tensor3& in, const std::vector<double>& weight, int out_channels,
                      const Tensor3& grad_out, Tensor3* grad_in, double* grad_weight,
                      double* grad_bias) {
    if (grad_in != nullptr) {
        *grad_in = Tensor3(in.channels, in.height, in.width);
    }
    for (int co = 0; co < out_channels; ++co) {
        for (int y = 0; y < in.height; ++y) {
            for (int x = 0; x < in.width; ++x) {
                const double g = grad_out.at(co, y, x);
                if (g == 0.0) {
                    continue;
                }
                if (grad_bias != nullptr) {
                    grad_bias[co] += g;
                }
                for (int ci = 0; ci < in.channels; ++ci) {
                    const std::size_t wbase =
                        (static_cast<std::size_t>(co) * in.channels + ci) * 9;
                    for (int dy = -1; dy <= 1; ++dy) {
                        const int iy = y + dy;
                        if (iy < 0 || iy >= in.height) {
                            continue;
                        }
                        for (int dx = -1; dx <= 1; ++dx) {
                            const int ix = x + dx;
                            if (ix < 0 || ix >= in.width) {
                                continue;
                            }
                            const std::size_t widx = wbase + (dy + 1) * 3 + (dx + 1);
                            if (grad_weight != nullptr) {
                                grad_weight[widx] += g * in.at(ci, iy, ix);
                            }
                            if (grad_in != nullptr) {
                                grad_in->at(ci, iy, ix) += g * weight[widx];
                            }
                        }
                    }
                }
            }
        }
    }
}

Tensor3 upsample2(const Tensor3& in) {
    Tensor3 out(in.channels, in.height * 2, in.width * 2);
    for (int c = 0; c < in.channels; ++c) {
        for (int y = 0; y < out.height; ++y) {
            for (int x = 0; x < out.width; ++x) {
                out.at(c, y, x) = in.at(c, y / 2, x / 2);
            }
        }
    }
    return out;
}

Tensor3 upsample2_backward(const Tensor3& grad_out) {
    Tensor3 grad_in(grad_out.channels, grad_out.height / 2, grad_out.width / 2);
    for (int c = 0; c < grad_out.channels; ++c) {
        for (int y = 0; y < grad_out.height; ++y) {
            for (int x = 0; x < grad_out.width; ++x) {
                grad_in.at(c, y / 2, x / 2) += grad_out.at(c, y, x);
            }
        }
    }
    return grad_in;
}

} // namespace

DetailDecoder::DetailDecoder(const DecoderSpec& spec) : spec_(spec) {
    if (spec.kind == DecoderSpec::Kind::linear) {
        fc_weight = MatX::Zero(static_cast<Eigen::Index>(spec.uv_size) * spec.uv_size,
                               spec.input_dim());
        fc_bias = VecX::Zero(fc_weight.rows());
        return;
    }
    const int stages = int_log2(spec.uv_size / spec.base_size);
    if (stages < 0 || spec.uv_size % spec.base_size != 0) {
        throw ValidationError("decoder uv_size must be base_size * 2^k");
    }
    fc_weight = MatX::Zero(
        static_cast<Eigen::Index>(stage_channels(0)) * spec.base_size * spec.base_size,
        spec.input_dim());
    fc_bias = VecX::Zero(fc_weight.rows());
    convs.resize(static_cast<std::size_t>(stages) + 1);
    for (int i = 0; i < stages; ++i) {
        ConvLayer& layer = convs[static_cast<std::size_t>(i)];
        layer.in = stage_channels(i);
        layer.out = stage_channels(i + 1);
        layer.weight.assign(static_cast<std::size_t>(layer.out) * layer.in * 9, 0.0);
        layer.bias = VecX::Zero(layer.out);
    }
    ConvLayer& last = convs.back();
    last.in = stage_channels(stages);
    last.out = 1;
    last.weight.assign(static_cast<std::size_t>(last.in) * 9, 0.0);
    last.bias = VecX::Zero(1);
}

int DetailDecoder::stage_count() const {
    return spec_.kind == DecoderSpec::Kind::linear
               ? 0
               : static_cast<int>(convs.size()) - 1;
}

int DetailDecoder::stage_channels(int i) const {
    if (spec_.channels.empty()) {
        return 8;
    }
    const std::size_t idx = std::min(static_cast<std::size_t>(i), spec_.channels.size() - 1);
    return spec_.channels[idx];
}

DetailDecoder DetailDecoder::seeded(const DecoderSpec& spec, uint64_t seed) {
    DetailDecoder dec(spec);
    Rng rng(seed ^ 0xdeadbeefcafef00dull);
    const double fc_std = 1.0 / std::sqrt(static_cast<double>(spec.input_dim()));
    for (Eigen::Index r = 0; r < dec.fc_weight.rows(); ++r) {
        for (Eigen::Index c = 0; c < dec.fc_weight.cols(); ++c) {
            dec.fc_weight(r, c) = rng.gauss(0.0, fc_std);
        }
    }
    for (std::size_t l = 0; l < dec.convs.size(); ++l) {
        auto& layer = dec.convs[l];
        double std = std::sqrt(2.0 / (9.0 * layer.in));
        if (l + 1 == dec.convs.size()) {
            std *= 0.1; // keep the initial displacement small
        }
        for (double& w : layer.weight) {
            w = rng.gauss(0.0, std);
        }
    }
    return dec;
}

Image DetailDecoder::decode(const VecX& delta, const VecX& psi, const Vec3& jaw_pose,
                            DecoderCache* cache) const {
    if (delta.size() != spec_.latent_dim || psi.size() != spec_.psi_dim) {
        throw DimensionError("decoder input dimensions do not match the spec");
    }
    VecX input(spec_.input_dim());
    input << delta, psi, jaw_pose;
    const VecX fc_out = fc_weight * input + fc_bias;

    DecoderCache local;
    DecoderCache& cc = cache != nullptr ? *cache : local;
    cc.input = input;
    cc.fc_out = fc_out;
    cc.upsampled.clear();
    cc.pre_act.clear();

    const int d = spec_.uv_size;
    Image raw(d, d, 1);
    if (spec_.kind == DecoderSpec::Kind::linear) {
        for (int y = 0; y < d; ++y) {
            for (int x = 0; x < d; ++x) {
                raw.at(y, x, 0) = fc_out[static_cast<Eigen::Index>(y) * d + x];
            }
        }
    } else {
        Tensor3 feat(stage_channels(0), spec_.base_size, spec_.base_size);
        std::copy(fc_out.data(), fc_out.data() + fc_out.size(), feat.data.begin());
        const int stages = stage_count();
        for (int i = 0; i < stages; ++i) {
            Tensor3 up = upsample2(feat);
            Tensor3 pre = conv3x3(up, convs[static_cast<std::size_t>(i)].weight,
                                  convs[static_cast<std::size_t>(i)].bias,
                                  convs[static_cast<std::size_t>(i)].out);
            cc.upsampled.push_back(std::move(up));
            feat = pre; // leaky applied below, keep pre-activation
            cc.pre_act.push_back(std::move(pre));
            Tensor3& act = feat;
            for (double& v : act.data) {
                v = v > 0.0 ? v : spec_.leaky_slope * v;
            }
        }
        cc.final_in = feat;
        const Tensor3 out = conv3x3(feat, convs.back().weight, convs.back().bias, 1);
        for (int y = 0; y < d; ++y) {
            for (int x = 0; x < d; ++x) {
                raw.at(y, x, 0) = out.at(0, y, x);
            }
        }
    }
    cc.raw = raw;

    Image displacement(d, d, 1, 0.0, ChannelTag::displacement);
    for (int y = 0; y < d; ++y) {
        for (int x = 0; x < d; ++x) {
            displacement.at(y, x, 0) = spec_.output_scale * std::tanh(raw.at(y, x, 0));
        }
    }
    return displacement;
}

VecX DetailDecoder::decode_backward(const DecoderCache& cache, const Image& grad_displacement,
                                    VecX* weight_grads) const {
    const int d = spec_.uv_size;
    if (weight_grads != nullptr && weight_grads->size() != parameter_count()) {
        weight_grads->setZero(parameter_count());
    }

    // D = scale * tanh(raw)
    Image grad_raw(d, d, 1);
    for (int y = 0; y < d; ++y) {
        for (int x = 0; x < d; ++x) {
            const double t = std::tanh(cache.raw.at(y, x, 0));
            grad_raw.at(y, x, 0) =
                grad_displacement.at(y, x, 0) * spec_.output_scale * (1.0 - t * t);
        }
    }

    // Flat offsets for weight gradients.
    Eigen::Index fc_w_off = 0;
    Eigen::Index fc_b_off = fc_weight.size();
    std::vector<Eigen::Index> conv_w_off(convs.size()), conv_b_off(convs.size());
    Eigen::Index at = fc_b_off + fc_bias.size();
    for (std::size_t l = 0; l < convs.size(); ++l) {
        conv_w_off[l] = at;
        at += static_cast<Eigen::Index>(convs[l].weight.size());
        conv_b_off[l] = at;
        at += convs[l].bias.size();
    }

    VecX grad_fc_out;
    if (spec_.kind == DecoderSpec::Kind::linear) {
        grad_fc_out.resize(static_cast<Eigen::Index>(d) * d);
        for (int y = 0; y < d; ++y) {
            for (int x = 0; x < d; ++x) {
                grad_fc_out[static_cast<Eigen::Index>(y) * d + x] = grad_raw.at(y, x, 0);
            }
        }
    } else {
        Tensor3 grad_feat(1, d, d);
        for (int y = 0; y < d; ++y) {
            for (int x = 0; x < d; ++x) {
                grad_feat.at(0, y, x) = grad_raw.at(y, x, 0);
            }
        }
        const int stages = stage_count();
        // Final conv.
        {
            const std::size_t l = convs.size() - 1;
            Tensor3 grad_in;
            conv3x3_backward(cache.final_in, convs[l].weight, 1, grad_feat, &grad_in,
                             weight_grads != nullptr ? weight_grads->data() + conv_w_off[l]
                                                     : nullptr,
                             weight_grads != nullptr ? weight_grads->data() + conv_b_off[l]
                                                     : nullptr);
            grad_feat = std::move(grad_in);
        }
        for (int i = stages - 1; i >= 0; --i) {
            const std::size_t l = static_cast<std::size_t>(i);
            // leaky backward using the cached pre-activation
            const Tensor3& pre = cache.pre_act[l];
            for (std::size_t idx = 0; idx < grad_feat.data.size(); ++idx) {
                if (pre.data[idx] <= 0.0) {
                    grad_feat.data[idx] *= spec_.leaky_slope;
                }
            }
            Tensor3 grad_up;
            conv3x3_backward(cache.upsampled[l], convs[l].weight, convs[l].out, grad_feat,
                             &grad_up,
                             weight_grads != nullptr ? weight_grads->data() + conv_w_off[l]
                                                     : nullptr,
                             weight_grads != nullptr ? weight_grads->data() + conv_b_off[l]
                                                     : nullptr);
            grad_feat = upsample2_backward(grad_up);
        }
        grad_fc_out.resize(fc_bias.size());
        std::copy(grad_feat.data.begin(), grad_feat.data.end(), grad_fc_out.data());
    }

    if (weight_grads != nullptr) {
        // fc_weight stored row-major in the flat vector.
        for (Eigen::Index r = 0; r < fc_weight.rows(); ++r) {
            for (Eigen::Index c = 0; c < fc_weight.cols(); ++c) {
                (*weight_grads)[fc_w_off + r * fc_weight.cols() + c] +=
                    grad_fc_out[r] * cache.input[c];
            }
        }
        weight_grads->segment(fc_b_off, fc_bias.size()) += grad_fc_out;
    }
    return fc_weight.transpose() * grad_fc_out;
}

Eigen::Index DetailDecoder::parameter_count() const {
    Eigen::Index count = fc_weight.size() + fc_bias.size();
    for (const ConvLayer& layer : convs) {
        count += static_cast<Eigen::Index>(layer.weight.size()) + layer.bias.size();
    }
    return count;
}

VecX DetailDecoder::parameters() const {
    VecX flat(parameter_count());
    Eigen::Index at = 0;
    for (Eigen::Index r = 0; r < fc_weight.rows(); ++r) {
        for (Eigen::Index c = 0; c < fc_weight.cols(); ++c) {
            flat[at++] = fc_weight(r, c);
        }
    }
    flat.segment(at, fc_bias.size()) = fc_bias;
    at += fc_bias.size();
    for (const ConvLayer& layer : convs) {
        for (const double w : layer.weight) {
            flat[at++] = w;
        }
        flat.segment(at, layer.bias.size()) = layer.bias;
        at += layer.bias.size();
    }
    return flat;
}

void DetailDecoder::set_parameters(const VecX& flat) {
    if (flat.size() != parameter_count()) {
        throw DimensionError("decoder parameter vector has the wrong length");
    }
    Eigen::Index at = 0;
    for (Eigen::Index r = 0; r < fc_weight.rows(); ++r) {
        for (Eigen::Index c = 0; c < fc_weight.cols(); ++c) {
            fc_weight(r, c) = flat[at++];
        }
    }
    fc_bias = flat.segment(at, fc_bias.size());
    at += fc_bias.size();
    for (ConvLayer& layer : convs) {
        for (double& w : layer.weight) {
            w = flat[at++];
        }
        layer.bias = flat.segment(at, layer.bias.size());
        at += layer.bias.size();
    }
}

void DetailDecoder::save(const std::string& path) const {
    nlohmann::json meta;
    meta["kind"] = spec_.kind == DecoderSpec::Kind::linear ? "linear" : "conv";
    meta["latent_dim"] = spec_.latent_dim;
    meta["psi_dim"] = spec_.psi_dim;
    meta["uv_size"] = spec_.uv_size;
    meta["base_size"] = spec_.base_size;
    meta["channels"] = spec_.channels;
    meta["output_scale"] = spec_.output_scale;
    meta["leaky_slope"] = spec_.leaky_slope;
    const std::string text = meta.dump(2);

    const VecX flat = parameters();
    std::vector<uint8_t> payload(static_cast<std::size_t>(flat.size()) * 8);
    std::memcpy(payload.data(), flat.data(), payload.size());

    NamedChunks chunks;
    chunks.emplace_back("spec.json", std::vector<uint8_t>(text.begin(), text.end()));
    chunks.emplace_back("parameters.f64", std::move(payload));
    write_chunk_file(path, kDecoderMagic, chunks);
}

DetailDecoder DetailDecoder::load(const std::string& path) {
    const NamedChunks chunks = read_chunk_file(path, kDecoderMagic);
    if (chunks.size() != 2 || chunks[0].first != "spec.json" ||
        chunks[1].first != "parameters.f64") {
        throw AssetChecksumError("decoder container layout unexpected: " + path);
    }
    const nlohmann::json meta =
        nlohmann::json::parse(std::string(chunks[0].second.begin(), chunks[0].second.end()));
    DecoderSpec spec;
    spec.kind = meta.at("kind").get<std::string>() == "linear" ? DecoderSpec::Kind::linear
                                                               : DecoderSpec::Kind::conv;
    spec.latent_dim = meta.at("latent_dim").get<int>();
    spec.psi_dim = meta.at("psi_dim").get<int>();
    spec.uv_size = meta.at("uv_size").get<int>();
    spec.base_size = meta.at("base_size").get<int>();
    spec.channels = meta.at("channels").get<std::vector<int>>();
    spec.output_scale = meta.at("output_scale").get<double>();
    spec.leaky_slope = meta.at("leaky_slope").get<double>();

    DetailDecoder dec(spec);
    if (chunks[1].second.size() != static_cast<std::size_t>(dec.parameter_count()) * 8) {
        throw AssetChecksumError("decoder parameter blob has the wrong length: " + path);
    }
    VecX flat(dec.parameter_count());
    std::memcpy(flat.data(), chunks[1].second.data(), chunks[1].second.size());
    dec.set_parameters(flat);
    return dec;
}

} // namespace faceforge
