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

#include <cmath>
#include <memory>

#include "faceforge/core/rng.hpp"
#include "faceforge/core/toy_model.hpp"
#include "faceforge/detail/detail_renderer.hpp"
#include "faceforge/fit/fitter.hpp"
#include "faceforge/render/albedo.hpp"

namespace fftest {

using namespace faceforge;

/// Self-contained toy scene (head + albedo + scene context).
struct ToySetup {
    ParametricHeadModel head;
    AlbedoModel albedo;
    SceneContext scene;

    ToySetup(uint64_t seed, int image_size, int uv_size, int subdivisions = 2,
             int shape_dim = 4, int expression_dim = 3, int albedo_dim = 3) {
        ToyModelSpec spec;
        spec.seed = seed;
        spec.subdivisions = subdivisions;
        spec.shape_dim = shape_dim;
        spec.expression_dim = expression_dim;
        head = synthesize_toy_model(spec);
        albedo = synthesize_toy_albedo(seed + 1, uv_size, albedo_dim);
        scene = SceneContext::create(head, albedo, image_size, uv_size);
    }
};

/// A plausible ground-truth code framed for the scene's image size.
inline LatentCode random_ground_truth(const SceneContext& scene, Rng& rng,
                                      int detail_dim = 8) {
    LatentCode code = LatentCode::zeros(*scene.head, scene.albedo->dim(), detail_dim);
    for (int i = 0; i < code.beta.size(); ++i) code.beta[i] = rng.gauss(0.0, 0.5);
    for (int i = 0; i < code.psi.size(); ++i) code.psi[i] = rng.gauss(0.0, 0.4);
    code.theta.head<3>() = Vec3(rng.gauss(0.0, 0.06), rng.gauss(0.0, 0.06), rng.gauss(0.0, 0.04));
    code.theta[3 + 3 * scene.head->jaw_joint] = std::abs(rng.gauss(0.0, 0.08));
    for (int i = 0; i < code.alpha.size(); ++i) code.alpha[i] = rng.gauss(0.0, 0.4);
    code.lighting.coefficients.setZero();
    code.lighting.coefficients.segment<3>(0).setConstant(2.2 + 0.2 * rng.gauss());
    code.lighting.coefficients.segment<3>(3).setConstant(0.3 * rng.gauss());
    code.lighting.coefficients.segment<3>(9).setConstant(0.3 * rng.gauss());
    code.camera.scale = 0.42 * scene.image_width / 0.115 * (1.0 + 0.05 * rng.gauss());
    code.camera.translation =
        Vec2(scene.image_width / 2.0 + rng.gauss(0.0, 2.0),
             scene.image_height / 2.0 + rng.gauss(0.0, 2.0));
    return code;
}

/// Renders a code into a synthetic observation (image, landmarks, coverage mask).
inline FitObservation make_observation(const SceneContext& scene, const LatentCode& code) {
    const CoarseRender fwd = render_coarse(scene, code);
    FitObservation obs;
    obs.image = fwd.image;
    obs.landmarks = fwd.landmarks2d;
    obs.mask = coverage_mask(fwd.frags);
    return obs;
}

inline LatentCode perturb_code(const LatentCode& code, Rng& rng, double strength) {
    LatentCode out = code;
    for (int i = 0; i < out.beta.size(); ++i) out.beta[i] += rng.gauss(0.0, 0.4 * strength);
    for (int i = 0; i < out.psi.size(); ++i) out.psi[i] += rng.gauss(0.0, 0.3 * strength);
    for (int i = 0; i < out.theta.size(); ++i) out.theta[i] += rng.gauss(0.0, 0.03 * strength);
    for (int i = 0; i < out.alpha.size(); ++i) out.alpha[i] += rng.gauss(0.0, 0.3 * strength);
    for (int i = 0; i < 27; ++i) {
        out.lighting.coefficients[i] += rng.gauss(0.0, 0.1 * strength);
    }
    out.camera.scale *= std::exp(rng.gauss(0.0, 0.04 * strength));
    out.camera.translation += Vec2(rng.gauss(0.0, 4.0 * strength), rng.gauss(0.0, 4.0 * strength));
    return out;
}

inline double mean_landmark_error(const Points2d& a, const Points2d& b) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        sum += (Vec2(a.row(i)) - Vec2(b.row(i))).norm();
    }
    return sum / static_cast<double>(a.rows());
}

/// Band-limited random displacement field with |values| <= amplitude.
inline Image random_displacement_field(int size, uint64_t seed, double amplitude) {
    Rng rng(seed);
    Image field(size, size, 1, 0.0, ChannelTag::displacement);
    const int waves = 3;
    double fu[waves], fv[waves], pu[waves], pv[waves], amp[waves];
    double total = 0.0;
    for (int w = 0; w < waves; ++w) {
        fu[w] = rng.uniform_int(1, 4);
        fv[w] = rng.uniform_int(1, 4);
        pu[w] = rng.uniform(0.0, 2.0 * M_PI);
        pv[w] = rng.uniform(0.0, 2.0 * M_PI);
        amp[w] = rng.uniform(0.4, 1.0);
        total += amp[w];
    }
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double u = (x + 0.5) / size;
            const double v = (y + 0.5) / size;
            double value = 0.0;
            for (int w = 0; w < waves; ++w) {
                value += amp[w] * std::sin(2.0 * M_PI * fu[w] * u + pu[w]) *
                         std::cos(2.0 * M_PI * fv[w] * v + pv[w]);
            }
            field.at(y, x, 0) = amplitude * value / total;
        }
    }
    return field;
}

/// Wraps a fixed displacement map in a decoder (zero weights, bias =
/// atanh(D/scale)), so the ground-truth detail render uses the ordinary path.
inline DetailDecoder decoder_for_fixed_displacement(const Image& displacement,
                                                    int latent_dim, int psi_dim,
                                                    double scale = 0.01) {
    DecoderSpec spec;
    spec.kind = DecoderSpec::Kind::linear;
    spec.latent_dim = latent_dim;
    spec.psi_dim = psi_dim;
    spec.uv_size = displacement.height();
    spec.output_scale = scale;
    DetailDecoder decoder(spec);
    VecX params = VecX::Zero(decoder.parameter_count());
    const Eigen::Index bias_offset =
        static_cast<Eigen::Index>(spec.uv_size) * spec.uv_size * spec.input_dim();
    for (int y = 0; y < spec.uv_size; ++y) {
        for (int x = 0; x < spec.uv_size; ++x) {
            params[bias_offset + y * spec.uv_size + x] =
                std::atanh(std::clamp(displacement.at(y, x, 0) / scale, -0.999, 0.999));
        }
    }
    decoder.set_parameters(params);
    return decoder;
}

/**
 * Separable-detail training fixture: ground-truth displacement is
 * f(subject) + g(expression) with the dynamic part linear in the expression
 * vector, g(psi) = sum_k psi_k W_k. Held-out expressions are therefore
 * predictable from psi by a properly disentangled decoder. Images are
 * rendered through the ordinary detail path.
 */
struct SeparableDetailFixture {
    std::vector<DetailTrainingSubject> train;    // first expressions
    std::vector<DetailTrainingSubject> held_out; // the last expressions
    std::vector<Image> subject_fields;           // diagnostics
    std::vector<Image> psi_fields;

    SeparableDetailFixture(const ToySetup& setup, uint64_t seed, int subjects,
                           int expressions, int held_out_expressions) {
        Rng rng(seed);
        const int uv = setup.scene.uv_table.size;
        const int psi_dim = setup.head.expression_dim();
        // Amplitudes stay well inside the decoder range so that the
        // atanh/tanh pair is effectively linear and the ground truth remains
        // additive in raw space.
        for (int s = 0; s < subjects; ++s) {
            subject_fields.push_back(random_displacement_field(uv, seed + 100 + s, 0.0016));
        }
        for (int k = 0; k < psi_dim; ++k) {
            psi_fields.push_back(random_displacement_field(uv, seed + 200 + k, 0.0012));
        }
        std::vector<VecX> expression_psi;
        std::vector<double> expression_jaw;
        for (int e = 0; e < expressions; ++e) {
            VecX psi(psi_dim);
            for (int i = 0; i < psi.size(); ++i) {
                psi[i] = rng.gauss(0.0, 0.7);
            }
            expression_psi.push_back(psi);
            // The jaw stays fixed: wrinkle fields are a function of psi only,
            // so the psi-to-field map is identifiable from a few expressions.
            expression_jaw.push_back(0.0);
        }

        for (int s = 0; s < subjects; ++s) {
            DetailTrainingSubject train_subject;
            DetailTrainingSubject held_subject;
            train_subject.id = held_subject.id = "subject_" + std::to_string(s);
            LatentCode base = random_ground_truth(setup.scene, rng);
            // Strong oblique light so displacement tilt dominates shading.
            base.lighting.coefficients.segment<3>(9).setConstant(0.9);
            base.lighting.coefficients.segment<3>(3).setConstant(0.5);
            for (int e = 0; e < expressions; ++e) {
                const VecX& psi = expression_psi[static_cast<std::size_t>(e)];
                LatentCode code = base;
                code.psi = psi;
                code.theta[3 + 3 * setup.head.jaw_joint] =
                    expression_jaw[static_cast<std::size_t>(e)];

                Image d_gt(uv, uv, 1, 0.0, ChannelTag::displacement);
                for (int i = 0; i < uv * uv; ++i) {
                    double value = subject_fields[static_cast<std::size_t>(s)]
                                       .data()[static_cast<std::size_t>(i)];
                    for (int k = 0; k < psi_dim; ++k) {
                        value += psi[k] * psi_fields[static_cast<std::size_t>(k)]
                                              .data()[static_cast<std::size_t>(i)];
                    }
                    d_gt.data()[static_cast<std::size_t>(i)] =
                        std::clamp(value, -0.0085, 0.0085);
                }
                const DetailDecoder gt_decoder =
                    decoder_for_fixed_displacement(d_gt, 4, psi_dim);
                const CoarseRender coarse = render_coarse(setup.scene, code);
                const DetailRender detail =
                    render_detail(setup.scene, code, coarse, gt_decoder, VecX::Zero(4));

                DetailTrainingImage img;
                img.code = code;
                img.image = detail.image;
                img.mask = coverage_mask(coarse.frags);
                if (e < expressions - held_out_expressions) {
                    train_subject.images.push_back(std::move(img));
                } else {
                    held_subject.images.push_back(std::move(img));
                }
            }
            train.push_back(std::move(train_subject));
            held_out.push_back(std::move(held_subject));
        }
    }
};

/// Mean detail-consistency loss of held-out images against the trained
/// donor deltas of the same subject.
inline double held_out_swap_loss(const ToySetup& setup, const SeparableDetailFixture& fixture,
                                 const TrainResult& result, const FeatureExtractor& extractor,
                                 const LossWeights& weights, const IdMrfConfig& mrf) {
    double sum = 0.0;
    int count = 0;
    for (std::size_t s = 0; s < fixture.held_out.size(); ++s) {
        for (const DetailTrainingImage& held : fixture.held_out[s].images) {
            const CoarseRender coarse = render_coarse(setup.scene, held.code);
            for (const VecX& donor : result.deltas[s]) {
                sum += detail_consistency_loss(setup.scene, held.code, donor, coarse,
                                               result.decoder, held.image, held.mask,
                                               extractor, weights, mrf)
                           .total;
                ++count;
            }
        }
    }
    return sum / count;
}

} // namespace fftest
