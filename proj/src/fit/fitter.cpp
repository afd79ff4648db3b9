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
#include "faceforge/fit/fitter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "faceforge/core/error.hpp"

namespace faceforge {

namespace {

// Flat layout of the optimized coarse parameters:
// [beta, psi, theta, alpha, lighting(27), log(scale), tx, ty].
class CoarsePacker {
public:
    explicit CoarsePacker(const SceneContext& scene)
        : nb_(scene.head->shape_dim()), np_(scene.head->expression_dim()),
          nt_(scene.head->pose_dim()), na_(scene.albedo->dim()) {}

    Eigen::Index size() const { return nb_ + np_ + nt_ + na_ + 27 + 3; }

    VecX pack(const LatentCode& code) const {
        VecX x(size());
        x << code.beta, code.psi, code.theta, code.alpha, code.lighting.coefficients,
            std::log(code.camera.scale), code.camera.translation;
        return x;
    }

    LatentCode unpack(const VecX& x, const LatentCode& like) const {
        LatentCode code = like;
        Eigen::Index at = 0;
        code.beta = x.segment(at, nb_); at += nb_;
        code.psi = x.segment(at, np_); at += np_;
        code.theta = x.segment(at, nt_); at += nt_;
        code.alpha = x.segment(at, na_); at += na_;
        code.lighting.coefficients = x.segment(at, 27); at += 27;
        code.camera.scale = std::exp(x[at]); ++at;
        code.camera.translation = Vec2(x[at], x[at + 1]);
        return code;
    }

    VecX pack_grads(const CoarseGrads& grads, double scale_value) const {
        VecX g(size());
        g << grads.beta, grads.psi, grads.theta, grads.alpha, grads.lighting,
            grads.scale * scale_value, // chain through scale = exp(log_scale)
            grads.translation;
        return g;
    }

    VecX lr_scale(const FitConfig& config) const {
        VecX s = VecX::Ones(size());
        s.tail(2).setConstant(config.translation_lr_scale);
        return s;
    }

    void apply_freeze(const std::vector<std::string>& freeze, VecX* grad) const {
        for (const std::string& group : freeze) {
            Eigen::Index at = 0, len = 0;
            if (group == "beta") { at = 0; len = nb_; }
            else if (group == "psi") { at = nb_; len = np_; }
            else if (group == "theta") { at = nb_ + np_; len = nt_; }
            else if (group == "alpha") { at = nb_ + np_ + nt_; len = na_; }
            else if (group == "lighting") { at = nb_ + np_ + nt_ + na_; len = 27; }
            else if (group == "camera") { at = nb_ + np_ + nt_ + na_ + 27; len = 3; }
            else { throw ValidationError("unknown parameter group to freeze: " + group); }
            grad->segment(at, len).setZero();
        }
    }

    Eigen::Index beta_offset() const { return 0; }
    Eigen::Index beta_size() const { return nb_; }

private:
    Eigen::Index nb_, np_, nt_, na_;
};

} // namespace

LatentCode initial_code_from_landmarks(const SceneContext& scene, const Points2d& landmarks) {
    LatentCode code = LatentCode::zeros(*scene.head, scene.albedo->dim());
    code.lighting.coefficients.segment<3>(0).setConstant(2.0); // rough ambient init

    const CoarseRender rest = render_coarse(scene, code, /*with_image=*/false);
    const auto span = [](const Points2d& pts, int col) {
        return pts.col(col).maxCoeff() - pts.col(col).minCoeff();
    };
    const double model_h = span(Points2d(rest.landmarks3d.leftCols<2>()), 1);
    const double target_h = span(landmarks, 1);
    code.camera.scale = model_h > 0.0 ? std::max(1e-6, target_h / model_h) : 1.0;

    Vec2 model_center(rest.landmarks3d.col(0).mean(), rest.landmarks3d.col(1).mean());
    Vec2 target_center(landmarks.col(0).mean(), landmarks.col(1).mean());
    code.camera.translation = target_center - code.camera.scale * model_center;
    return code;
}

LossReport evaluate_coarse(const SceneContext& scene, const LatentCode& code,
                           const FitObservation& obs, const FeatureExtractor& extractor,
                           const LossWeights& weights, const StageConfig& stage,
                           CoarseGrads* grads) {
    const bool with_image = stage.use_photometric || stage.use_identity;
    if (with_image && (obs.image.height() != scene.image_height ||
                       obs.image.width() != scene.image_width)) {
        throw DimensionError("observation image size does not match the scene");
    }
    const CoarseRender fwd = render_coarse(scene, code, with_image);

    LossReport report;
    Points2d grad_lmk_total = Points2d::Zero(68, 2);
    Image grad_image_total;
    if (with_image) {
        grad_image_total = Image(obs.image.height(), obs.image.width(), obs.image.channels());
    }

    if (stage.use_landmarks) {
        Points2d g;
        const double value = landmark_loss(obs.landmarks, fwd.landmarks2d,
                                           weights.landmark_table(),
                                           grads != nullptr ? &g : nullptr);
        report.add("lmk", value, weights.lmk);
        if (grads != nullptr) {
            grad_lmk_total += weights.lmk * g;
        }
    }
    if (stage.use_eye_closure) {
        Points2d g;
        const double value = eye_closure_loss(obs.landmarks, fwd.landmarks2d,
                                              scene.head->eyelid_pairs,
                                              grads != nullptr ? &g : nullptr);
        report.add("eye", value, weights.eye);
        if (grads != nullptr) {
            grad_lmk_total += weights.eye * g;
        }
    }
    if (stage.use_photometric) {
        Image g;
        double normalized = 0.0;
        const double value = photometric_loss(obs.image, fwd.image, obs.mask,
                                              grads != nullptr ? &g : nullptr, &normalized);
        report.add("pho", value, weights.pho);
        report.aux["pho_per_sample"] = normalized;
        if (grads != nullptr) {
            for (std::size_t i = 0; i < g.data().size(); ++i) {
                grad_image_total.data()[i] += weights.pho * g.data()[i];
            }
        }
    }
    if (stage.use_identity) {
        Image g;
        const double value = identity_loss(extractor, obs.image, fwd.image,
                                           grads != nullptr ? &g : nullptr);
        report.add("id", value, weights.id);
        if (grads != nullptr) {
            for (std::size_t i = 0; i < g.data().size(); ++i) {
                grad_image_total.data()[i] += weights.id * g.data()[i];
            }
        }
    }

    VecX reg_grad_beta, reg_grad_psi, reg_grad_alpha;
    if (stage.use_regularizers) {
        report.add("reg_beta", squared_norm(code.beta, grads ? &reg_grad_beta : nullptr),
                   weights.beta);
        report.add("reg_psi", squared_norm(code.psi, grads ? &reg_grad_psi : nullptr),
                   weights.psi);
        report.add("reg_alpha", squared_norm(code.alpha, grads ? &reg_grad_alpha : nullptr),
                   weights.alpha);
    }

    if (grads != nullptr) {
        *grads = render_coarse_backward(scene, code, fwd,
                                        with_image ? &grad_image_total : nullptr,
                                        (stage.use_landmarks || stage.use_eye_closure)
                                            ? &grad_lmk_total
                                            : nullptr);
        if (stage.use_regularizers) {
            grads->beta += weights.beta * reg_grad_beta;
            grads->psi += weights.psi * reg_grad_psi;
            grads->alpha += weights.alpha * reg_grad_alpha;
        }
    }
    return report;
}

FitResult fit_coarse(const SceneContext& scene, const FitObservation& obs,
                     const FeatureExtractor& extractor, const FitConfig& config,
                     const LatentCode* init) {
    const CoarsePacker packer(scene);
    const LatentCode start =
        init != nullptr ? *init : initial_code_from_landmarks(scene, obs.landmarks);
    VecX state = packer.pack(start);
    const VecX lr_scale = packer.lr_scale(config);

    FitResult result;
    result.code = start;

    for (const StageConfig& stage : config.stages) {
        Adam adam(config.adam, packer.size());
        VecX best_state = state;
        double best_total = std::numeric_limits<double>::infinity();
        for (int it = 0; it < stage.iterations; ++it) {
            const LatentCode code = packer.unpack(state, start);
            CoarseGrads grads;
            const LossReport report =
                evaluate_coarse(scene, code, obs, extractor, config.weights, stage, &grads);
            const double total = report.total();
            result.trace.push_back(report);
            if (!std::isfinite(total)) {
                result.aborted = true;
                result.abort_reason = "non-finite loss in stage " + stage.name +
                                      " at iteration " + std::to_string(it);
                state = best_state;
                result.code = packer.unpack(state, start);
                return result;
            }
            if (total < best_total) {
                best_total = total;
                best_state = state;
            }
            VecX grad = packer.pack_grads(grads, code.camera.scale);
            packer.apply_freeze(stage.freeze, &grad);
            adam.step(state, grad, stage.rate_at(it), &lr_scale);
        }
        if (stage.iterations > 0) {
            // Evaluate the final iterate as well before keeping the best.
            const LatentCode code = packer.unpack(state, start);
            const LossReport report =
                evaluate_coarse(scene, code, obs, extractor, config.weights, stage, nullptr);
            if (std::isfinite(report.total()) && report.total() < best_total) {
                best_total = report.total();
                best_state = state;
            }
            state = best_state;
        }
    }
    result.code = packer.unpack(state, start);
    return result;
}

MultiFitResult fit_multi(const SceneContext& scene, const std::vector<FitObservation>& subject,
                         const FeatureExtractor& extractor, const FitConfig& config) {
    const int count = static_cast<int>(subject.size());
    if (count < 2) {
        throw ValidationError("fit_multi needs at least two images of the subject");
    }
    const CoarsePacker packer(scene);
    const Eigen::Index per_image = packer.size();

    std::vector<LatentCode> inits;
    VecX state(per_image * count);
    for (int i = 0; i < count; ++i) {
        inits.push_back(initial_code_from_landmarks(scene, subject[i].landmarks));
        state.segment(per_image * i, per_image) = packer.pack(inits.back());
    }
    if (config.shared_beta) {
        for (int i = 1; i < count; ++i) {
            state.segment(per_image * i, packer.beta_size()) =
                state.segment(0, packer.beta_size());
        }
    }

    VecX lr_scale(per_image * count);
    for (int i = 0; i < count; ++i) {
        lr_scale.segment(per_image * i, per_image) = packer.lr_scale(config);
    }

    MultiFitResult result;
    for (const StageConfig& stage : config.stages) {
        Adam adam(config.adam, state.size());
        const bool swaps_active = stage.use_photometric && config.weights.sc > 0.0;

        // Per-image objective slice at one iterate: own terms plus the swap
        // term rendered against this image (which borrows the partner's
        // shape block). Gradients and trace entries are accumulated too.
        const auto evaluate_all = [&](int it, VecX* grad, LossReport* combined,
                                      std::vector<double>* totals) {
            totals->assign(static_cast<std::size_t>(count), 0.0);
            for (int i = 0; i < count; ++i) {
                const LatentCode code =
                    packer.unpack(state.segment(per_image * i, per_image), inits[0]);
                CoarseGrads grads;
                const LossReport report =
                    evaluate_coarse(scene, code, subject[i], extractor, config.weights,
                                    stage, grad != nullptr ? &grads : nullptr);
                (*totals)[static_cast<std::size_t>(i)] += report.total();
                if (combined != nullptr) {
                    for (const auto& term : report.terms) {
                        combined->add("img" + std::to_string(i) + "_" + term.name,
                                      term.value, term.weight);
                    }
                }
                if (grad != nullptr) {
                    VecX g = packer.pack_grads(grads, code.camera.scale);
                    packer.apply_freeze(stage.freeze, &g);
                    grad->segment(per_image * i, per_image) += g;
                }

                if (swaps_active) {
                    const int partner =
                        (i + 1 + (count > 2 ? it % (count - 1) : 0)) % count;
                    const VecX beta_donor =
                        state.segment(per_image * partner, packer.beta_size());
                    CoarseGrads sc_grads;
                    const SwapRenderLoss sc = shape_consistency_loss(
                        scene, code, beta_donor, subject[i].image, subject[i].mask,
                        extractor, config.weights,
                        grad != nullptr ? &sc_grads : nullptr);
                    (*totals)[static_cast<std::size_t>(i)] += config.weights.sc * sc.total;
                    if (combined != nullptr) {
                        combined->add("img" + std::to_string(i) + "_sc", sc.total,
                                      config.weights.sc);
                    }
                    if (grad != nullptr) {
                        VecX gsc = packer.pack_grads(sc_grads, code.camera.scale);
                        gsc *= config.weights.sc;
                        packer.apply_freeze(stage.freeze, &gsc);
                        // The shape block belongs to the donor image.
                        grad->segment(per_image * partner, packer.beta_size()) +=
                            gsc.head(packer.beta_size());
                        gsc.head(packer.beta_size()).setZero();
                        grad->segment(per_image * i, per_image) += gsc;
                    }
                }
            }
        };

        // Best-so-far checkpoints: per image on its own slice (global when
        // the shape vector is shared, to keep the blocks in sync).
        std::vector<VecX> best_img(static_cast<std::size_t>(count));
        std::vector<double> best_img_total(static_cast<std::size_t>(count),
                                           std::numeric_limits<double>::infinity());
        VecX best_state = state;
        double best_total = std::numeric_limits<double>::infinity();

        const auto update_best = [&](const std::vector<double>& totals) {
            const double total = std::accumulate(totals.begin(), totals.end(), 0.0);
            if (total < best_total) {
                best_total = total;
                best_state = state;
            }
            for (int i = 0; i < count; ++i) {
                if (totals[static_cast<std::size_t>(i)] < best_img_total[static_cast<std::size_t>(i)]) {
                    best_img_total[static_cast<std::size_t>(i)] =
                        totals[static_cast<std::size_t>(i)];
                    best_img[static_cast<std::size_t>(i)] =
                        state.segment(per_image * i, per_image);
                }
            }
        };

        std::vector<double> totals;
        for (int it = 0; it < stage.iterations; ++it) {
            VecX grad = VecX::Zero(state.size());
            LossReport combined;
            evaluate_all(it, &grad, &combined, &totals);
            result.trace.push_back(combined);
            const double total = std::accumulate(totals.begin(), totals.end(), 0.0);
            if (!std::isfinite(total)) {
                result.aborted = true;
                result.abort_reason = "non-finite loss at iteration " + std::to_string(it);
                break;
            }
            update_best(totals);
            if (config.shared_beta) {
                VecX shared = VecX::Zero(packer.beta_size());
                for (int i = 0; i < count; ++i) {
                    shared += grad.segment(per_image * i, packer.beta_size());
                }
                for (int i = 0; i < count; ++i) {
                    grad.segment(per_image * i, packer.beta_size()) = shared;
                }
            }
            adam.step(state, grad, stage.rate_at(it), &lr_scale);
        }
        if (result.aborted) {
            state = best_state;
            break;
        }
        if (stage.iterations > 0) {
            evaluate_all(stage.iterations, nullptr, nullptr, &totals);
            if (std::isfinite(std::accumulate(totals.begin(), totals.end(), 0.0))) {
                update_best(totals);
            }
            if (config.shared_beta) {
                state = best_state;
            } else {
                for (int i = 0; i < count; ++i) {
                    state.segment(per_image * i, per_image) =
                        best_img[static_cast<std::size_t>(i)];
                }
            }
        }
    }

    for (int i = 0; i < count; ++i) {
        result.codes.push_back(
            packer.unpack(state.segment(per_image * i, per_image), inits[0]));
    }
    return result;
}

DetailFitResult fit_detail(const SceneContext& scene, const LatentCode& coarse_code,
                           const DetailDecoder& decoder, const FitObservation& obs,
                           const FeatureExtractor& extractor, const FitConfig& config,
                           const VecX* init_delta) {
    const CoarseRender coarse = render_coarse(scene, coarse_code);
    VecX delta = init_delta != nullptr ? *init_delta
                                       : VecX::Zero(decoder.spec().latent_dim);
    Adam adam(config.adam, delta.size());

    DetailFitResult result;
    VecX best_delta = delta;
    double best_total = std::numeric_limits<double>::infinity();
    for (int it = 0; it < config.detail_iterations; ++it) {
        DetailGrads grads;
        const DetailLossTerms terms =
            detail_objective(scene, coarse_code, coarse, decoder, delta, obs.image, obs.mask,
                             extractor, config.weights, config.mrf, &grads, false);
        LossReport report;
        report.add("phoD", terms.photometric, config.weights.phoD);
        report.add("mrf", terms.mrf, config.weights.mrf);
        report.add("sym", terms.symmetry, config.weights.sym);
        report.add("regD", terms.regularizer, config.weights.regD);
        result.trace.push_back(report);
        if (!std::isfinite(terms.total)) {
            result.aborted = true;
            result.abort_reason = "non-finite detail loss at iteration " + std::to_string(it);
            break;
        }
        if (terms.total < best_total) {
            best_total = terms.total;
            best_delta = delta;
        }
        const double f = config.detail_iterations <= 1
                             ? 0.0
                             : static_cast<double>(it) / (config.detail_iterations - 1);
        const double lr = config.detail_lr_end > 0.0
                              ? config.detail_learning_rate *
                                    std::pow(config.detail_lr_end / config.detail_learning_rate, f)
                              : config.detail_learning_rate;
        adam.step(delta, grads.delta, lr);
    }
    result.delta = best_delta;
    result.displacement =
        decoder.decode(best_delta, coarse_code.psi, coarse_code.jaw_pose(*scene.head));
    return result;
}

TrainResult train_detail_decoder(const SceneContext& scene,
                                 const std::vector<DetailTrainingSubject>& subjects,
                                 const DetailDecoder& init, const FeatureExtractor& extractor,
                                 const TrainConfig& config) {
    if (subjects.size() < 2) {
        throw ValidationError("decoder training needs at least two subjects");
    }
    for (const auto& subject : subjects) {
        if (subject.images.size() < 2) {
            throw ValidationError("subject " + subject.id +
                                  " needs at least two images for detail swaps");
        }
    }

    // Cache the frozen coarse renders.
    std::vector<std::vector<CoarseRender>> coarse(subjects.size());
    for (std::size_t s = 0; s < subjects.size(); ++s) {
        for (const DetailTrainingImage& img : subjects[s].images) {
            coarse[s].push_back(render_coarse(scene, img.code));
        }
    }

    const int latent = init.spec().latent_dim;
    const Eigen::Index weight_count = init.parameter_count();
    std::vector<std::vector<Eigen::Index>> delta_offset(subjects.size());
    Eigen::Index at = weight_count;
    for (std::size_t s = 0; s < subjects.size(); ++s) {
        for (std::size_t a = 0; a < subjects[s].images.size(); ++a) {
            if (config.tie_subject_deltas && a > 0) {
                delta_offset[s].push_back(delta_offset[s][0]);
            } else {
                delta_offset[s].push_back(at);
                at += latent;
            }
        }
    }
    VecX state = VecX::Zero(at);
    state.head(weight_count) = init.parameters();

    VecX lr_scale = VecX::Ones(at);
    lr_scale.tail(at - weight_count).setConstant(config.delta_lr_scale);

    DetailDecoder decoder = init;
    Adam adam(config.adam, at);

    TrainResult result;
    VecX best_state = state;
    double best_total = std::numeric_limits<double>::infinity();
    for (int it = 0; it < config.iterations; ++it) {
        decoder.set_parameters(state.head(weight_count));
        VecX grad = VecX::Zero(at);
        double total = 0.0;
        for (std::size_t s = 0; s < subjects.size(); ++s) {
            const int m = static_cast<int>(subjects[s].images.size());
            for (int a = 0; a < m; ++a) {
                const DetailTrainingImage& img = subjects[s].images[static_cast<std::size_t>(a)];
                const VecX own_delta = state.segment(delta_offset[s][a], latent);

                DetailGrads own_grads;
                const DetailLossTerms own = detail_objective(
                    scene, img.code, coarse[s][static_cast<std::size_t>(a)], decoder,
                    own_delta, img.image, img.mask, extractor, config.weights,
                    config.mrf, &own_grads, true);
                total += own.total;
                grad.head(weight_count) += own_grads.decoder;
                grad.segment(delta_offset[s][a], latent) += own_grads.delta;

                const int partner = (a + 1 + (m > 2 ? it % (m - 1) : 0)) % m;
                const VecX donor_delta = state.segment(delta_offset[s][partner], latent);
                DetailGrads swap_grads;
                const DetailLossTerms swap = detail_consistency_loss(
                    scene, img.code, donor_delta, coarse[s][static_cast<std::size_t>(a)],
                    decoder, img.image, img.mask, extractor, config.weights,
                    config.mrf, &swap_grads, true);
                total += config.weights.dc * swap.total;
                grad.head(weight_count) += config.weights.dc * swap_grads.decoder;
                grad.segment(delta_offset[s][partner], latent) +=
                    config.weights.dc * swap_grads.delta;
            }
        }
        result.trace.push_back(total);
        if (!std::isfinite(total)) {
            result.aborted = true;
            result.abort_reason = "non-finite training loss at iteration " + std::to_string(it);
            state = best_state;
            break;
        }
        if (total < best_total) {
            best_total = total;
            best_state = state;
        }
        const double f =
            config.iterations <= 1 ? 0.0 : static_cast<double>(it) / (config.iterations - 1);
        const double lr = config.lr_end > 0.0
                              ? config.learning_rate *
                                    std::pow(config.lr_end / config.learning_rate, f)
                              : config.learning_rate;
        adam.step(state, grad, lr, &lr_scale);
    }
    if (config.iterations > 0) {
        state = best_state;
    }

    decoder.set_parameters(state.head(weight_count));
    result.decoder = decoder;
    result.deltas.resize(subjects.size());
    for (std::size_t s = 0; s < subjects.size(); ++s) {
        for (std::size_t a = 0; a < subjects[s].images.size(); ++a) {
            result.deltas[s].push_back(state.segment(delta_offset[s][a], latent));
        }
    }
    return result;
}

} // namespace faceforge
