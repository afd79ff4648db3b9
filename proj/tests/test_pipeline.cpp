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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "faceforge/fit/retarget.hpp"
#include "fixtures.hpp"
#include "test_helpers.hpp"

using namespace faceforge;
using fftest::ToySetup;

namespace {

FitConfig quick_config() {
    FitConfig config = FitConfig::defaults();
    config.stages[0].iterations = 250;
    config.stages[1].iterations = 350;
    config.detail_iterations = 120;
    return config;
}

} // namespace

TEST_CASE("fitting from the truth keeps the landmark loss at zero") {
    ToySetup setup(3, 64, 32);
    Rng rng(4);
    const LatentCode truth = fftest::random_ground_truth(setup.scene, rng);
    const FitObservation obs = fftest::make_observation(setup.scene, truth);

    FitConfig config;
    StageConfig stage;
    stage.name = "warmup";
    stage.iterations = 5;
    stage.learning_rate = 1e-5;
    stage.use_photometric = false;
    stage.use_identity = false;
    config.stages = {stage};

    HogFeatureExtractor extractor;
    const FitResult result = fit_coarse(setup.scene, obs, extractor, config, &truth);
    CHECK_FALSE(result.aborted);
    // The scale round-trips through its log parametrization, so the fixed
    // point holds to rounding rather than bitwise.
    CHECK(result.trace.front().value("lmk") < 1e-9);
    const CoarseRender final_render = render_coarse(setup.scene, result.code, false);
    CHECK(fftest::mean_landmark_error(final_render.landmarks2d, obs.landmarks) < 1e-9);
}

TEST_CASE("landmark-only stage recovers a pure translation offset") {
    ToySetup setup(5, 64, 32);
    Rng rng(6);
    const LatentCode truth = fftest::random_ground_truth(setup.scene, rng);
    const FitObservation obs = fftest::make_observation(setup.scene, truth);

    LatentCode init = truth;
    init.camera.translation += Vec2(3.7, -2.2);

    FitConfig config;
    StageConfig stage;
    stage.name = "warmup";
    stage.iterations = 900;
    stage.learning_rate = 5e-2;
    stage.lr_end = 1e-7;
    stage.use_photometric = false;
    stage.use_identity = false;
    stage.use_regularizers = false;
    stage.freeze = {"beta", "psi", "theta", "alpha", "lighting"};
    config.stages = {stage};

    HogFeatureExtractor extractor;
    const FitResult result = fit_coarse(setup.scene, obs, extractor, config, &init);
    CHECK_FALSE(result.aborted);
    CHECK((result.code.camera.translation - truth.camera.translation).norm() < 1e-3);
}

TEST_CASE("synthetic round trip at desk scale") {
    ToySetup setup(7, 64, 32);
    Rng rng(8);
    const LatentCode truth = fftest::random_ground_truth(setup.scene, rng);
    const FitObservation obs = fftest::make_observation(setup.scene, truth);
    const LatentCode init = fftest::perturb_code(truth, rng, 1.0);

    const CoarseRender init_render = render_coarse(setup.scene, init);
    const double initial_pho = photometric_loss(obs.image, init_render.image, obs.mask);
    const double initial_lmk =
        fftest::mean_landmark_error(init_render.landmarks2d, obs.landmarks);

    HogFeatureExtractor extractor;
    const FitResult result = fit_coarse(setup.scene, obs, extractor, quick_config(), &init);
    CHECK_FALSE(result.aborted);

    const CoarseRender final_render = render_coarse(setup.scene, result.code);
    const double final_pho = photometric_loss(obs.image, final_render.image, obs.mask);
    const double final_lmk =
        fftest::mean_landmark_error(final_render.landmarks2d, obs.landmarks);
    CHECK(final_lmk < 1.0);
    CHECK(final_lmk < 0.3 * initial_lmk);
    CHECK(final_pho < 0.15 * initial_pho);
}

TEST_CASE("shape consistency with identical shape equals the unswapped terms") {
    ToySetup setup(11, 64, 32);
    Rng rng(12);
    const LatentCode code = fftest::random_ground_truth(setup.scene, rng);
    LatentCode other = fftest::perturb_code(code, rng, 0.6);
    const FitObservation obs = fftest::make_observation(setup.scene, other);

    HogFeatureExtractor extractor;
    LossWeights weights;
    const SwapRenderLoss swap = shape_consistency_loss(setup.scene, code, code.beta, obs.image,
                                                       obs.mask, extractor, weights);
    const CoarseRender fwd = render_coarse(setup.scene, code);
    const double pho = photometric_loss(obs.image, fwd.image, obs.mask);
    const double id = identity_loss(extractor, obs.image, fwd.image);
    CHECK(std::abs(swap.total - (weights.pho * pho + weights.id * id)) < 1e-9);
    CHECK(std::abs(swap.photometric - pho) < 1e-12);
    CHECK(std::abs(swap.identity - id) < 1e-12);
}

TEST_CASE("fit_multi with zero swap weight reproduces independent fits bit-for-bit") {
    ToySetup setup(13, 48, 24);
    Rng rng(14);
    const LatentCode truth = fftest::random_ground_truth(setup.scene, rng);
    LatentCode truth2 = truth;
    truth2.psi.setZero();
    truth2.theta[3 + 3 * setup.head.jaw_joint] = 0.22;
    const std::vector<FitObservation> subject = {
        fftest::make_observation(setup.scene, truth),
        fftest::make_observation(setup.scene, truth2),
    };

    FitConfig config = quick_config();
    config.stages[0].iterations = 60;
    config.stages[1].iterations = 80;
    config.weights.sc = 0.0;

    HogFeatureExtractor extractor;
    const MultiFitResult joint = fit_multi(setup.scene, subject, extractor, config);
    CHECK_FALSE(joint.aborted);
    for (int i = 0; i < 2; ++i) {
        const FitResult solo = fit_coarse(setup.scene, subject[static_cast<std::size_t>(i)],
                                          extractor, config);
        CHECK(joint.codes[static_cast<std::size_t>(i)].beta == solo.code.beta);
        CHECK(joint.codes[static_cast<std::size_t>(i)].theta == solo.code.theta);
        CHECK(joint.codes[static_cast<std::size_t>(i)].camera.scale == solo.code.camera.scale);
    }
}

TEST_CASE("fit_multi rejects a single-image subject") {
    ToySetup setup(15, 48, 24);
    Rng rng(16);
    const std::vector<FitObservation> subject = {
        fftest::make_observation(setup.scene, fftest::random_ground_truth(setup.scene, rng))};
    HogFeatureExtractor extractor;
    CHECK_THROWS_AS(fit_multi(setup.scene, subject, extractor, quick_config()),
                    ValidationError);
}

TEST_CASE("retarget algebra") {
    ToySetup setup(17, 48, 24);
    Rng rng(18);
    const LatentCode a = fftest::random_ground_truth(setup.scene, rng);
    LatentCode b = fftest::random_ground_truth(setup.scene, rng);

    SUBCASE("self-retarget is the identity") {
        const LatentCode out = retarget(setup.head, a, a);
        CHECK(out.beta == a.beta);
        CHECK(out.psi == a.psi);
        CHECK(out.theta == a.theta);
        CHECK(out.alpha == a.alpha);
        CHECK(out.delta == a.delta);
        CHECK(out.camera.scale == a.camera.scale);
    }

    SUBCASE("double substitution restores the expression fields") {
        const LatentCode ab = retarget(setup.head, a, b);
        const LatentCode back = retarget(setup.head, ab, a);
        CHECK(back.psi == a.psi);
        CHECK(back.theta == a.theta);
        CHECK(back.beta == a.beta);
    }

    SUBCASE("idempotence in the expression fields") {
        const LatentCode ab = retarget(setup.head, a, b);
        const LatentCode ab2 = retarget(setup.head, ab, b);
        CHECK(ab2.psi == ab.psi);
        CHECK(ab2.theta == ab.theta);
        CHECK(ab2.delta == ab.delta);
    }

    SUBCASE("jaw pose comes from the expression, the rest of theta from identity") {
        const LatentCode ab = retarget(setup.head, a, b);
        const int jaw = setup.head.jaw_joint;
        CHECK(ab.theta.segment<3>(3 + 3 * jaw) == b.theta.segment<3>(3 + 3 * jaw));
        CHECK(ab.theta.head<3>() == a.theta.head<3>());
    }

    SUBCASE("displacement equals a direct decoder call") {
        const DetailDecoder decoder = DetailDecoder::seeded(
            [&] {
                DecoderSpec spec;
                spec.latent_dim = 8;
                spec.psi_dim = setup.head.expression_dim();
                spec.uv_size = 24;
                spec.base_size = 6;
                spec.channels = {4, 3};
                return spec;
            }(),
            55);
        const RetargetResult r = retarget_with_displacement(setup.head, a, b, decoder);
        const Image direct = decoder.decode(a.delta, b.psi, b.jaw_pose(setup.head));
        CHECK(r.displacement.equals(direct));
    }
}

TEST_CASE("animate_sequence") {
    ToySetup setup(19, 48, 24);
    Rng rng(20);
    const LatentCode identity_code = fftest::random_ground_truth(setup.scene, rng);
    LatentCode expr = fftest::random_ground_truth(setup.scene, rng);

    DecoderSpec spec;
    spec.latent_dim = 8;
    spec.psi_dim = setup.head.expression_dim();
    spec.uv_size = 24;
    spec.base_size = 6;
    spec.channels = {4, 3};
    const DetailDecoder decoder = DetailDecoder::seeded(spec, 66);

    SUBCASE("a single frame equals one retarget plus render") {
        const auto frames = animate_sequence(setup.scene, identity_code, {expr}, decoder);
        REQUIRE(frames.size() == 1);
        const LatentCode direct_code = retarget(setup.head, identity_code, expr);
        const CoarseRender coarse = render_coarse(setup.scene, direct_code);
        const DetailRender detail =
            render_detail(setup.scene, direct_code, coarse, decoder, identity_code.delta);
        CHECK(frames[0].image.equals(detail.image));
    }

    SUBCASE("constant sequences produce identical frames and preserve count") {
        const auto frames =
            animate_sequence(setup.scene, identity_code, {expr, expr, expr}, decoder);
        REQUIRE(frames.size() == 3);
        CHECK(frames[1].image.equals(frames[0].image));
        CHECK(frames[2].image.equals(frames[0].image));
        CHECK(frames[1].mesh.vertices == frames[0].mesh.vertices);
    }
}

TEST_CASE("fit runs are bit-reproducible") {
    ToySetup setup(21, 48, 24);
    Rng rng(22);
    const LatentCode truth = fftest::random_ground_truth(setup.scene, rng);
    const FitObservation obs = fftest::make_observation(setup.scene, truth);

    FitConfig config = quick_config();
    config.stages[0].iterations = 40;
    config.stages[1].iterations = 50;
    HogFeatureExtractor extractor;
    const FitResult r1 = fit_coarse(setup.scene, obs, extractor, config);
    const FitResult r2 = fit_coarse(setup.scene, obs, extractor, config);
    CHECK(r1.code.beta == r2.code.beta);
    CHECK(r1.code.theta == r2.code.theta);
    CHECK(r1.code.alpha == r2.code.alpha);
    CHECK(r1.code.lighting.coefficients == r2.code.lighting.coefficients);
    CHECK(r1.code.camera.scale == r2.code.camera.scale);
    CHECK(r1.code.camera.translation == r2.code.camera.translation);
}

TEST_CASE("non-finite input aborts the fit with the last finite best") {
    ToySetup setup(23, 48, 24);
    Rng rng(24);
    const LatentCode truth = fftest::random_ground_truth(setup.scene, rng);
    FitObservation obs = fftest::make_observation(setup.scene, truth);
    // Poison a pixel the photometric mask actually covers.
    bool poisoned = false;
    for (int y = 0; y < 48 && !poisoned; ++y) {
        for (int x = 0; x < 48 && !poisoned; ++x) {
            if (obs.mask.at(y, x, 0) > 0.0) {
                obs.image.at(y, x, 0) = std::numeric_limits<double>::quiet_NaN();
                poisoned = true;
            }
        }
    }
    REQUIRE(poisoned);

    FitConfig config = quick_config();
    config.stages[0].iterations = 5; // landmark-only stage stays finite
    config.stages[1].iterations = 10;
    HogFeatureExtractor extractor;
    const FitResult result = fit_coarse(setup.scene, obs, extractor, config);
    CHECK(result.aborted);
    CHECK(result.abort_reason.find("non-finite") != std::string::npos);
    CHECK(result.code.beta.allFinite());
}

TEST_CASE("a huge displacement regularizer drives the fitted map toward zero") {
    ToySetup setup(25, 64, 32);
    Rng rng(26);
    // Neutral expression and jaw: the zero code is the decoder's exact zero,
    // so the regularizer optimum is a vanishing displacement.
    LatentCode truth = fftest::random_ground_truth(setup.scene, rng, 6);
    truth.psi.setZero();
    truth.theta.segment<3>(3 + 3 * setup.head.jaw_joint).setZero();
    const FitObservation obs = fftest::make_observation(setup.scene, truth);

    DecoderSpec spec;
    spec.latent_dim = 6;
    spec.psi_dim = setup.head.expression_dim();
    spec.uv_size = 32;
    spec.base_size = 8;
    spec.channels = {6, 4};
    const DetailDecoder decoder = DetailDecoder::seeded(spec, 91);

    HogFeatureExtractor extractor;
    FitConfig config = quick_config();
    config.detail_iterations = 800;
    config.detail_learning_rate = 5e-2;
    config.detail_lr_end = 1e-5;

    VecX init_delta(6);
    for (int i = 0; i < 6; ++i) {
        init_delta[i] = rng.gauss(0.0, 1.0);
    }
    const Image d_init = decoder.decode(init_delta, truth.psi, truth.jaw_pose(setup.head));
    const double init_l1 = displacement_l1(d_init);
    REQUIRE(init_l1 > 1e-4);

    config.weights.regD = 1e7;
    config.weights.phoD = 0.0;
    config.weights.mrf = 0.0;
    config.weights.sym = 0.0;
    const DetailFitResult heavy =
        fit_detail(setup.scene, truth, decoder, obs, extractor, config, &init_delta);
    CHECK_FALSE(heavy.aborted);
    CHECK(displacement_l1(heavy.displacement) < 0.05 * init_l1);
}

TEST_CASE("detail round trip recovers most of the detail photometric error") {
    ToySetup setup(27, 64, 32);
    Rng rng(28);
    LatentCode truth = fftest::random_ground_truth(setup.scene, rng, 6);
    truth.lighting.coefficients.segment<3>(9).setConstant(0.8); // strong oblique light

    DecoderSpec spec;
    spec.latent_dim = 6;
    spec.psi_dim = setup.head.expression_dim();
    spec.uv_size = 32;
    spec.base_size = 8;
    spec.channels = {6, 4};
    const DetailDecoder decoder = DetailDecoder::seeded(spec, 101);

    // Target rendered with a known detail code through the same decoder.
    VecX delta_star(6);
    for (int i = 0; i < 6; ++i) {
        delta_star[i] = rng.gauss(0.0, 1.2);
    }
    const CoarseRender coarse = render_coarse(setup.scene, truth);
    const DetailRender target = render_detail(setup.scene, truth, coarse, decoder, delta_star);
    FitObservation obs;
    obs.image = target.image;
    obs.landmarks = coarse.landmarks2d;
    obs.mask = coverage_mask(coarse.frags);

    const double initial_pho = photometric_loss(obs.image, coarse.image, obs.mask);

    HogFeatureExtractor extractor;
    FitConfig config = quick_config();
    config.detail_iterations = 250;
    config.weights.mrf = 0.0; // keep the unit test fast
    const DetailFitResult fit = fit_detail(setup.scene, truth, decoder, obs, extractor, config);
    CHECK_FALSE(fit.aborted);

    const DetailRender refit =
        render_detail(setup.scene, truth, coarse, decoder, fit.delta);
    const double final_pho = photometric_loss(obs.image, refit.image, obs.mask);
    CHECK(final_pho < 0.3 * initial_pho);
}

TEST_CASE("detail-consistency training disentangles the separable fixture") {
    ToySetup setup(51, 64, 32);
    fftest::SeparableDetailFixture fixture(setup, 52, /*subjects=*/2, /*expressions=*/6,
                                           /*held_out=*/1);

    DecoderSpec spec;
    spec.kind = DecoderSpec::Kind::linear;
    spec.latent_dim = 8;
    spec.psi_dim = setup.head.expression_dim();
    spec.uv_size = 32;
    const DetailDecoder init = DetailDecoder::seeded(spec, 53);
    HogFeatureExtractor extractor;

    TrainConfig config;
    config.iterations = 200;
    config.learning_rate = 1e-2;
    config.lr_end = 1e-3;
    config.delta_lr_scale = 10.0;
    config.weights.mrf = 0.0; // smoke-test speed; the acceptance run uses defaults

    config.weights.dc = 1.0;
    const TrainResult with_dc =
        train_detail_decoder(setup.scene, fixture.train, init, extractor, config);
    CHECK_FALSE(with_dc.aborted);
    const double swap_with = fftest::held_out_swap_loss(setup, fixture, with_dc, extractor,
                                                        config.weights, config.mrf);

    config.weights.dc = 0.0;
    const TrainResult without_dc =
        train_detail_decoder(setup.scene, fixture.train, init, extractor, config);
    const double swap_without = fftest::held_out_swap_loss(setup, fixture, without_dc,
                                                           extractor, config.weights,
                                                           config.mrf);

    CHECK(swap_with * 1.5 < swap_without);

    // Cross-subject donors keep the wrong static detail, so they stay worse
    // than within-subject swaps on the disentangled decoder.
    double cross_sum = 0.0;
    int cross_count = 0;
    for (std::size_t s = 0; s < fixture.held_out.size(); ++s) {
        const std::size_t other = 1 - s;
        for (const DetailTrainingImage& held : fixture.held_out[s].images) {
            const CoarseRender coarse = render_coarse(setup.scene, held.code);
            for (const VecX& donor : with_dc.deltas[other]) {
                cross_sum += detail_consistency_loss(setup.scene, held.code, donor, coarse,
                                                     with_dc.decoder, held.image, held.mask,
                                                     extractor, config.weights, config.mrf)
                                 .total;
                ++cross_count;
            }
        }
    }
    const double cross = cross_sum / cross_count;
    CHECK(cross >= 2.0 * swap_with);
}

TEST_CASE("zero training iterations return the initial decoder unchanged") {
    ToySetup setup(61, 48, 24);
    fftest::SeparableDetailFixture fixture(setup, 62, 2, 2, 0);
    DecoderSpec spec;
    spec.kind = DecoderSpec::Kind::linear;
    spec.latent_dim = 4;
    spec.psi_dim = setup.head.expression_dim();
    spec.uv_size = 24;
    const DetailDecoder init(spec); // zero-initialized
    HogFeatureExtractor extractor;
    TrainConfig config;
    config.iterations = 0;
    const TrainResult result =
        train_detail_decoder(setup.scene, fixture.train, init, extractor, config);
    CHECK(result.decoder.parameters() == init.parameters());
    for (const auto& subject : result.deltas) {
        for (const VecX& delta : subject) {
            CHECK(delta.cwiseAbs().maxCoeff() == 0.0);
        }
    }
}

TEST_CASE("training rejects subjects with fewer than two images") {
    ToySetup setup(63, 48, 24);
    fftest::SeparableDetailFixture fixture(setup, 64, 2, 2, 1); // leaves 1 train image each
    DecoderSpec spec;
    spec.kind = DecoderSpec::Kind::linear;
    spec.latent_dim = 4;
    spec.psi_dim = setup.head.expression_dim();
    spec.uv_size = 24;
    HogFeatureExtractor extractor;
    CHECK_THROWS_AS(train_detail_decoder(setup.scene, fixture.train, DetailDecoder(spec),
                                         extractor, TrainConfig{}),
                    ValidationError);
}
