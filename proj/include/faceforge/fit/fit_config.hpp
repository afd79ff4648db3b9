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

#include "faceforge/fit/adam.hpp"
#include "faceforge/loss/idmrf.hpp"
#include "faceforge/loss/losses.hpp"

namespace faceforge {

/// One optimization stage of the coarse fit.
struct StageConfig {
    std::string name = "full";
    int iterations = 0;
    double learning_rate = 1e-4;
    double lr_end = -1.0; // > 0 enables exponential decay to this rate
    bool use_landmarks = true;
    bool use_eye_closure = true;
    bool use_photometric = true;
    bool use_identity = true;
    bool use_regularizers = true;
    std::vector<std::string> freeze; // beta, psi, theta, alpha, lighting, camera

    double rate_at(int iteration) const {
        if (lr_end <= 0.0 || iterations <= 1) {
            return learning_rate;
        }
        const double f = static_cast<double>(iteration) / (iterations - 1);
        return learning_rate * std::pow(lr_end / learning_rate, f);
    }
};

struct FitConfig {
    std::vector<StageConfig> stages;
    LossWeights weights;
    IdMrfConfig mrf;
    AdamConfig adam;              // optimizer family defaults (rate 1e-4)
    uint64_t seed = 0;
    double translation_lr_scale = 50.0; // camera translation moves in pixels
    bool shared_beta = false;           // fit_multi: one shape vector for all images
    int detail_iterations = 1000;
    double detail_learning_rate = 2e-2;
    double detail_lr_end = 1e-3;

    /// Landmark warmup followed by the full objective.
    static FitConfig defaults() {
        FitConfig config;
        StageConfig warmup;
        warmup.name = "warmup";
        warmup.iterations = 500;
        warmup.learning_rate = 5e-2;
        warmup.lr_end = 1e-4;
        warmup.use_photometric = false;
        warmup.use_identity = false;
        warmup.freeze = {"alpha", "lighting"};
        StageConfig full;
        full.name = "full";
        full.iterations = 1500;
        full.learning_rate = 1e-2;
        full.lr_end = 5e-4;
        config.stages = {warmup, full};
        return config;
    }
};

/// Toy-scale decoder training configuration.
struct TrainConfig {
    int iterations = 400;
    double learning_rate = 5e-3;
    double lr_end = 5e-4;
    double delta_lr_scale = 10.0; // per-image codes move faster than weights
    LossWeights weights;
    IdMrfConfig mrf;
    AdamConfig adam;
    uint64_t seed = 0;
    bool tie_subject_deltas = false;
};

} // namespace faceforge
