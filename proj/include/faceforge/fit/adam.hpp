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

#include "faceforge/core/types.hpp"

namespace faceforge {

struct AdamConfig {
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// First-order adaptive-moment descent with bias correction.
class Adam {
public:
    Adam(const AdamConfig& config, Eigen::Index size)
        : config_(config), m_(VecX::Zero(size)), v_(VecX::Zero(size)) {}

    /// One descent step. `lr` overrides the configured rate when >= 0;
    /// `scale` (optional) multiplies the step per element.
    void step(VecX& params, const VecX& grad, double lr = -1.0,
              const VecX* scale = nullptr) {
        ++t_;
        const double rate = lr >= 0.0 ? lr : config_.learning_rate;
        m_ = config_.beta1 * m_ + (1.0 - config_.beta1) * grad;
        v_ = config_.beta2 * v_ + (1.0 - config_.beta2) * grad.cwiseProduct(grad);
        const double c1 = 1.0 - std::pow(config_.beta1, t_);
        const double c2 = 1.0 - std::pow(config_.beta2, t_);
        for (Eigen::Index i = 0; i < params.size(); ++i) {
            const double mhat = m_[i] / c1;
            const double vhat = v_[i] / c2;
            double step = rate * mhat / (std::sqrt(vhat) + config_.epsilon);
            if (scale != nullptr) {
                step *= (*scale)[i];
            }
            params[i] -= step;
        }
    }

    void reset() {
        m_.setZero();
        v_.setZero();
        t_ = 0;
    }

private:
    AdamConfig config_;
    VecX m_, v_;
    long t_ = 0;
};

} // namespace faceforge
