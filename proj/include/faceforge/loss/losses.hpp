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

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "faceforge/core/types.hpp"
#include "faceforge/loss/extractor.hpp"
#include "faceforge/render/image.hpp"

namespace faceforge {

/// Loss term weights. Defaults follow the published training schedule;
/// the albedo regularizer weight is an artifact default (none is given).
struct LossWeights {
    double lmk = 1.0;
    double eye = 1.0;
    double pho = 2.0;
    double id = 0.2;
    double sc = 1.0;
    double beta = 1e-4;
    double psi = 1e-4;
    double alpha = 1e-4;
    double phoD = 2.0;
    double mrf = 5e-2;
    double sym = 5e-3;
    double dc = 1.0;
    double regD = 5e-3;
    VecX landmark_weights; // 68 per-landmark factors; empty = defaults

    const VecX& landmark_table() const;

private:
    mutable VecX cached_table_;
};

/// Mouth corners and nose tip x3, remaining mouth/nose x1.5, rest 1
/// (iBUG-68 indexing).
VecX default_landmark_weights();

/// Named loss values plus their weighted total.
struct LossReport {
    struct Term {
        std::string name;
        double value = 0.0;
        double weight = 0.0;
    };
    std::vector<Term> terms;
    std::map<std::string, double> aux; // diagnostics, excluded from the total

    double total() const {
        double sum = 0.0;
        for (const Term& t : terms) {
            sum += t.weight * t.value;
        }
        return sum;
    }
    double value(const std::string& name) const;
    void add(std::string name, double value, double weight) {
        terms.push_back({std::move(name), value, weight});
    }
};

/// Weighted L1 distance between ground-truth and projected landmarks.
double landmark_loss(const Points2d& gt, const Points2d& projected, const VecX& weights,
                     Points2d* grad_projected = nullptr);

/**
 * Translation-invariant eyelid term: L1 distance between ground-truth
 * landmark offsets and projected offsets over (upper, lower) pairs. The
 * projected offsets equal s*Pi(M_upper - M_lower) because the camera
 * translation cancels in the difference.
 */
double eye_closure_loss(const Points2d& gt, const Points2d& projected,
                        const std::vector<std::pair<int, int>>& eyelid_pairs,
                        Points2d* grad_projected = nullptr);

/// Sum of absolute masked differences; `normalized` (optional) reports the
/// same value divided by the masked sample count for logging.
double photometric_loss(const Image& image, const Image& rendered, const Image& mask,
                        Image* grad_rendered = nullptr, double* normalized = nullptr);

/// 1 - cosine similarity of the extractor embeddings; range [0, 2].
double identity_loss(const FeatureExtractor& extractor, const Image& image,
                     const Image& rendered, Image* grad_rendered = nullptr);

/// Squared L2 norm (shape/expression/albedo regularizers).
double squared_norm(const VecX& v, VecX* grad = nullptr);

/// L1 difference between a map and its horizontal flip inside a mask.
double symmetry_loss(const Image& displacement, const Image& mask_uv,
                     Image* grad_displacement = nullptr);

/// Entrywise L1 norm of the displacement map.
double displacement_l1(const Image& displacement, Image* grad_displacement = nullptr);

} // namespace faceforge
