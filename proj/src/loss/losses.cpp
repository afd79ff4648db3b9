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
#include "faceforge/loss/losses.hpp"

#include <cmath>

#include "faceforge/core/error.hpp"

namespace faceforge {

namespace {

// L1 subgradient with sign(0) = 0.
inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

} // namespace

VecX default_landmark_weights() {
    VecX w = VecX::Ones(68);
    for (int i = 27; i <= 35; ++i) {
        w[i] = 1.5; // nose
    }
    for (int i = 48; i <= 67; ++i) {
        w[i] = 1.5; // mouth
    }
    w[30] = 3.0; // nose tip
    w[48] = 3.0; // mouth corners
    w[54] = 3.0;
    return w;
}

const VecX& LossWeights::landmark_table() const {
    if (landmark_weights.size() > 0) {
        return landmark_weights;
    }
    if (cached_table_.size() == 0) {
        cached_table_ = default_landmark_weights();
    }
    return cached_table_;
}

double LossReport::value(const std::string& name) const {
    for (const Term& t : terms) {
        if (t.name == name) {
            return t.value;
        }
    }
    throw Error("loss report has no term named " + name);
}

double landmark_loss(const Points2d& gt, const Points2d& projected, const VecX& weights,
                     Points2d* grad_projected) {
    if (gt.rows() != projected.rows() || weights.size() != gt.rows()) {
        throw DimensionError("landmark_loss: shape mismatch");
    }
    if (grad_projected != nullptr) {
        grad_projected->setZero(projected.rows(), 2);
    }
    double loss = 0.0;
    for (Eigen::Index i = 0; i < gt.rows(); ++i) {
        for (int c = 0; c < 2; ++c) {
            const double diff = gt(i, c) - projected(i, c);
            loss += weights[i] * std::abs(diff);
            if (grad_projected != nullptr) {
                (*grad_projected)(i, c) = -weights[i] * sgn(diff);
            }
        }
    }
    return loss;
}

double eye_closure_loss(const Points2d& gt, const Points2d& projected,
                        const std::vector<std::pair<int, int>>& eyelid_pairs,
                        Points2d* grad_projected) {
    if (gt.rows() != projected.rows()) {
        throw DimensionError("eye_closure_loss: shape mismatch");
    }
    if (grad_projected != nullptr) {
        grad_projected->setZero(projected.rows(), 2);
    }
    double loss = 0.0;
    for (const auto& [upper, lower] : eyelid_pairs) {
        for (int c = 0; c < 2; ++c) {
            const double gt_offset = gt(upper, c) - gt(lower, c);
            const double proj_offset = projected(upper, c) - projected(lower, c);
            const double diff = gt_offset - proj_offset;
            loss += std::abs(diff);
            if (grad_projected != nullptr) {
                const double s = sgn(diff);
                (*grad_projected)(upper, c) -= s;
                (*grad_projected)(lower, c) += s;
            }
        }
    }
    return loss;
}

double photometric_loss(const Image& image, const Image& rendered, const Image& mask,
                        Image* grad_rendered, double* normalized) {
    if (!image.same_shape(rendered) || mask.height() != image.height() ||
        mask.width() != image.width()) {
        throw DimensionError("photometric_loss: shape mismatch");
    }
    if (grad_rendered != nullptr) {
        *grad_rendered = Image(image.height(), image.width(), image.channels());
    }
    double loss = 0.0;
    double mask_area = 0.0;
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            const double m = mask.at(y, x, 0);
            if (m == 0.0) {
                continue;
            }
            mask_area += m;
            for (int c = 0; c < image.channels(); ++c) {
                const double diff = image.at(y, x, c) - rendered.at(y, x, c);
                loss += m * std::abs(diff);
                if (grad_rendered != nullptr) {
                    grad_rendered->at(y, x, c) = -m * sgn(diff);
                }
            }
        }
    }
    if (normalized != nullptr) {
        const double count = mask_area * image.channels();
        *normalized = count > 0.0 ? loss / count : 0.0;
    }
    return loss;
}

double identity_loss(const FeatureExtractor& extractor, const Image& image,
                     const Image& rendered, Image* grad_rendered) {
    const VecX a = extractor.embed(image);
    const VecX b = extractor.embed(rendered);
    const double na = a.norm();
    const double nb = b.norm();
    if (na < 1e-12 || nb < 1e-12) {
        throw ValidationError("identity_loss: zero embedding");
    }
    const double cosine = a.dot(b) / (na * nb);
    if (grad_rendered != nullptr) {
        // d(1 - cos)/db = -(a/(na nb) - cos * b/nb^2)
        const VecX grad_b = -(a / (na * nb) - cosine * b / (nb * nb));
        *grad_rendered = extractor.embed_backward(rendered, grad_b);
    }
    return 1.0 - cosine;
}

double squared_norm(const VecX& v, VecX* grad) {
    if (grad != nullptr) {
        *grad = 2.0 * v;
    }
    return v.squaredNorm();
}

double symmetry_loss(const Image& displacement, const Image& mask_uv,
                     Image* grad_displacement) {
    if (displacement.height() != displacement.width()) {
        throw DimensionError("symmetry_loss: displacement map must be square");
    }
    if (mask_uv.height() != displacement.height() || mask_uv.width() != displacement.width()) {
        throw DimensionError("symmetry_loss: mask shape mismatch");
    }
    if (grad_displacement != nullptr) {
        *grad_displacement = Image(displacement.height(), displacement.width(), 1);
    }
    const int d = displacement.height();
    double loss = 0.0;
    for (int y = 0; y < d; ++y) {
        for (int x = 0; x < d; ++x) {
            const double m = mask_uv.at(y, x, 0);
            if (m == 0.0) {
                continue;
            }
            const int xm = d - 1 - x;
            const double diff = displacement.at(y, x, 0) - displacement.at(y, xm, 0);
            loss += m * std::abs(diff);
            if (grad_displacement != nullptr) {
                const double s = m * sgn(diff);
                grad_displacement->at(y, x, 0) += s;
                grad_displacement->at(y, xm, 0) -= s;
            }
        }
    }
    return loss;
}

double displacement_l1(const Image& displacement, Image* grad_displacement) {
    if (grad_displacement != nullptr) {
        *grad_displacement =
            Image(displacement.height(), displacement.width(), displacement.channels());
    }
    double loss = 0.0;
    for (int y = 0; y < displacement.height(); ++y) {
        for (int x = 0; x < displacement.width(); ++x) {
            for (int c = 0; c < displacement.channels(); ++c) {
                const double v = displacement.at(y, x, c);
                loss += std::abs(v);
                if (grad_displacement != nullptr) {
                    grad_displacement->at(y, x, c) = sgn(v);
                }
            }
        }
    }
    return loss;
}

} // namespace faceforge
