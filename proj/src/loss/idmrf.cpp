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
#include "faceforge/loss/idmrf.hpp"

#include <cmath>
#include <iostream>

#include "faceforge/core/error.hpp"

namespace faceforge {

namespace {

constexpr double kNormEps = 1e-12;

struct UnitPatches {
    std::vector<VecX> unit;
    std::vector<double> norm;
};

UnitPatches normalize_patches(const std::vector<VecX>& patches) {
    UnitPatches out;
    out.unit.reserve(patches.size());
    out.norm.reserve(patches.size());
    for (const VecX& p : patches) {
        const double n = p.norm();
        out.norm.push_back(n);
        out.unit.push_back(p / (n + kNormEps));
    }
    return out;
}

} // namespace

double idmrf_from_patches(const std::vector<VecX>& generated,
                          const std::vector<VecX>& reference, const IdMrfConfig& config,
                          std::vector<VecX>* grad_generated) {
    const int nv = static_cast<int>(generated.size());
    const int ns = static_cast<int>(reference.size());
    if (nv == 0 || ns == 0) {
        throw ValidationError("idmrf: empty patch set");
    }
    const UnitPatches gen = normalize_patches(generated);
    const UnitPatches ref = normalize_patches(reference);

    // Cosine similarities and per-generated-patch top-2 over references.
    MatX mu(nv, ns);
    std::vector<int> best_ref(nv);
    std::vector<double> best_val(nv), second_val(nv);
    for (int v = 0; v < nv; ++v) {
        double b1 = -2.0, b2 = -2.0;
        int arg = 0;
        for (int s = 0; s < ns; ++s) {
            const double m = gen.unit[v].dot(ref.unit[s]);
            mu(v, s) = m;
            if (m > b1) {
                b2 = b1;
                b1 = m;
                arg = s;
            } else if (m > b2) {
                b2 = m;
            }
        }
        best_ref[v] = arg;
        best_val[v] = b1;
        second_val[v] = ns > 1 ? b2 : b1;
    }

    const double h = config.bandwidth;
    const double eps = config.epsilon;
    // log RS(v,s) = mu(v,s) / (h (maxexcl(v,s) + eps)); the exclusion of s
    // itself only matters when s is v's best match.
    const auto max_excl = [&](int v, int s) {
        return s == best_ref[v] ? second_val[v] : best_val[v];
    };

    MatX log_rs(nv, ns);
    for (int v = 0; v < nv; ++v) {
        for (int s = 0; s < ns; ++s) {
            log_rs(v, s) = mu(v, s) / (h * (max_excl(v, s) + eps));
        }
    }
    // Row-wise softmax normalization in log space for stability.
    VecX row_max(nv), log_z(nv);
    for (int v = 0; v < nv; ++v) {
        row_max[v] = log_rs.row(v).maxCoeff();
        double z = 0.0;
        for (int s = 0; s < ns; ++s) {
            z += std::exp(log_rs(v, s) - row_max[v]);
        }
        log_z[v] = row_max[v] + std::log(z);
    }

    // Best normalized similarity per reference patch.
    std::vector<int> winner(ns);
    VecX best_norm(ns);
    for (int s = 0; s < ns; ++s) {
        int arg = 0;
        double best = -std::numeric_limits<double>::infinity();
        for (int v = 0; v < nv; ++v) {
            const double val = log_rs(v, s) - log_z[v];
            if (val > best) {
                best = val;
                arg = v;
            }
        }
        winner[s] = arg;
        best_norm[s] = std::exp(best);
    }
    const double total = best_norm.sum();
    const double loss = -std::log(total / ns);

    if (grad_generated == nullptr) {
        return loss;
    }

    // dL = sum_s (-m_s / total) dlog m_s with
    // log m_s = log RS(w_s, s) - log Z(w_s).
    MatX coeff = MatX::Zero(nv, ns); // coefficients on dlog RS(v, s)
    VecX z_coeff = VecX::Zero(nv);   // accumulated -a_s per winner row
    for (int s = 0; s < ns; ++s) {
        const double a = -best_norm[s] / total;
        coeff(winner[s], s) += a;
        z_coeff[winner[s]] += a;
    }
    for (int v = 0; v < nv; ++v) {
        if (z_coeff[v] == 0.0) {
            continue;
        }
        for (int s = 0; s < ns; ++s) {
            coeff(v, s) -= z_coeff[v] * std::exp(log_rs(v, s) - log_z[v]);
        }
    }

    // dlog RS(v,s) = dmu(v,s)/(h(me+eps)) - mu(v,s) dme/(h(me+eps)^2),
    // where me = max_excl(v,s) = mu(v, r*) for the (fixed) argmax r*.
    MatX grad_mu = MatX::Zero(nv, ns);
    for (int v = 0; v < nv; ++v) {
        // Index attaining the second-best value, for the exclusion case.
        int second_arg = -1;
        if (ns > 1) {
            double b = -std::numeric_limits<double>::infinity();
            for (int s = 0; s < ns; ++s) {
                if (s != best_ref[v] && mu(v, s) > b) {
                    b = mu(v, s);
                    second_arg = s;
                }
            }
        }
        for (int s = 0; s < ns; ++s) {
            const double c = coeff(v, s);
            if (c == 0.0) {
                continue;
            }
            const double me = max_excl(v, s) + eps;
            grad_mu(v, s) += c / (h * me);
            const int excl_arg = (s == best_ref[v]) ? second_arg : best_ref[v];
            if (excl_arg >= 0) {
                grad_mu(v, excl_arg) -= c * mu(v, s) / (h * me * me);
            }
        }
    }

    grad_generated->assign(static_cast<std::size_t>(nv), VecX());
    for (int v = 0; v < nv; ++v) {
        VecX grad_unit = VecX::Zero(gen.unit[v].size());
        for (int s = 0; s < ns; ++s) {
            if (grad_mu(v, s) != 0.0) {
                grad_unit += grad_mu(v, s) * ref.unit[s];
            }
        }
        // unit = p / (|p| + eps)
        const double n = gen.norm[static_cast<std::size_t>(v)];
        if (n < 1e-10) {
            (*grad_generated)[static_cast<std::size_t>(v)] =
                VecX::Zero(gen.unit[v].size());
            continue;
        }
        const VecX& p = generated[static_cast<std::size_t>(v)];
        const double denom = n + kNormEps;
        (*grad_generated)[static_cast<std::size_t>(v)] =
            grad_unit / denom - p * (p.dot(grad_unit) / (n * denom * denom));
    }
    return loss;
}

namespace {

struct MaskedCells {
    std::vector<int> cell_index; // linear r*cols + c for kept cells
};

MaskedCells select_cells(const FeatureGrid& grid, const Image& mask, double threshold) {
    MaskedCells cells;
    for (int r = 0; r < grid.rows; ++r) {
        for (int c = 0; c < grid.cols; ++c) {
            double coverage = 0.0;
            int count = 0;
            for (int y = r * grid.cell_size; y < (r + 1) * grid.cell_size; ++y) {
                for (int x = c * grid.cell_size; x < (c + 1) * grid.cell_size; ++x) {
                    if (y < mask.height() && x < mask.width()) {
                        coverage += mask.at(y, x, 0);
                        ++count;
                    }
                }
            }
            if (count > 0 && coverage / count >= threshold) {
                cells.cell_index.push_back(r * grid.cols + c);
            }
        }
    }
    return cells;
}

std::vector<VecX> gather_cells(const FeatureGrid& grid, const MaskedCells& cells) {
    std::vector<VecX> out;
    out.reserve(cells.cell_index.size());
    for (const int idx : cells.cell_index) {
        VecX f(grid.channels);
        for (int ch = 0; ch < grid.channels; ++ch) {
            f[ch] = grid.data[static_cast<std::size_t>(idx) * grid.channels + ch];
        }
        out.push_back(std::move(f));
    }
    return out;
}

} // namespace

double idmrf_loss(const FeatureExtractor& extractor, const Image& image,
                  const Image& rendered, const Image& face_mask, const IdMrfConfig& config,
                  Image* grad_rendered) {
    if (extractor.scale_count() < 2) {
        throw ValidationError("idmrf_loss requires an extractor with at least 2 scales");
    }
    const std::vector<FeatureGrid> ref_grids = extractor.patch_features(image);
    const std::vector<FeatureGrid> gen_grids = extractor.patch_features(rendered);

    double loss = 0.0;
    std::vector<FeatureGrid> grad_grids(gen_grids.size());
    bool any_cells = false;
    for (std::size_t scale = 0; scale < gen_grids.size(); ++scale) {
        grad_grids[scale] = gen_grids[scale];
        std::fill(grad_grids[scale].data.begin(), grad_grids[scale].data.end(), 0.0);

        const MaskedCells cells =
            select_cells(gen_grids[scale], face_mask, config.mask_threshold);
        if (cells.cell_index.empty()) {
            continue;
        }
        any_cells = true;
        const std::vector<VecX> gen = gather_cells(gen_grids[scale], cells);
        const std::vector<VecX> ref = gather_cells(ref_grids[scale], cells);
        const double weight =
            scale + 1 == gen_grids.size() ? config.coarse_weight : config.fine_weight;

        std::vector<VecX> grad_gen;
        const double scale_loss = idmrf_from_patches(
            gen, ref, config, grad_rendered != nullptr ? &grad_gen : nullptr);
        loss += weight * scale_loss;
        if (grad_rendered != nullptr) {
            for (std::size_t i = 0; i < cells.cell_index.size(); ++i) {
                const int idx = cells.cell_index[i];
                for (int ch = 0; ch < gen_grids[scale].channels; ++ch) {
                    grad_grids[scale]
                        .data[static_cast<std::size_t>(idx) * gen_grids[scale].channels + ch] =
                        weight * grad_gen[i][ch];
                }
            }
        }
    }
    if (!any_cells) {
        std::cerr << "[faceforge] warning: idmrf_loss mask selects no cells; returning 0\n";
        if (grad_rendered != nullptr) {
            *grad_rendered = Image(rendered.height(), rendered.width(), rendered.channels());
        }
        return 0.0;
    }
    if (grad_rendered != nullptr) {
        *grad_rendered = extractor.patch_features_backward(rendered, grad_grids);
    }
    return loss;
}

} // namespace faceforge
