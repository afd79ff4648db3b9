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
#include "faceforge/loss/extractor.hpp"

#include <algorithm>
#include <cmath>

namespace faceforge {

namespace {

constexpr int kCell = HogFeatureExtractor::kCellSize;
constexpr int kBins = HogFeatureExtractor::kBins;

Image to_gray(const Image& image) {
    if (image.channels() == 1) {
        return image;
    }
    Image gray(image.height(), image.width(), 1);
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            double sum = 0.0;
            for (int c = 0; c < image.channels(); ++c) {
                sum += image.at(y, x, c);
            }
            gray.at(y, x, 0) = sum / image.channels();
        }
    }
    return gray;
}

void gray_backward(const Image& image, const Image& grad_gray, Image* grad_image) {
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            const double g = grad_gray.at(y, x, 0) / image.channels();
            for (int c = 0; c < image.channels(); ++c) {
                grad_image->at(y, x, c) += g;
            }
        }
    }
}

Image downsample2(const Image& gray) {
    const int h = gray.height() / 2;
    const int w = gray.width() / 2;
    Image out(h, w, 1);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            out.at(y, x, 0) = 0.25 * (gray.at(2 * y, 2 * x, 0) + gray.at(2 * y, 2 * x + 1, 0) +
                                      gray.at(2 * y + 1, 2 * x, 0) +
                                      gray.at(2 * y + 1, 2 * x + 1, 0));
        }
    }
    return out;
}

void downsample2_backward(const Image& grad_small, Image* grad_gray) {
    for (int y = 0; y < grad_small.height(); ++y) {
        for (int x = 0; x < grad_small.width(); ++x) {
            const double g = 0.25 * grad_small.at(y, x, 0);
            grad_gray->at(2 * y, 2 * x, 0) += g;
            grad_gray->at(2 * y, 2 * x + 1, 0) += g;
            grad_gray->at(2 * y + 1, 2 * x, 0) += g;
            grad_gray->at(2 * y + 1, 2 * x + 1, 0) += g;
        }
    }
}

// Central differences with replicated borders.
inline void pixel_gradient(const Image& gray, int y, int x, double* gx, double* gy) {
    const int xm = std::max(0, x - 1);
    const int xp = std::min(gray.width() - 1, x + 1);
    const int ym = std::max(0, y - 1);
    const int yp = std::min(gray.height() - 1, y + 1);
    *gx = 0.5 * (gray.at(y, xp, 0) - gray.at(y, xm, 0));
    *gy = 0.5 * (gray.at(yp, x, 0) - gray.at(ym, x, 0));
}

inline void pixel_gradient_backward(Image* grad_gray, int y, int x, double ggx, double ggy) {
    const int xm = std::max(0, x - 1);
    const int xp = std::min(grad_gray->width() - 1, x + 1);
    const int ym = std::max(0, y - 1);
    const int yp = std::min(grad_gray->height() - 1, y + 1);
    grad_gray->at(y, xp, 0) += 0.5 * ggx;
    grad_gray->at(y, xm, 0) -= 0.5 * ggx;
    grad_gray->at(yp, x, 0) += 0.5 * ggy;
    grad_gray->at(ym, x, 0) -= 0.5 * ggy;
}

FeatureGrid cell_histograms(const Image& gray, int scale_factor) {
    FeatureGrid grid;
    grid.rows = gray.height() / kCell;
    grid.cols = gray.width() / kCell;
    grid.channels = kBins;
    grid.cell_size = kCell * scale_factor;
    grid.data.assign(static_cast<std::size_t>(grid.rows) * grid.cols * kBins, 0.0);
    for (int r = 0; r < grid.rows; ++r) {
        for (int c = 0; c < grid.cols; ++c) {
            for (int dy = 0; dy < kCell; ++dy) {
                for (int dx = 0; dx < kCell; ++dx) {
                    const int y = r * kCell + dy;
                    const int x = c * kCell + dx;
                    double gx, gy;
                    pixel_gradient(gray, y, x, &gx, &gy);
                    const double mag = std::sqrt(gx * gx + gy * gy);
                    if (!(mag >= 1e-12)) { // also skips non-finite pixels
                        continue;
                    }
                    const double pos =
                        (std::atan2(gy, gx) + M_PI) * (kBins / (2.0 * M_PI));
                    const int bin = std::min(static_cast<int>(pos), kBins - 1);
                    const double frac = pos - bin;
                    grid.at(r, c, bin % kBins) += mag * (1.0 - frac);
                    grid.at(r, c, (bin + 1) % kBins) += mag * frac;
                }
            }
        }
    }
    return grid;
}

void cell_histograms_backward(const Image& gray, const FeatureGrid& grad_grid,
                              Image* grad_gray) {
    const int rows = gray.height() / kCell;
    const int cols = gray.width() / kCell;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            for (int dy = 0; dy < kCell; ++dy) {
                for (int dx = 0; dx < kCell; ++dx) {
                    const int y = r * kCell + dy;
                    const int x = c * kCell + dx;
                    double gx, gy;
                    pixel_gradient(gray, y, x, &gx, &gy);
                    const double mag2 = gx * gx + gy * gy;
                    const double mag = std::sqrt(mag2);
                    if (!(mag >= 1e-12)) { // also skips non-finite pixels
                        continue;
                    }
                    const double pos =
                        (std::atan2(gy, gx) + M_PI) * (kBins / (2.0 * M_PI));
                    const int bin = std::min(static_cast<int>(pos), kBins - 1);
                    const double frac = pos - bin;
                    const double g_lo = grad_grid.at(r, c, bin % kBins);
                    const double g_hi = grad_grid.at(r, c, (bin + 1) % kBins);

                    // value_lo = mag (1 - frac), value_hi = mag frac
                    const double dmag = g_lo * (1.0 - frac) + g_hi * frac;
                    const double dfrac = (g_hi - g_lo) * mag;
                    const double dpos = dfrac; // frac = pos - bin
                    const double dangle = dpos * (kBins / (2.0 * M_PI));
                    const double ggx = dmag * (gx / mag) + dangle * (-gy / mag2);
                    const double ggy = dmag * (gy / mag) + dangle * (gx / mag2);
                    pixel_gradient_backward(grad_gray, y, x, ggx, ggy);
                }
            }
        }
    }
}

// Embedding layout per scale: global mean histogram (kBins), then 2x2 block
// mean histograms (4 * kBins).
constexpr int kPerScale = kBins * 5;

void pool_cells(const FeatureGrid& grid, double* out) {
    std::fill(out, out + kPerScale, 0.0);
    if (grid.rows == 0 || grid.cols == 0) {
        return;
    }
    const double inv_total = 1.0 / (grid.rows * grid.cols);
    for (int r = 0; r < grid.rows; ++r) {
        for (int c = 0; c < grid.cols; ++c) {
            const int block = (r >= grid.rows / 2 ? 2 : 0) + (c >= grid.cols / 2 ? 1 : 0);
            for (int b = 0; b < kBins; ++b) {
                const double v = grid.at(r, c, b);
                out[b] += v * inv_total;
                out[kBins * (1 + block) + b] += v * inv_total;
            }
        }
    }
}

void pool_cells_backward(const FeatureGrid& grid, const double* grad_out,
                         FeatureGrid* grad_grid) {
    grad_grid->rows = grid.rows;
    grad_grid->cols = grid.cols;
    grad_grid->channels = grid.channels;
    grad_grid->cell_size = grid.cell_size;
    grad_grid->data.assign(grid.data.size(), 0.0);
    if (grid.rows == 0 || grid.cols == 0) {
        return;
    }
    const double inv_total = 1.0 / (grid.rows * grid.cols);
    for (int r = 0; r < grid.rows; ++r) {
        for (int c = 0; c < grid.cols; ++c) {
            const int block = (r >= grid.rows / 2 ? 2 : 0) + (c >= grid.cols / 2 ? 1 : 0);
            for (int b = 0; b < kBins; ++b) {
                grad_grid->at(r, c, b) +=
                    (grad_out[b] + grad_out[kBins * (1 + block) + b]) * inv_total;
            }
        }
    }
}

} // namespace

std::vector<FeatureGrid> HogFeatureExtractor::patch_features(const Image& image) const {
    const Image gray = to_gray(image);
    const Image half = downsample2(gray);
    std::vector<FeatureGrid> grids;
    grids.push_back(cell_histograms(gray, 1));
    grids.push_back(cell_histograms(half, 2)); // coarsest last
    return grids;
}

Image HogFeatureExtractor::patch_features_backward(
    const Image& image, const std::vector<FeatureGrid>& grad_grids) const {
    const Image gray = to_gray(image);
    const Image half = downsample2(gray);

    Image grad_gray(gray.height(), gray.width(), 1);
    if (!grad_grids.empty() && !grad_grids[0].data.empty()) {
        cell_histograms_backward(gray, grad_grids[0], &grad_gray);
    }
    if (grad_grids.size() > 1 && !grad_grids[1].data.empty()) {
        Image grad_half(half.height(), half.width(), 1);
        cell_histograms_backward(half, grad_grids[1], &grad_half);
        downsample2_backward(grad_half, &grad_gray);
    }
    Image grad_image(image.height(), image.width(), image.channels());
    gray_backward(image, grad_gray, &grad_image);
    return grad_image;
}

VecX HogFeatureExtractor::embed(const Image& image) const {
    const std::vector<FeatureGrid> grids = patch_features(image);
    VecX pooled(kPerScale * 2);
    pool_cells(grids[0], pooled.data());
    pool_cells(grids[1], pooled.data() + kPerScale);
    const VecX floored = pooled.array() + kEpsilonFloor;
    return floored / floored.norm();
}

Image HogFeatureExtractor::embed_backward(const Image& image,
                                          const VecX& grad_embedding) const {
    const std::vector<FeatureGrid> grids = patch_features(image);
    VecX pooled(kPerScale * 2);
    pool_cells(grids[0], pooled.data());
    pool_cells(grids[1], pooled.data() + kPerScale);
    const VecX floored = pooled.array() + kEpsilonFloor;
    const double norm = floored.norm();
    const VecX unit = floored / norm;
    const VecX grad_pooled = (grad_embedding - unit * unit.dot(grad_embedding)) / norm;

    std::vector<FeatureGrid> grad_grids(2);
    pool_cells_backward(grids[0], grad_pooled.data(), &grad_grids[0]);
    pool_cells_backward(grids[1], grad_pooled.data() + kPerScale, &grad_grids[1]);
    return patch_features_backward(image, grad_grids);
}

} // namespace faceforge
