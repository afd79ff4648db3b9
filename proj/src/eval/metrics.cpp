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
#include "faceforge/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "faceforge/core/error.hpp"

namespace faceforge {

ErrorStats error_stats(const VecX& distances) {
    if (distances.size() == 0) {
        throw ValidationError("error_stats: empty distance vector");
    }
    std::vector<double> sorted(distances.data(), distances.data() + distances.size());
    std::sort(sorted.begin(), sorted.end());
    ErrorStats stats;
    const std::size_t n = sorted.size();
    stats.median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    stats.mean = distances.mean();
    stats.stddev = std::sqrt((distances.array() - stats.mean).square().sum() /
                             static_cast<double>(n));
    return stats;
}

VecX cumulative_curve(const VecX& distances, const VecX& thresholds) {
    if (distances.size() == 0) {
        throw ValidationError("cumulative_curve: empty distance vector");
    }
    VecX fractions(thresholds.size());
    for (Eigen::Index t = 0; t < thresholds.size(); ++t) {
        Eigen::Index below = 0;
        for (Eigen::Index i = 0; i < distances.size(); ++i) {
            if (distances[i] <= thresholds[t]) {
                ++below;
            }
        }
        fractions[t] = static_cast<double>(below) / static_cast<double>(distances.size());
    }
    return fractions;
}

DistanceReport make_distance_report(const VecX& distances, const VecX& thresholds) {
    DistanceReport report;
    report.distances = distances;
    report.stats = error_stats(distances);
    report.curve_thresholds = thresholds;
    report.curve_fractions = cumulative_curve(distances, thresholds);
    return report;
}

LandmarkFilterResult landmark_consistency_filter(const Points2d& first,
                                                 const Points2d& second, double bbox_width,
                                                 double bbox_height, const Vec2& shift,
                                                 double threshold) {
    if (first.rows() != second.rows()) {
        throw DimensionError("landmark filter: landmark counts differ");
    }
    if (!(bbox_width > 0.0) || !(bbox_height > 0.0)) {
        throw ValidationError("landmark filter: bounding box must be positive");
    }
    LandmarkFilterResult result;
    for (Eigen::Index i = 0; i < first.rows(); ++i) {
        const double dx = (second(i, 0) - shift.x() - first(i, 0)) / bbox_width;
        const double dy = (second(i, 1) - shift.y() - first(i, 1)) / bbox_height;
        result.score = std::max(result.score, std::sqrt(dx * dx + dy * dy));
    }
    result.keep = result.score < threshold;
    return result;
}

} // namespace faceforge
