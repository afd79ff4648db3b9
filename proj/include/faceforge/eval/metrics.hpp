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

#include <vector>

#include "faceforge/core/types.hpp"

namespace faceforge {

/// Median (average of the two central order statistics for even counts),
/// mean and population (1/N) standard deviation.
struct ErrorStats {
    double median = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
};

ErrorStats error_stats(const VecX& distances);

/// Fraction of distances <= threshold, per threshold (a sampled CDF).
VecX cumulative_curve(const VecX& distances, const VecX& thresholds);

struct DistanceReport {
    VecX distances;
    ErrorStats stats;
    VecX curve_thresholds;
    VecX curve_fractions;
};

DistanceReport make_distance_report(const VecX& distances, const VecX& thresholds);

struct LandmarkFilterResult {
    double score = 0.0;
    bool keep = true;
};

/**
 * Landmark-consistency data filter: score = max_i of the bounding-box
 * normalized deviation between the second detection (shift removed) and the
 * first; images at or above the threshold (default 0.1) are discarded.
 */
LandmarkFilterResult landmark_consistency_filter(const Points2d& first,
                                                 const Points2d& second, double bbox_width,
                                                 double bbox_height, const Vec2& shift,
                                                 double threshold = 0.1);

} // namespace faceforge
