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

#include "faceforge/core/head_model.hpp"

namespace faceforge {

struct ToyModelSpec {
    uint64_t seed = 0;
    int subdivisions = 3;  // icosphere refinement level
    int shape_dim = 8;
    int expression_dim = 6;
    int joint_count = 4;   // root, jaw, then generic joints
};

/**
 * Deterministic synthetic stand-in for licensed head-model assets: a cut
 * icosphere "face" at roughly metric head scale (~0.1 units radius) with
 * band-limited random blendshapes, a root/jaw kinematic chain with
 * lower-hemisphere jaw weighting, an orientation-preserving disk UV unwrap,
 * and a 68-point landmark embedding in the usual iBUG layout.
 *
 * The same spec always produces a bit-identical model.
 */
ParametricHeadModel synthesize_toy_model(const ToyModelSpec& spec);

/// Unit icosphere mesh (no cut); used by fixtures and tests.
Mesh make_icosphere(int subdivisions);

} // namespace faceforge
