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

#include <array>

#include "faceforge/core/types.hpp"

namespace faceforge {

Mat3 skew(const Vec3& v);

/// Axis-angle (radians, axis * angle) to rotation matrix.
Mat3 rodrigues(const Vec3& axis_angle);

/// dR/da_i for the three axis-angle components. Stable at the identity.
std::array<Mat3, 3> rodrigues_jacobian(const Vec3& axis_angle);

/// Pullback of a rotation-matrix gradient onto the axis-angle vector:
/// grad_a[i] = <grad_R, dR/da_i>_F.
Vec3 rodrigues_backward(const Vec3& axis_angle, const Mat3& grad_rotation);

/// Applies the shortest-arc rotation taking unit vector `from` to unit
/// vector `to` onto `v`. Exactly the identity when from == to; undefined
/// for antiparallel inputs (from . to == -1).
Vec3 rotate_towards(const Vec3& from, const Vec3& to, const Vec3& v);

/// Pullback of rotate_towards onto `to` ('from' and 'v' held fixed).
Vec3 rotate_towards_backward_to(const Vec3& from, const Vec3& to, const Vec3& v,
                                const Vec3& grad_out);

} // namespace faceforge
