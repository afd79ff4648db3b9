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
#include "faceforge/core/head_model.hpp"

#include <cmath>
#include <string>

#include "faceforge/core/error.hpp"
#include "faceforge/core/rotation.hpp"

namespace faceforge {

namespace {

void check_dim(Eigen::Index got, Eigen::Index want, const char* what) {
    if (got != want) {
        throw DimensionError(std::string(what) + ": expected " + std::to_string(want) +
                             ", got " + std::to_string(got));
    }
}

// Row-major flattening of (R - I), matching the corrective basis layout.
void rotation_residual(const Mat3& r, double* out) {
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            out[3 * a + b] = r(a, b) - (a == b ? 1.0 : 0.0);
        }
    }
}

// Each joint contributes the local map L_j(x) = R_j (x - J_j) + J_j (a
// rotation about its rest location); the chain composes them parent-first.
// At R_j = I the local translation J_j - R_j J_j is exactly zero, so rest
// pose yields exact identity transforms.
PoseTransforms build_pose_transforms(const MatX& joints, const VecX& theta,
                                     const std::vector<int>& parents) {
    const int k = static_cast<int>(parents.size());
    PoseTransforms pose;
    pose.global_rot = rodrigues(theta.head<3>());
    pose.local_rot.resize(k);
    pose.skin_rot.resize(k);
    pose.skin_t.resize(k);
    for (int j = 0; j < k; ++j) {
        pose.local_rot[j] = rodrigues(theta.segment<3>(3 + 3 * j));
        const Vec3 joint = joints.row(j);
        if (parents[j] < 0) {
            const Mat3 rot = pose.global_rot * pose.local_rot[j];
            pose.skin_rot[j] = rot;
            pose.skin_t[j] = joint - rot * joint;
        } else {
            const int p = parents[j];
            if (p >= j) {
                throw ValidationError("kinematic_parents must be topologically ordered");
            }
            const Vec3 local_t = joint - pose.local_rot[j] * joint;
            pose.skin_rot[j] = pose.skin_rot[p] * pose.local_rot[j];
            pose.skin_t[j] = pose.skin_rot[p] * local_t + pose.skin_t[p];
        }
    }
    return pose;
}

// Delta form of blend skinning: v' = v + sum_j w_j ((R_j v + t_j) - v).
// Identical to the weighted sum because weights sum to 1, but the rest
// pose stays exact instead of picking up w_j * v rounding.
PointMatrix apply_skinning(const PointMatrix& vertices, const MatX& weights,
                           const PoseTransforms& pose) {
    const Eigen::Index n = vertices.rows();
    const int k = static_cast<int>(pose.skin_rot.size());
    PointMatrix out = vertices;
    for (int j = 0; j < k; ++j) {
        const Mat3& r = pose.skin_rot[j];
        const Vec3& t = pose.skin_t[j];
        for (Eigen::Index i = 0; i < n; ++i) {
            const double w = weights(j, i);
            if (w == 0.0) {
                continue;
            }
            const Vec3 v = vertices.row(i);
            out.row(i) += w * (r * v + t - v).transpose();
        }
    }
    return out;
}

} // namespace

void ParametricHeadModel::validate() const {
    const int n = vertex_count();
    const int k = joint_count();
    if (n == 0) {
        throw ValidationError("model has no vertices");
    }
    check_dim(shape_basis.rows(), 3 * n, "shape_basis rows");
    check_dim(expression_basis.rows(), 3 * n, "expression_basis rows");
    check_dim(pose_corrective_basis.rows(), 3 * n, "pose_corrective_basis rows");
    check_dim(pose_corrective_basis.cols(), 9 * k, "pose_corrective_basis cols");
    check_dim(skinning_weights.cols(), n, "skinning_weights cols");
    check_dim(joint_regressor.rows(), k, "joint_regressor rows");
    check_dim(joint_regressor.cols(), n, "joint_regressor cols");
    check_dim(static_cast<Eigen::Index>(kinematic_parents.size()), k, "kinematic_parents");
    check_dim(uv_coords.rows(), n, "uv_coords rows");

    for (int j = 0; j < k; ++j) {
        if (kinematic_parents[j] >= j || kinematic_parents[j] < -1) {
            throw ValidationError("kinematic_parents[" + std::to_string(j) +
                                  "] must precede the joint (root = -1)");
        }
    }
    if (jaw_joint < -1 || jaw_joint >= k) {
        throw ValidationError("jaw_joint out of range");
    }

    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int j = 0; j < k; ++j) {
            const double w = skinning_weights(j, i);
            if (w < 0.0) {
                throw ValidationError("skinning weight negative at vertex " + std::to_string(i));
            }
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-6) {
            throw ValidationError("skinning weights of vertex " + std::to_string(i) +
                                  " sum to " + std::to_string(sum));
        }
    }

    const int m = static_cast<int>(triangles.rows());
    for (int f = 0; f < m; ++f) {
        for (int c = 0; c < 3; ++c) {
            const int v = triangles(f, c);
            if (v < 0 || v >= n) {
                throw ValidationError("triangle index out of range at face " + std::to_string(f));
            }
        }
    }
    for (const SurfaceAnchor& a : landmark_embedding) {
        if (a.triangle < 0 || a.triangle >= m) {
            throw ValidationError("landmark anchor triangle out of range");
        }
        if (a.barycentric.minCoeff() < -1e-9 ||
            std::abs(a.barycentric.sum() - 1.0) > 1e-6) {
            throw ValidationError("landmark barycentric coordinates invalid");
        }
    }
    for (const auto& [upper, lower] : eyelid_pairs) {
        const int lmk = static_cast<int>(landmark_embedding.size());
        if (upper < 0 || upper >= lmk || lower < 0 || lower >= lmk) {
            throw ValidationError("eyelid pair index out of range");
        }
    }
}

MatX joint_locations(const ParametricHeadModel& model, const VecX& beta) {
    check_dim(beta.size(), model.shape_dim(), "beta");
    PointMatrix shaped = model.template_vertices;
    if (beta.size() > 0) {
        Eigen::Map<VecX>(shaped.data(), shaped.size()) += model.shape_basis * beta;
    }
    return model.joint_regressor * shaped;
}

VecX pose_feature(const ParametricHeadModel& model, const VecX& theta) {
    check_dim(theta.size(), model.pose_dim(), "theta");
    const int k = model.joint_count();
    VecX feat(9 * k);
    for (int j = 0; j < k; ++j) {
        const Mat3 r = rodrigues(theta.segment<3>(3 + 3 * j));
        rotation_residual(r, feat.data() + 9 * j);
    }
    return feat;
}

PointMatrix pose_correctives(const ParametricHeadModel& model, const VecX& theta) {
    const VecX feat = pose_feature(model, theta);
    return unflatten3(model.pose_corrective_basis * feat);
}

PointMatrix blend_skinning(const PointMatrix& vertices, const MatX& joints,
                           const VecX& theta, const MatX& weights,
                           const std::vector<int>& parents) {
    const int k = static_cast<int>(parents.size());
    check_dim(weights.rows(), k, "weights rows");
    check_dim(weights.cols(), vertices.rows(), "weights cols");
    check_dim(joints.rows(), k, "joints");
    check_dim(theta.size(), 3 * k + 3, "theta");
    for (Eigen::Index i = 0; i < weights.cols(); ++i) {
        if (std::abs(weights.col(i).sum() - 1.0) > 1e-6 || weights.col(i).minCoeff() < 0.0) {
            throw ValidationError("blend_skinning: weight column " + std::to_string(i) +
                                  " is not a convex combination");
        }
    }
    const PoseTransforms pose = build_pose_transforms(joints, theta, parents);
    return apply_skinning(vertices, weights, pose);
}

Mesh decode_geometry(const ParametricHeadModel& model, const VecX& beta,
                     const VecX& theta, const VecX& psi, GeometryCache* cache) {
    check_dim(beta.size(), model.shape_dim(), "beta");
    check_dim(psi.size(), model.expression_dim(), "psi");
    check_dim(theta.size(), model.pose_dim(), "theta");

    PointMatrix shaped = model.template_vertices;
    if (beta.size() > 0) {
        Eigen::Map<VecX>(shaped.data(), shaped.size()) += model.shape_basis * beta;
    }
    const MatX joints = model.joint_regressor * shaped;

    PointMatrix posed_rest = shaped;
    if (psi.size() > 0) {
        Eigen::Map<VecX>(posed_rest.data(), posed_rest.size()) += model.expression_basis * psi;
    }
    const VecX feat = pose_feature(model, theta);
    Eigen::Map<VecX>(posed_rest.data(), posed_rest.size()) += model.pose_corrective_basis * feat;

    const PoseTransforms pose = build_pose_transforms(joints, theta, model.kinematic_parents);

    Mesh mesh;
    mesh.vertices = apply_skinning(posed_rest, model.skinning_weights, pose);
    mesh.triangles = model.triangles;
    mesh.uv = model.uv_coords;

    if (cache != nullptr) {
        cache->beta = beta;
        cache->theta = theta;
        cache->psi = psi;
        cache->shaped = std::move(shaped);
        cache->posed_rest = std::move(posed_rest);
        cache->joints = joints;
        cache->pose = pose;
    }
    return mesh;
}

GeometryGrads decode_geometry_backward(const ParametricHeadModel& model,
                                       const GeometryCache& cache,
                                       const PointMatrix& grad_vertices) {
    const int k = model.joint_count();
    const Eigen::Index n = model.vertex_count();
    const PoseTransforms& pose = cache.pose;

    // Skinning (delta form): v'_i = v_i + sum_j w_ji ((R_j v_i + t_j) - v_i).
    PointMatrix grad_rest = grad_vertices;
    std::vector<Mat3> grad_skin_rot(k, Mat3::Zero());
    std::vector<Vec3> grad_skin_t(k, Vec3::Zero());
    for (int j = 0; j < k; ++j) {
        const Mat3 rt = pose.skin_rot[j].transpose();
        Mat3 grot = Mat3::Zero();
        Vec3 gt = Vec3::Zero();
        for (Eigen::Index i = 0; i < n; ++i) {
            const double w = model.skinning_weights(j, i);
            if (w == 0.0) {
                continue;
            }
            const Vec3 g = w * Vec3(grad_vertices.row(i));
            grot += g * Vec3(cache.posed_rest.row(i)).transpose();
            gt += g;
            grad_rest.row(i) += (rt * g - g).transpose();
        }
        grad_skin_rot[j] = grot;
        grad_skin_t[j] = gt;
    }

    // Chain rule through the kinematic chain, children before parents.
    // skin_j = skin_p o L_j with L_j = (R_j, J_j - R_j J_j).
    VecX grad_theta = VecX::Zero(model.pose_dim());
    std::vector<Mat3> grad_local_rot(k, Mat3::Zero());
    Mat3 grad_global_rot = Mat3::Zero();
    MatX grad_joints = MatX::Zero(k, 3);
    for (int j = k - 1; j >= 0; --j) {
        const int p = model.kinematic_parents[j];
        const Vec3 joint = cache.joints.row(j);
        if (p >= 0) {
            const Vec3 local_t = joint - pose.local_rot[j] * joint;
            grad_skin_rot[p] += grad_skin_rot[j] * pose.local_rot[j].transpose() +
                                grad_skin_t[j] * local_t.transpose();
            grad_skin_t[p] += grad_skin_t[j];
            const Vec3 gt_local = pose.skin_rot[p].transpose() * grad_skin_t[j];
            grad_local_rot[j] += pose.skin_rot[p].transpose() * grad_skin_rot[j] -
                                 gt_local * joint.transpose();
            grad_joints.row(j) += (gt_local - pose.local_rot[j].transpose() * gt_local).transpose();
        } else {
            // Root: skin = (G R_r, J_r - G R_r J_r) with G the global rotation.
            const Mat3 grad_rot = grad_skin_rot[j] - grad_skin_t[j] * joint.transpose();
            grad_joints.row(j) +=
                (grad_skin_t[j] - pose.skin_rot[j].transpose() * grad_skin_t[j]).transpose();
            grad_global_rot += grad_rot * pose.local_rot[j].transpose();
            grad_local_rot[j] += pose.global_rot.transpose() * grad_rot;
        }
    }

    // Pose correctives feed grad into the local rotations as well.
    const VecX grad_rest_flat = Eigen::Map<const VecX>(grad_rest.data(), grad_rest.size());
    const VecX grad_feat = model.pose_corrective_basis.transpose() * grad_rest_flat;
    for (int j = 0; j < k; ++j) {
        Mat3 from_feat;
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                from_feat(a, b) = grad_feat[9 * j + 3 * a + b];
            }
        }
        grad_local_rot[j] += from_feat;
        grad_theta.segment<3>(3 + 3 * j) =
            rodrigues_backward(cache.theta.segment<3>(3 + 3 * j), grad_local_rot[j]);
    }
    grad_theta.head<3>() = rodrigues_backward(cache.theta.head<3>(), grad_global_rot);

    GeometryGrads grads;
    grads.theta = grad_theta;
    grads.psi = model.expression_basis.transpose() * grad_rest_flat;

    // shaped enters both posed_rest (identity term) and the joint regressor.
    PointMatrix grad_shaped = grad_rest;
    const MatX regressor_t = model.joint_regressor.transpose(); // n x k
    grad_shaped += regressor_t * grad_joints;
    grads.beta = model.shape_basis.transpose() *
                 Eigen::Map<const VecX>(grad_shaped.data(), grad_shaped.size());
    return grads;
}

} // namespace faceforge
