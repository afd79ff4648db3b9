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
#include "faceforge/eval/rigid.hpp"

#include <cmath>

#include "faceforge/core/error.hpp"
#include "faceforge/eval/mesh_distance.hpp"

namespace faceforge {

PointMatrix RigidTransform::apply(const PointMatrix& points) const {
    PointMatrix out(points.rows(), 3);
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        out.row(i) = apply(Vec3(points.row(i)));
    }
    return out;
}

RigidTransform RigidTransform::compose(const RigidTransform& inner) const {
    // (this o inner)(p) = this(inner(p))
    RigidTransform out;
    out.rotation = rotation * inner.rotation;
    out.scale = scale * inner.scale;
    out.translation = scale * (rotation * inner.translation) + translation;
    return out;
}

void RigidTransform::validate() const {
    if ((rotation * rotation.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-9 ||
        std::abs(rotation.determinant() - 1.0) > 1e-9) {
        throw ValidationError("rigid transform rotation is not orthonormal");
    }
}

RigidTransform rigid_align_landmarks(const PointMatrix& target, const PointMatrix& source,
                                     bool with_scale) {
    if (target.rows() != source.rows()) {
        throw DimensionError("rigid_align: correspondence counts differ");
    }
    const Eigen::Index p = target.rows();
    if (p < 3) {
        throw ValidationError("rigid_align: need at least 3 correspondences");
    }
    const Vec3 target_mean = target.colwise().mean();
    const Vec3 source_mean = source.colwise().mean();
    MatX target_c = target.rowwise() - target_mean.transpose();
    MatX source_c = source.rowwise() - source_mean.transpose();

    // Collinearity check on the source configuration.
    Eigen::JacobiSVD<MatX> shape_svd(source_c, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VecX sv = shape_svd.singularValues();
    if (sv[1] <= 1e-9 * std::max(sv[0], 1e-300)) {
        throw ValidationError("rigid_align: degenerate (collinear) landmark configuration");
    }

    const Mat3 cross_cov = (source_c.transpose() * target_c) / static_cast<double>(p);
    Eigen::JacobiSVD<Mat3> svd(cross_cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 d = Mat3::Identity();
    if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0) {
        d(2, 2) = -1.0;
    }
    RigidTransform transform;
    transform.rotation = svd.matrixV() * d * svd.matrixU().transpose();
    if (with_scale) {
        const double source_var = source_c.squaredNorm() / static_cast<double>(p);
        transform.scale = (svd.singularValues().asDiagonal() * d).trace() / source_var;
    }
    transform.translation =
        target_mean - transform.scale * (transform.rotation * source_mean);
    return transform;
}

RigidTransform icp_refine(const PointMatrix& scan_points, const Mesh& mesh,
                          const RigidTransform& init, const IcpOptions& options) {
    RigidTransform current = init;
    const Eigen::Index n = scan_points.rows();
    if (n < 3) {
        throw ValidationError("icp_refine: need at least 3 scan points");
    }

    PointMatrix moved = current.apply(mesh.vertices);
    for (int iteration = 0; iteration < options.max_iterations; ++iteration) {
        Mesh posed = mesh;
        posed.vertices = moved;
        const MeshDistanceIndex index(posed);

        // Point-to-plane linearization: minimize sum ((R' q + t' - p) . n)^2
        // over a small rotation R' ~ I + [w]x applied to the current mesh.
        Eigen::Matrix<double, 6, 6> ata = Eigen::Matrix<double, 6, 6>::Zero();
        Eigen::Matrix<double, 6, 1> atb = Eigen::Matrix<double, 6, 1>::Zero();
        for (Eigen::Index i = 0; i < n; ++i) {
            const Vec3 p = scan_points.row(i);
            const MeshDistanceIndex::ClosestHit hit = index.closest(p);
            const int f = hit.triangle;
            const Vec3 a = posed.vertices.row(posed.triangles(f, 0));
            const Vec3 b = posed.vertices.row(posed.triangles(f, 1));
            const Vec3 c = posed.vertices.row(posed.triangles(f, 2));
            Vec3 normal = (b - a).cross(c - a);
            const double len = normal.norm();
            if (len < 1e-18) {
                continue;
            }
            normal /= len;
            const Vec3 q = hit.point;
            Eigen::Matrix<double, 6, 1> row;
            row.head<3>() = q.cross(normal);
            row.tail<3>() = normal;
            const double residual = (q - p).dot(normal);
            ata += row * row.transpose();
            atb += row * residual;
            // error decreases along -residual
        }
        ata += 1e-12 * Eigen::Matrix<double, 6, 6>::Identity();
        const Eigen::Matrix<double, 6, 1> delta = ata.ldlt().solve(-atb);
        const Vec3 w = delta.head<3>();
        const Vec3 t = delta.tail<3>();

        // Small-angle update promoted to a proper rotation.
        const double angle = w.norm();
        Mat3 rot = Mat3::Identity();
        if (angle > 0.0) {
            const Vec3 axis = w / angle;
            rot = Eigen::AngleAxisd(angle, axis).toRotationMatrix();
        }
        RigidTransform update;
        update.rotation = rot;
        update.translation = t;
        current = update.compose(current);

        const PointMatrix next = current.apply(mesh.vertices);
        const double rms = std::sqrt((next - moved).squaredNorm() /
                                     static_cast<double>(mesh.vertex_count()));
        moved = next;
        if (rms < options.convergence) {
            break;
        }
    }
    return current;
}

} // namespace faceforge
