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
#include "faceforge/eval/mesh_distance.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "faceforge/core/error.hpp"
#include "faceforge/core/geometry.hpp"
#include "faceforge/core/parallel.hpp"

namespace faceforge {

namespace {

constexpr int kLeafSize = 4;

double box_distance2(const Vec3& p, const Vec3& lower, const Vec3& upper) {
    double d2 = 0.0;
    for (int c = 0; c < 3; ++c) {
        const double v = p[c] < lower[c] ? lower[c] - p[c] : (p[c] > upper[c] ? p[c] - upper[c] : 0.0);
        d2 += v * v;
    }
    return d2;
}

} // namespace

MeshDistanceIndex::MeshDistanceIndex(const Mesh& mesh) : mesh_(mesh) {
    if (mesh.triangle_count() == 0) {
        throw ValidationError("mesh distance index: empty mesh");
    }
    order_.resize(static_cast<std::size_t>(mesh.triangle_count()));
    std::iota(order_.begin(), order_.end(), 0);
    centroids_.resize(order_.size());
    for (int f = 0; f < mesh.triangle_count(); ++f) {
        Vec3 c = Vec3::Zero();
        for (int k = 0; k < 3; ++k) {
            c += Vec3(mesh.vertices.row(mesh.triangles(f, k)));
        }
        centroids_[static_cast<std::size_t>(f)] = c / 3.0;
    }
    nodes_.reserve(order_.size() * 2);
    build(0, static_cast<int>(order_.size()));
}

int MeshDistanceIndex::build(int begin, int end) {
    Node node;
    node.lower = Vec3::Constant(std::numeric_limits<double>::infinity());
    node.upper = -node.lower;
    for (int i = begin; i < end; ++i) {
        const int f = order_[static_cast<std::size_t>(i)];
        for (int k = 0; k < 3; ++k) {
            const Vec3 v = mesh_.vertices.row(mesh_.triangles(f, k));
            node.lower = node.lower.cwiseMin(v);
            node.upper = node.upper.cwiseMax(v);
        }
    }
    const int index = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    if (end - begin <= kLeafSize) {
        nodes_[static_cast<std::size_t>(index)].left = -1;
        nodes_[static_cast<std::size_t>(index)].begin = begin;
        nodes_[static_cast<std::size_t>(index)].end = end;
        return index;
    }
    // Median split along the widest centroid axis.
    Vec3 clo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 chi = -clo;
    for (int i = begin; i < end; ++i) {
        const Vec3& c = centroids_[static_cast<std::size_t>(order_[static_cast<std::size_t>(i)])];
        clo = clo.cwiseMin(c);
        chi = chi.cwiseMax(c);
    }
    int axis = 0;
    (chi - clo).maxCoeff(&axis);
    const int mid = (begin + end) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](int a, int b) {
                         const double ca = centroids_[static_cast<std::size_t>(a)][axis];
                         const double cb = centroids_[static_cast<std::size_t>(b)][axis];
                         return ca < cb || (ca == cb && a < b);
                     });
    const int left = build(begin, mid);
    const int right = build(mid, end);
    nodes_[static_cast<std::size_t>(index)].left = left;
    nodes_[static_cast<std::size_t>(index)].right = right;
    return index;
}

void MeshDistanceIndex::visit(const Vec3& query, int node_index, ClosestHit* best) const {
    const Node& node = nodes_[static_cast<std::size_t>(node_index)];
    if (box_distance2(query, node.lower, node.upper) >= best->distance * best->distance) {
        return;
    }
    if (node.left < 0) {
        for (int i = node.begin; i < node.end; ++i) {
            const int f = order_[static_cast<std::size_t>(i)];
            Vec3 bary;
            const Vec3 cp = closest_point_triangle(
                query, mesh_.vertices.row(mesh_.triangles(f, 0)),
                mesh_.vertices.row(mesh_.triangles(f, 1)),
                mesh_.vertices.row(mesh_.triangles(f, 2)), &bary);
            const double d = (cp - query).norm();
            if (d < best->distance) {
                best->distance = d;
                best->triangle = f;
                best->point = cp;
            }
        }
        return;
    }
    // Descend into the nearer child first.
    const double dl = box_distance2(query, nodes_[static_cast<std::size_t>(node.left)].lower,
                                    nodes_[static_cast<std::size_t>(node.left)].upper);
    const double dr = box_distance2(query, nodes_[static_cast<std::size_t>(node.right)].lower,
                                    nodes_[static_cast<std::size_t>(node.right)].upper);
    if (dl <= dr) {
        visit(query, node.left, best);
        visit(query, node.right, best);
    } else {
        visit(query, node.right, best);
        visit(query, node.left, best);
    }
}

MeshDistanceIndex::ClosestHit MeshDistanceIndex::closest(const Vec3& query) const {
    ClosestHit best;
    best.distance = std::numeric_limits<double>::infinity();
    visit(query, 0, &best);
    return best;
}

VecX scan_to_mesh_distance(const PointMatrix& scan_vertices, const Mesh& mesh) {
    const MeshDistanceIndex index(mesh);
    VecX distances(scan_vertices.rows());
    parallel_for(static_cast<std::size_t>(scan_vertices.rows()), [&](std::size_t i) {
        distances[static_cast<Eigen::Index>(i)] =
            index.closest(scan_vertices.row(static_cast<Eigen::Index>(i))).distance;
    });
    return distances;
}

VecX scan_to_mesh_distance_bruteforce(const PointMatrix& scan_vertices, const Mesh& mesh) {
    if (mesh.triangle_count() == 0) {
        throw ValidationError("scan_to_mesh_distance: empty mesh");
    }
    VecX distances(scan_vertices.rows());
    for (Eigen::Index i = 0; i < scan_vertices.rows(); ++i) {
        const Vec3 p = scan_vertices.row(i);
        double best = std::numeric_limits<double>::infinity();
        for (int f = 0; f < mesh.triangle_count(); ++f) {
            const Vec3 cp = closest_point_triangle(p, mesh.vertices.row(mesh.triangles(f, 0)),
                                                   mesh.vertices.row(mesh.triangles(f, 1)),
                                                   mesh.vertices.row(mesh.triangles(f, 2)));
            best = std::min(best, (cp - p).norm());
        }
        distances[i] = best;
    }
    return distances;
}

} // namespace faceforge
