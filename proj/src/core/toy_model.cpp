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
#include "faceforge/core/toy_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "faceforge/core/error.hpp"
#include "faceforge/core/geometry.hpp"
#include "faceforge/core/rng.hpp"

namespace faceforge {

namespace {

struct SphereBuilder {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
    std::map<std::pair<int, int>, int> midpoint_cache;

    int midpoint(int i, int j) {
        const auto key = std::minmax(i, j);
        auto it = midpoint_cache.find(key);
        if (it != midpoint_cache.end()) {
            return it->second;
        }
        const Vec3 m = (vertices[i] + vertices[j]).normalized();
        vertices.push_back(m);
        const int idx = static_cast<int>(vertices.size()) - 1;
        midpoint_cache.emplace(key, idx);
        return idx;
    }
};

// Smooth radial bump field used for blendshapes and template shaping.
struct BumpField {
    struct Bump {
        Vec3 center;
        double sigma2;
        double amplitude;
    };
    std::vector<Bump> bumps;

    double eval(const Vec3& dir) const {
        double v = 0.0;
        for (const Bump& b : bumps) {
            v += b.amplitude * std::exp(-(dir - b.center).squaredNorm() / b.sigma2);
        }
        return v;
    }
};

BumpField random_field(Rng& rng, int n_bumps, double amp_lo, double amp_hi,
                       double sigma_lo, double sigma_hi, double front_bias) {
    BumpField field;
    for (int c = 0; c < n_bumps; ++c) {
        Vec3 dir(rng.gauss(), rng.gauss(), rng.gauss());
        dir.z() = std::abs(dir.z()) * front_bias + dir.z() * (1.0 - front_bias);
        dir.normalize();
        const double sigma = rng.uniform(sigma_lo, sigma_hi);
        const double amp = rng.uniform(amp_lo, amp_hi) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
        field.bumps.push_back({dir, sigma * sigma, amp});
    }
    return field;
}

// 68 iBUG-style landmark targets in a normalized face plane, then lifted
// onto the sphere front.
std::vector<Vec2> landmark_layout() {
    std::vector<Vec2> pts;
    pts.reserve(68);
    for (int i = 0; i <= 16; ++i) { // jaw arc
        const double t = static_cast<double>(i) / 16.0;
        pts.emplace_back(-0.55 * std::cos(t * M_PI), -0.15 - 0.5 * std::sin(t * M_PI));
    }
    for (int i = 0; i < 5; ++i) { // left brow
        const double t = static_cast<double>(i) / 4.0;
        pts.emplace_back(-0.42 + 0.28 * t, 0.33 + 0.06 * std::sin(t * M_PI));
    }
    for (int i = 0; i < 5; ++i) { // right brow
        const double t = static_cast<double>(i) / 4.0;
        pts.emplace_back(0.14 + 0.28 * t, 0.33 + 0.06 * std::sin(t * M_PI));
    }
    for (int i = 0; i < 4; ++i) { // nose bridge
        pts.emplace_back(0.0, 0.26 - 0.11 * i);
    }
    for (int i = 0; i < 5; ++i) { // nostril row
        pts.emplace_back(-0.12 + 0.06 * i, -0.10);
    }
    const auto eye = [&](double cx) {
        pts.emplace_back(cx - 0.10, 0.18);
        pts.emplace_back(cx - 0.05, 0.22);
        pts.emplace_back(cx + 0.03, 0.22);
        pts.emplace_back(cx + 0.08, 0.18);
        pts.emplace_back(cx + 0.03, 0.14);
        pts.emplace_back(cx - 0.05, 0.14);
    };
    eye(-0.26); // 36..41
    eye(0.26);  // 42..47
    for (int i = 0; i < 12; ++i) { // outer lips
        const double ang = M_PI - i * (2.0 * M_PI / 12.0);
        pts.emplace_back(0.22 * std::cos(ang), -0.34 + 0.10 * std::sin(ang));
    }
    for (int i = 0; i < 8; ++i) { // inner lips
        const double ang = M_PI - i * (2.0 * M_PI / 8.0);
        pts.emplace_back(0.12 * std::cos(ang), -0.34 + 0.045 * std::sin(ang));
    }
    return pts;
}

SurfaceAnchor anchor_near(const Mesh& mesh, const Vec3& query) {
    SurfaceAnchor best;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (int f = 0; f < mesh.triangle_count(); ++f) {
        Vec3 bary;
        const Vec3 cp = closest_point_triangle(
            query, mesh.vertices.row(mesh.triangles(f, 0)),
            mesh.vertices.row(mesh.triangles(f, 1)), mesh.vertices.row(mesh.triangles(f, 2)),
            &bary);
        const double d2 = (cp - query).squaredNorm();
        if (d2 < best_d2) {
            best_d2 = d2;
            best.triangle = f;
            best.barycentric = bary;
        }
    }
    // Clamp tiny negative round-off and renormalize.
    for (int c = 0; c < 3; ++c) {
        best.barycentric[c] = std::max(0.0, best.barycentric[c]);
    }
    best.barycentric /= best.barycentric.sum();
    return best;
}

} // namespace

Mesh make_icosphere(int subdivisions) {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    SphereBuilder b;
    b.vertices = {
        {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
        {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
        {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1},
    };
    for (Vec3& v : b.vertices) {
        v.normalize();
    }
    b.faces = {
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
        {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
        {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1},
    };
    for (int level = 0; level < subdivisions; ++level) {
        std::vector<std::array<int, 3>> next;
        next.reserve(b.faces.size() * 4);
        for (const auto& f : b.faces) {
            const int a = b.midpoint(f[0], f[1]);
            const int c = b.midpoint(f[1], f[2]);
            const int d = b.midpoint(f[2], f[0]);
            next.push_back({f[0], a, d});
            next.push_back({f[1], c, a});
            next.push_back({f[2], d, c});
            next.push_back({a, c, d});
        }
        b.faces = std::move(next);
    }
    Mesh mesh;
    mesh.vertices.resize(static_cast<Eigen::Index>(b.vertices.size()), 3);
    for (std::size_t i = 0; i < b.vertices.size(); ++i) {
        mesh.vertices.row(static_cast<Eigen::Index>(i)) = b.vertices[i];
    }
    mesh.triangles.resize(static_cast<Eigen::Index>(b.faces.size()), 3);
    for (std::size_t f = 0; f < b.faces.size(); ++f) {
        for (int c = 0; c < 3; ++c) {
            mesh.triangles(static_cast<Eigen::Index>(f), c) = b.faces[f][c];
        }
    }
    return mesh;
}

ParametricHeadModel synthesize_toy_model(const ToyModelSpec& spec) {
    if (spec.joint_count < 2) {
        throw ValidationError("toy model needs at least a root and a jaw joint");
    }
    Rng rng(spec.seed ^ 0x9e3779b97f4a7c15ull);
    const Mesh sphere = make_icosphere(spec.subdivisions);

    // Keep the front cap (z above the cut) as the "face".
    const double cut_z = -0.35;
    std::vector<int> remap(static_cast<std::size_t>(sphere.vertex_count()), -1);
    std::vector<std::array<int, 3>> kept_faces;
    for (int f = 0; f < sphere.triangle_count(); ++f) {
        Vec3 centroid = Vec3::Zero();
        for (int c = 0; c < 3; ++c) {
            centroid += Vec3(sphere.vertices.row(sphere.triangles(f, c)));
        }
        centroid /= 3.0;
        if (centroid.z() > cut_z) {
            kept_faces.push_back({sphere.triangles(f, 0), sphere.triangles(f, 1),
                                  sphere.triangles(f, 2)});
        }
    }
    int n = 0;
    for (auto& f : kept_faces) {
        for (int& v : f) {
            if (remap[static_cast<std::size_t>(v)] < 0) {
                remap[static_cast<std::size_t>(v)] = n++;
            }
            v = remap[static_cast<std::size_t>(v)];
        }
    }

    PointMatrix directions(n, 3); // unit-sphere direction per kept vertex
    for (int i = 0; i < sphere.vertex_count(); ++i) {
        const int d = remap[static_cast<std::size_t>(i)];
        if (d >= 0) {
            directions.row(d) = sphere.vertices.row(i);
        }
    }

    ParametricHeadModel model;
    model.triangles.resize(static_cast<Eigen::Index>(kept_faces.size()), 3);
    for (std::size_t f = 0; f < kept_faces.size(); ++f) {
        for (int c = 0; c < 3; ++c) {
            model.triangles(static_cast<Eigen::Index>(f), c) = kept_faces[f][c];
        }
    }

    // Template: ellipsoidal head at ~0.1 unit radius with smooth bumps.
    const BumpField shape_bumps = random_field(rng, 5, 0.002, 0.006, 0.35, 0.7, 0.6);
    model.template_vertices.resize(n, 3);
    for (int i = 0; i < n; ++i) {
        const Vec3 dir = directions.row(i);
        const double r = 1.0 + shape_bumps.eval(dir);
        model.template_vertices.row(i) =
            Vec3(0.095 * dir.x() * r, 0.115 * dir.y() * r, 0.100 * dir.z() * r);
    }

    // Disk unwrap around +z; orientation-preserving by construction.
    const double polar_max = std::acos(cut_z) + 0.12;
    model.uv_coords.resize(n, 2);
    for (int i = 0; i < n; ++i) {
        const Vec3 dir = directions.row(i);
        const double polar = std::acos(std::clamp(dir.z(), -1.0, 1.0));
        const double az = std::atan2(dir.y(), dir.x());
        const double rad = 0.47 * polar / polar_max;
        model.uv_coords(i, 0) = 0.5 + rad * std::cos(az);
        model.uv_coords(i, 1) = 0.5 + rad * std::sin(az);
    }

    // Blendshape bases: band-limited radial fields.
    const auto make_basis = [&](int count, double amp_lo, double amp_hi, double bias) {
        MatX basis(3 * n, count);
        for (int b = 0; b < count; ++b) {
            const BumpField field = random_field(rng, 3, amp_lo, amp_hi, 0.25, 0.6, bias);
            for (int i = 0; i < n; ++i) {
                const Vec3 dir = directions.row(i);
                const Vec3 offset = field.eval(dir) * dir;
                basis(3 * i + 0, b) = offset.x();
                basis(3 * i + 1, b) = offset.y();
                basis(3 * i + 2, b) = offset.z();
            }
        }
        return basis;
    };
    model.shape_basis = make_basis(spec.shape_dim, 0.004, 0.012, 0.3);
    model.expression_basis = make_basis(spec.expression_dim, 0.004, 0.010, 0.8);
    model.pose_corrective_basis = make_basis(9 * spec.joint_count, 0.0004, 0.0010, 0.3);

    // Kinematic chain: root(neck), jaw, then generic joints, all root children.
    const int k = spec.joint_count;
    model.kinematic_parents.assign(static_cast<std::size_t>(k), 0);
    model.kinematic_parents[0] = -1;
    model.joint_names = {"neck", "jaw"};
    model.jaw_joint = 1;
    std::vector<Vec3> joint_targets = {Vec3(0.0, -0.055, -0.01), Vec3(0.0, -0.045, 0.045)};
    for (int j = 2; j < k; ++j) {
        const double az = 2.399963 * j; // golden-angle spread over the front
        joint_targets.emplace_back(0.04 * std::cos(az), 0.03 * std::sin(az), 0.07);
        model.joint_names.push_back(j == 2 ? "eye_left" : (j == 3 ? "eye_right" : "joint_" + std::to_string(j)));
    }

    // Joint regressor: normalized Gaussian weighting of nearby vertices.
    model.joint_regressor = MatX::Zero(k, n);
    for (int j = 0; j < k; ++j) {
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d2 =
                (Vec3(model.template_vertices.row(i)) - joint_targets[static_cast<std::size_t>(j)])
                    .squaredNorm();
            const double w = std::exp(-d2 / (0.03 * 0.03));
            model.joint_regressor(j, i) = w;
            sum += w;
        }
        model.joint_regressor.row(j) /= sum;
    }

    // Skinning: jaw dominates the lower-front hemisphere, generic joints get
    // small local blobs, the root absorbs the remainder.
    model.skinning_weights = MatX::Zero(k, n);
    const auto sigmoid = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
    for (int i = 0; i < n; ++i) {
        const Vec3 p = model.template_vertices.row(i);
        double total = 0.0;
        const double jaw = 0.9 * sigmoid((-p.y() - 0.015) / 0.012) * sigmoid((p.z() - 0.005) / 0.02);
        model.skinning_weights(1, i) = jaw;
        total += jaw;
        for (int j = 2; j < k; ++j) {
            const double w =
                0.35 * std::exp(-(p - joint_targets[static_cast<std::size_t>(j)]).squaredNorm() /
                                (0.022 * 0.022));
            model.skinning_weights(j, i) = w;
            total += w;
        }
        if (total > 0.98) {
            for (int j = 1; j < k; ++j) {
                model.skinning_weights(j, i) *= 0.98 / total;
            }
            total = 0.98;
        }
        model.skinning_weights(0, i) = 1.0 - total;
    }

    // Landmark embedding on the decoded template surface.
    Mesh tmpl;
    tmpl.vertices = model.template_vertices;
    tmpl.triangles = model.triangles;
    for (const Vec2& fp : landmark_layout()) {
        Vec3 dir(fp.x() * 0.62, fp.y() * 0.70, 1.0);
        dir.normalize();
        model.landmark_embedding.push_back(anchor_near(tmpl, dir * 0.2));
    }
    model.eyelid_pairs = {{37, 41}, {38, 40}, {43, 47}, {44, 46}};

    model.validate();
    return model;
}

} // namespace faceforge
