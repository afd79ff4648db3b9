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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "faceforge/core/error.hpp"
#include "faceforge/core/head_model.hpp"
#include "faceforge/core/rng.hpp"
#include "faceforge/core/rotation.hpp"
#include "faceforge/core/toy_model.hpp"
#include "test_helpers.hpp"

using namespace faceforge;

namespace {

ToyModelSpec small_spec(uint64_t seed = 7) {
    ToyModelSpec spec;
    spec.seed = seed;
    spec.subdivisions = 2;
    spec.shape_dim = 4;
    spec.expression_dim = 3;
    spec.joint_count = 4;
    return spec;
}

VecX zeros(int n) { return VecX::Zero(n); }

} // namespace

TEST_CASE("rodrigues basics") {
    CHECK((rodrigues(Vec3::Zero()) - Mat3::Identity()).norm() == 0.0);

    const Mat3 rz = rodrigues(Vec3(0, 0, M_PI / 2));
    CHECK((rz * Vec3(1, 0, 0) - Vec3(0, 1, 0)).norm() < 1e-12);
    CHECK((rz * Vec3(0, 1, 0) - Vec3(-1, 0, 0)).norm() < 1e-12);

    // Orthonormality for random axes.
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const Vec3 aa(rng.gauss(), rng.gauss(), rng.gauss());
        const Mat3 r = rodrigues(aa);
        CHECK((r * r.transpose() - Mat3::Identity()).norm() < 1e-12);
        CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("rodrigues jacobian matches finite differences") {
    Rng rng(11);
    for (int trial = 0; trial < 12; ++trial) {
        Vec3 aa(rng.gauss(), rng.gauss(), rng.gauss());
        if (trial == 0) {
            aa = Vec3::Zero();
        } else if (trial == 1) {
            aa *= 1e-6; // near-identity branch
        }
        const auto jac = rodrigues_jacobian(aa);
        for (int i = 0; i < 3; ++i) {
            Vec3 ap = aa, am = aa;
            ap[i] += 1e-6;
            am[i] -= 1e-6;
            const Mat3 fd = (rodrigues(ap) - rodrigues(am)) / 2e-6;
            CHECK((jac[i] - fd).norm() < 1e-6);
        }
    }
}

TEST_CASE("rotate_towards is exact identity and matches rotation") {
    const Vec3 n(0.0, 0.0, 1.0);
    const Vec3 v(0.3, -0.2, 0.9);
    CHECK((rotate_towards(n, n, v) - v).norm() == 0.0);

    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        Vec3 a(rng.gauss(), rng.gauss(), rng.gauss());
        Vec3 b(rng.gauss(), rng.gauss(), rng.gauss());
        a.normalize();
        b = (0.3 * b + a).normalized(); // keep away from antiparallel
        // The rotation takes a to b.
        CHECK((rotate_towards(a, b, a) - b).norm() < 1e-12);
        // Lengths are preserved.
        const Vec3 w(rng.gauss(), rng.gauss(), rng.gauss());
        CHECK(rotate_towards(a, b, w).norm() == doctest::Approx(w.norm()).epsilon(1e-12));
    }
}

TEST_CASE("rotate_towards backward matches finite differences") {
    Rng rng(17);
    for (int trial = 0; trial < 8; ++trial) {
        Vec3 from(rng.gauss(), rng.gauss(), rng.gauss());
        from.normalize();
        Vec3 to = (from + 0.4 * Vec3(rng.gauss(), rng.gauss(), rng.gauss())).normalized();
        const Vec3 v(rng.gauss(), rng.gauss(), rng.gauss());
        const Vec3 g(rng.gauss(), rng.gauss(), rng.gauss());
        const Vec3 grad = rotate_towards_backward_to(from, to, v, g);
        for (int i = 0; i < 3; ++i) {
            Vec3 tp = to, tm = to;
            tp[i] += 1e-6;
            tm[i] -= 1e-6;
            const double fd =
                (g.dot(rotate_towards(from, tp, v)) - g.dot(rotate_towards(from, tm, v))) / 2e-6;
            CHECK(std::abs(grad[i] - fd) < 1e-6 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST_CASE("decode_geometry zero case reproduces the template exactly") {
    const ParametricHeadModel model = synthesize_toy_model(small_spec());
    const Mesh mesh = decode_geometry(model, zeros(model.shape_dim()), zeros(model.pose_dim()),
                                      zeros(model.expression_dim()));
    REQUIRE(mesh.vertices.rows() == model.template_vertices.rows());
    for (int i = 0; i < model.vertex_count(); ++i) {
        for (int c = 0; c < 3; ++c) {
            CHECK(mesh.vertices(i, c) == model.template_vertices(i, c));
        }
    }
}

TEST_CASE("single shape basis column moves only its vertex") {
    ParametricHeadModel model = synthesize_toy_model(small_spec());
    model.shape_basis = MatX::Zero(3 * model.vertex_count(), 1);
    model.shape_basis(0, 0) = 0.1; // +0.1 on vertex 0 x
    VecX beta(1);
    beta << 1.0;
    const Mesh mesh = decode_geometry(model, beta, zeros(model.pose_dim()),
                                      zeros(model.expression_dim()));
    CHECK(mesh.vertices(0, 0) ==
          doctest::Approx(model.template_vertices(0, 0) + 0.1).epsilon(1e-15));
    CHECK(mesh.vertices(0, 1) == model.template_vertices(0, 1));
    for (int i = 1; i < model.vertex_count(); ++i) {
        for (int c = 0; c < 3; ++c) {
            CHECK(mesh.vertices(i, c) == model.template_vertices(i, c));
        }
    }
}

TEST_CASE("jaw-weighted vertex rotates rigidly about the jaw joint") {
    ParametricHeadModel model = synthesize_toy_model(small_spec());
    model.pose_corrective_basis.setZero();
    const int v = 3;
    model.skinning_weights.col(v).setZero();
    model.skinning_weights(1, v) = 1.0; // pure jaw

    VecX theta = zeros(model.pose_dim());
    theta[3 + 3 * model.jaw_joint + 2] = M_PI / 2; // jaw about z

    const MatX joints = joint_locations(model, zeros(model.shape_dim()));
    const Vec3 jaw = joints.row(model.jaw_joint);
    const Mesh mesh = decode_geometry(model, zeros(model.shape_dim()), theta,
                                      zeros(model.expression_dim()));

    const Mat3 r = rodrigues(Vec3(0, 0, M_PI / 2));
    const Vec3 expect = r * (Vec3(model.template_vertices.row(v)) - jaw) + jaw;
    CHECK((Vec3(mesh.vertices.row(v)) - expect).norm() < 1e-14);
}

TEST_CASE("joint_locations: selector regressor picks the shaped vertex") {
    ParametricHeadModel model = synthesize_toy_model(small_spec());
    model.joint_regressor.setZero();
    model.joint_regressor(0, 5) = 1.0; // joint 0 = vertex 5
    for (int j = 1; j < model.joint_count(); ++j) {
        model.joint_regressor(j, 0) = 1.0;
    }
    VecX beta = VecX::Zero(model.shape_dim());
    beta[0] = 0.7;
    const MatX joints = joint_locations(model, beta);
    PointMatrix shaped = model.template_vertices;
    Eigen::Map<VecX>(shaped.data(), shaped.size()) += model.shape_basis * beta;
    CHECK((Vec3(joints.row(0)) - Vec3(shaped.row(5))).norm() == 0.0);
}

TEST_CASE("joint_locations: averaging regressor gives arithmetic means") {
    ParametricHeadModel model = synthesize_toy_model(small_spec());
    model.joint_regressor.setZero();
    model.joint_regressor(0, 1) = 0.5;
    model.joint_regressor(0, 2) = 0.5;
    for (int j = 1; j < model.joint_count(); ++j) {
        model.joint_regressor(j, 0) = 1.0;
    }
    const MatX joints = joint_locations(model, zeros(model.shape_dim()));
    const Vec3 expect = 0.5 * (Vec3(model.template_vertices.row(1)) +
                               Vec3(model.template_vertices.row(2)));
    CHECK((Vec3(joints.row(0)) - expect).norm() < 1e-15);
}

TEST_CASE("pose_correctives") {
    ParametricHeadModel model = synthesize_toy_model(small_spec());

    SUBCASE("zero pose gives zero offsets") {
        const PointMatrix off = pose_correctives(model, zeros(model.pose_dim()));
        CHECK(off.cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("single basis vector, hand-computed rotation residual") {
        model.pose_corrective_basis.setZero();
        // Basis responds to feature (joint 1, element r00 - 1) on vertex 2 y.
        const int feature = 9 * 1 + 0;
        model.pose_corrective_basis(3 * 2 + 1, feature) = 2.0;
        VecX theta = zeros(model.pose_dim());
        theta[3 + 3 * 1 + 2] = M_PI / 2; // joint 1 rotated about z: r00 = cos(pi/2) = 0
        const PointMatrix off = pose_correctives(model, theta);
        CHECK(off(2, 1) == doctest::Approx(2.0 * (std::cos(M_PI / 2) - 1.0)).epsilon(1e-12));
        // Everything else untouched.
        CHECK(off.cwiseAbs().sum() == doctest::Approx(std::abs(off(2, 1))).epsilon(1e-12));
    }

    SUBCASE("all-zero basis gives zero offsets for any pose") {
        model.pose_corrective_basis.setZero();
        Rng rng(2);
        VecX theta(model.pose_dim());
        for (int i = 0; i < theta.size(); ++i) {
            theta[i] = rng.gauss(0.0, 0.4);
        }
        CHECK(pose_correctives(model, theta).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("blend_skinning basics") {
    SUBCASE("zero pose is the identity") {
        const ParametricHeadModel model = synthesize_toy_model(small_spec());
        const MatX joints = joint_locations(model, zeros(model.shape_dim()));
        const PointMatrix out =
            blend_skinning(model.template_vertices, joints, zeros(model.pose_dim()),
                           model.skinning_weights, model.kinematic_parents);
        for (int i = 0; i < model.vertex_count(); ++i) {
            CHECK((Vec3(out.row(i)) - Vec3(model.template_vertices.row(i))).norm() == 0.0);
        }
    }

    SUBCASE("single joint at the origin, pi about x") {
        PointMatrix verts(2, 3);
        verts << 1.0, 2.0, 3.0, -0.5, 0.25, -1.0;
        MatX joints(1, 3);
        joints.setZero();
        MatX weights = MatX::Ones(1, 2);
        VecX theta = zeros(6);
        theta[3] = M_PI; // joint rotation about x
        const PointMatrix out = blend_skinning(verts, joints, theta, weights, {-1});
        CHECK(out(0, 0) == doctest::Approx(1.0));
        CHECK(out(0, 1) == doctest::Approx(-2.0));
        CHECK(out(0, 2) == doctest::Approx(-3.0));
        CHECK(out(1, 1) == doctest::Approx(-0.25));
    }

    SUBCASE("half/half blend is the midpoint of the two rigid images") {
        PointMatrix verts(1, 3);
        verts << 0.2, 0.4, 0.1;
        MatX joints(2, 3);
        joints << 0, 0, 0, 0.1, 0.0, 0.0;
        VecX theta = zeros(9);
        theta.segment<3>(6) = Vec3(0, 0, 1.2); // child joint rotated
        MatX w_blend(2, 1);
        w_blend << 0.5, 0.5;
        MatX w_child(2, 1);
        w_child << 0.0, 1.0;
        const std::vector<int> parents = {-1, 0};
        const PointMatrix blended = blend_skinning(verts, joints, theta, w_blend, parents);
        const PointMatrix child_img = blend_skinning(verts, joints, theta, w_child, parents);
        const Vec3 expect = 0.5 * (Vec3(verts.row(0)) + Vec3(child_img.row(0)));
        CHECK((Vec3(blended.row(0)) - expect).norm() < 1e-14);
    }

    SUBCASE("non-normalized weights are rejected") {
        PointMatrix verts(1, 3);
        verts << 0, 0, 0;
        MatX joints(1, 3);
        joints.setZero();
        MatX weights(1, 1);
        weights << 0.7;
        CHECK_THROWS_AS(blend_skinning(verts, joints, zeros(6), weights, {-1}), ValidationError);
    }
}

TEST_CASE("surface_landmarks") {
    Mesh mesh;
    mesh.vertices.resize(3, 3);
    mesh.vertices << 0, 0, 0, 1, 0, 0, 0, 1, 0;
    mesh.triangles.resize(1, 3);
    mesh.triangles << 0, 1, 2;

    SUBCASE("corner and centroid") {
        std::vector<SurfaceAnchor> anchors = {{0, Vec3(1, 0, 0)}, {0, Vec3(1, 1, 1) / 3.0}};
        const PointMatrix pts = surface_landmarks(mesh, anchors);
        CHECK((Vec3(pts.row(0)) - Vec3(0, 0, 0)).norm() == 0.0);
        CHECK((Vec3(pts.row(1)) - Vec3(1.0 / 3, 1.0 / 3, 0)).norm() < 1e-15);
    }

    SUBCASE("arbitrary barycentric triple matches direct interpolation") {
        const Vec3 bc(0.2, 0.5, 0.3);
        std::vector<SurfaceAnchor> anchors = {{0, bc}};
        const PointMatrix pts = surface_landmarks(mesh, anchors);
        Vec3 expect = Vec3::Zero();
        for (int c = 0; c < 3; ++c) {
            expect += bc[c] * Vec3(mesh.vertices.row(c));
        }
        CHECK((Vec3(pts.row(0)) - expect).norm() < 1e-15);
    }

    SUBCASE("out-of-range triangle throws") {
        std::vector<SurfaceAnchor> anchors = {{5, Vec3(1, 0, 0)}};
        CHECK_THROWS_AS(surface_landmarks(mesh, anchors), ValidationError);
    }
}

TEST_CASE("vertex_normals") {
    SUBCASE("axis-aligned quad in the z=0 plane") {
        PointMatrix verts(4, 3);
        verts << 0, 0, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0;
        TriangleMatrix tris(2, 3);
        tris << 0, 1, 2, 0, 2, 3;
        const PointMatrix normals = vertex_normals(verts, tris);
        for (int i = 0; i < 4; ++i) {
            CHECK((Vec3(normals.row(i)) - Vec3(0, 0, 1)).norm() < 1e-15);
        }
    }

    SUBCASE("regular tetrahedron normals point radially outward") {
        PointMatrix verts(4, 3);
        verts << 1, 1, 1, 1, -1, -1, -1, 1, -1, -1, -1, 1;
        TriangleMatrix tris(4, 3);
        tris << 0, 1, 2, 0, 3, 1, 0, 2, 3, 1, 3, 2;
        const PointMatrix normals = vertex_normals(verts, tris);
        for (int i = 0; i < 4; ++i) {
            const Vec3 radial = Vec3(verts.row(i)).normalized();
            CHECK((Vec3(normals.row(i)) - radial).norm() < 1e-12);
        }
    }

    SUBCASE("icosphere normals agree with positions within 5 degrees") {
        const Mesh sphere = make_icosphere(3);
        const PointMatrix normals = vertex_normals(sphere.vertices, sphere.triangles);
        double worst = 0.0;
        for (int i = 0; i < sphere.vertex_count(); ++i) {
            const double c = Vec3(normals.row(i)).dot(Vec3(sphere.vertices.row(i)).normalized());
            worst = std::max(worst, std::acos(std::min(1.0, c)));
        }
        CHECK(worst < 5.0 * M_PI / 180.0);
    }

    SUBCASE("isolated vertex is flagged") {
        PointMatrix verts(4, 3);
        verts << 0, 0, 0, 1, 0, 0, 0, 1, 0, 5, 5, 5;
        TriangleMatrix tris(1, 3);
        tris << 0, 1, 2;
        CHECK_THROWS_AS(vertex_normals(verts, tris), ValidationError);
    }
}

TEST_CASE("vertex_normals backward matches finite differences") {
    const Mesh sphere = make_icosphere(1);
    const Eigen::Index n = sphere.vertices.rows();
    Rng rng(23);
    PointMatrix grad_n(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (int c = 0; c < 3; ++c) {
            grad_n(i, c) = rng.gauss();
        }
    }
    VertexNormalsCache cache;
    vertex_normals(sphere.vertices, sphere.triangles, &cache);
    const PointMatrix grad_v =
        vertex_normals_backward(sphere.vertices, sphere.triangles, cache, grad_n);

    const auto objective = [&](const VecX& flat) {
        PointMatrix v = unflatten3(flat);
        const PointMatrix nrm = vertex_normals(v, sphere.triangles);
        return (nrm.array() * grad_n.array()).sum();
    };
    const VecX x0 = flatten(sphere.vertices);
    for (Eigen::Index i = 0; i < 24; ++i) {
        const Eigen::Index idx = (i * 7919) % x0.size();
        const double fd = fftest::central_diff(objective, x0, idx, 1e-6);
        const double an = grad_v(idx / 3, idx % 3);
        CHECK(std::abs(an - fd) < 1e-5 * std::max(1.0, std::abs(fd)));
    }
}

TEST_CASE("toy model determinism and invariants") {
    const ParametricHeadModel a = synthesize_toy_model(small_spec(42));
    const ParametricHeadModel b = synthesize_toy_model(small_spec(42));
    CHECK(a.template_vertices == b.template_vertices);
    CHECK(a.shape_basis == b.shape_basis);
    CHECK(a.skinning_weights == b.skinning_weights);
    CHECK(a.uv_coords == b.uv_coords);

    const ParametricHeadModel c = synthesize_toy_model(small_spec(43));
    CHECK(a.template_vertices != c.template_vertices);

    for (int i = 0; i < a.vertex_count(); ++i) {
        CHECK(std::abs(a.skinning_weights.col(i).sum() - 1.0) < 1e-6);
    }
    CHECK_NOTHROW(a.validate());
    CHECK(a.landmark_embedding.size() == 68);
}

TEST_CASE("decode is linear in beta and psi at rest pose") {
    const ParametricHeadModel model = synthesize_toy_model(small_spec());
    Rng rng(9);
    VecX b1(model.shape_dim()), b2(model.shape_dim());
    for (int i = 0; i < model.shape_dim(); ++i) {
        b1[i] = rng.gauss();
        b2[i] = rng.gauss();
    }
    const VecX theta = zeros(model.pose_dim());
    const VecX psi = zeros(model.expression_dim());
    const PointMatrix base = model.template_vertices;
    const PointMatrix d1 = decode_geometry(model, b1, theta, psi).vertices - base;
    const PointMatrix d2 = decode_geometry(model, b2, theta, psi).vertices - base;
    const PointMatrix d12 = decode_geometry(model, b1 + b2, theta, psi).vertices - base;
    CHECK((d12 - d1 - d2).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("global rotation equivariance about the root joint") {
    const ParametricHeadModel model = synthesize_toy_model(small_spec());
    Rng rng(31);
    VecX beta(model.shape_dim());
    VecX psi(model.expression_dim());
    for (int i = 0; i < beta.size(); ++i) beta[i] = rng.gauss(0.0, 0.5);
    for (int i = 0; i < psi.size(); ++i) psi[i] = rng.gauss(0.0, 0.5);
    VecX theta_rest = zeros(model.pose_dim());
    theta_rest[3 + 3 * model.jaw_joint] = 0.3;

    const Vec3 global_aa(0.2, -0.4, 0.1);
    VecX theta_rot = theta_rest;
    theta_rot.head<3>() = global_aa;

    const Mesh plain = decode_geometry(model, beta, theta_rest, psi);
    const Mesh rotated = decode_geometry(model, beta, theta_rot, psi);

    const MatX joints = joint_locations(model, beta);
    const Vec3 root = joints.row(0);
    const Mat3 r = rodrigues(global_aa);
    double worst = 0.0;
    for (int i = 0; i < model.vertex_count(); ++i) {
        const Vec3 expect = r * (Vec3(plain.vertices.row(i)) - root) + root;
        worst = std::max(worst, (Vec3(rotated.vertices.row(i)) - expect).norm());
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("surface_landmarks commute with rigid decode") {
    const ParametricHeadModel model = synthesize_toy_model(small_spec());
    const VecX beta = zeros(model.shape_dim());
    const VecX psi = zeros(model.expression_dim());
    VecX theta = zeros(model.pose_dim());
    const Mesh rest = decode_geometry(model, beta, theta, psi);
    const PointMatrix lmk_rest = surface_landmarks(rest, model.landmark_embedding);

    theta.head<3>() = Vec3(0.1, 0.6, -0.2);
    const Mesh rot = decode_geometry(model, beta, theta, psi);
    const PointMatrix lmk_rot = surface_landmarks(rot, model.landmark_embedding);

    const MatX joints = joint_locations(model, beta);
    const Vec3 root = joints.row(0);
    const Mat3 r = rodrigues(Vec3(0.1, 0.6, -0.2));
    for (int i = 0; i < 68; ++i) {
        const Vec3 expect = r * (Vec3(lmk_rest.row(i)) - root) + root;
        CHECK((Vec3(lmk_rot.row(i)) - expect).norm() < 1e-9);
    }
}

TEST_CASE("decode_geometry jacobians match finite differences") {
    const ParametricHeadModel model = synthesize_toy_model(small_spec());
    Rng rng(77);
    VecX beta(model.shape_dim()), psi(model.expression_dim()), theta(model.pose_dim());
    for (int i = 0; i < beta.size(); ++i) beta[i] = rng.gauss(0.0, 0.5);
    for (int i = 0; i < psi.size(); ++i) psi[i] = rng.gauss(0.0, 0.5);
    for (int i = 0; i < theta.size(); ++i) theta[i] = rng.gauss(0.0, 0.3);

    // Random cotangent on the vertices; compare VJP against FD of <g, decode>.
    PointMatrix cotangent(model.vertex_count(), 3);
    for (int i = 0; i < model.vertex_count(); ++i) {
        for (int c = 0; c < 3; ++c) {
            cotangent(i, c) = rng.gauss();
        }
    }
    GeometryCache cache;
    decode_geometry(model, beta, theta, psi, &cache);
    const GeometryGrads grads = decode_geometry_backward(model, cache, cotangent);

    const auto objective = [&](const VecX& b, const VecX& t, const VecX& p) {
        const Mesh m = decode_geometry(model, b, t, p);
        return (m.vertices.array() * cotangent.array()).sum();
    };

    const VecX fd_beta = fftest::numeric_gradient(
        [&](const VecX& x) { return objective(x, theta, psi); }, beta, 1e-5);
    const VecX fd_theta = fftest::numeric_gradient(
        [&](const VecX& x) { return objective(beta, x, psi); }, theta, 1e-5);
    const VecX fd_psi = fftest::numeric_gradient(
        [&](const VecX& x) { return objective(beta, theta, x); }, psi, 1e-5);

    CHECK(fftest::max_rel_error(grads.beta, fd_beta) < 1e-4);
    CHECK(fftest::max_rel_error(grads.theta, fd_theta) < 1e-4);
    CHECK(fftest::max_rel_error(grads.psi, fd_psi) < 1e-4);
}

TEST_CASE("decode_geometry rejects mismatched dimensions") {
    const ParametricHeadModel model = synthesize_toy_model(small_spec());
    CHECK_THROWS_AS(decode_geometry(model, zeros(model.shape_dim() + 1),
                                    zeros(model.pose_dim()), zeros(model.expression_dim())),
                    DimensionError);
    CHECK_THROWS_AS(decode_geometry(model, zeros(model.shape_dim()),
                                    zeros(model.pose_dim() - 3), zeros(model.expression_dim())),
                    DimensionError);
}
