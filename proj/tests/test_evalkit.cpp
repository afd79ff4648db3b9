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
#include "faceforge/core/geometry.hpp"
#include "faceforge/core/rng.hpp"
#include "faceforge/core/rotation.hpp"
#include "faceforge/core/toy_model.hpp"
#include "faceforge/eval/mesh_distance.hpp"
#include "faceforge/eval/metrics.hpp"
#include "faceforge/eval/rigid.hpp"

using namespace faceforge;

namespace {

Mesh random_blob_mesh(uint64_t seed, int subdivisions = 2) {
    Mesh mesh = make_icosphere(subdivisions);
    Rng rng(seed);
    for (int i = 0; i < mesh.vertex_count(); ++i) {
        const double r = 1.0 + 0.2 * rng.uniform();
        mesh.vertices.row(i) *= r;
    }
    return mesh;
}

PointMatrix random_points(uint64_t seed, int count, double radius) {
    Rng rng(seed);
    PointMatrix pts(count, 3);
    for (int i = 0; i < count; ++i) {
        for (int c = 0; c < 3; ++c) {
            pts(i, c) = rng.gauss(0.0, radius);
        }
    }
    return pts;
}

} // namespace

TEST_CASE("point-to-triangle distance primitives") {
    const Vec3 a(0, 0, 0), b(2, 0, 0), c(0, 2, 0);

    SUBCASE("perpendicular above the interior") {
        const Vec3 p(0.5, 0.5, 0.7);
        const Vec3 cp = closest_point_triangle(p, a, b, c);
        CHECK((cp - Vec3(0.5, 0.5, 0.0)).norm() < 1e-15);
        CHECK((p - cp).norm() == doctest::Approx(0.7).epsilon(1e-12));
    }
    SUBCASE("beyond an edge the distance is to the segment") {
        const Vec3 p(1.0, -1.5, 0.5); // below edge ab
        const Vec3 cp = closest_point_triangle(p, a, b, c);
        CHECK((cp - Vec3(1.0, 0.0, 0.0)).norm() < 1e-15);
        CHECK((p - cp).norm() == doctest::Approx(std::sqrt(1.5 * 1.5 + 0.25)).epsilon(1e-12));
    }
    SUBCASE("beyond a vertex the distance is to the vertex") {
        const Vec3 p(-1.0, -1.0, 0.0);
        const Vec3 cp = closest_point_triangle(p, a, b, c);
        CHECK((cp - a).norm() == 0.0);
    }
}

TEST_CASE("BVH distance equals brute force on random points") {
    const Mesh mesh = random_blob_mesh(3, 2); // 320 triangles
    REQUIRE(mesh.triangle_count() >= 200);
    const PointMatrix pts = random_points(5, 1000, 1.4);
    const VecX fast = scan_to_mesh_distance(pts, mesh);
    const VecX slow = scan_to_mesh_distance_bruteforce(pts, mesh);
    CHECK((fast - slow).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("scan-to-mesh distance is invariant under a shared rigid transform") {
    const Mesh mesh = random_blob_mesh(7, 1);
    const PointMatrix pts = random_points(9, 200, 1.3);
    const VecX base = scan_to_mesh_distance(pts, mesh);

    RigidTransform rigid;
    rigid.rotation = rodrigues(Vec3(0.4, -0.8, 0.3));
    rigid.translation = Vec3(4.0, -2.0, 7.0);
    Mesh moved = mesh;
    moved.vertices = rigid.apply(mesh.vertices);
    const VecX after = scan_to_mesh_distance(rigid.apply(pts), moved);
    CHECK((base - after).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("rigid_align_landmarks") {
    const PointMatrix source = random_points(11, 8, 1.0);

    SUBCASE("identical landmarks give the identity") {
        const RigidTransform t = rigid_align_landmarks(source, source);
        CHECK((t.rotation - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(t.translation.norm() < 1e-12);
        CHECK(t.scale == 1.0);
    }

    SUBCASE("recovers a constructed rotation and translation") {
        const Mat3 rot = rodrigues(Vec3(0.3, 1.1, -0.4));
        const Vec3 trans(0.5, -2.0, 3.0);
        PointMatrix target(source.rows(), 3);
        for (int i = 0; i < source.rows(); ++i) {
            target.row(i) = rot * Vec3(source.row(i)) + trans;
        }
        const RigidTransform t = rigid_align_landmarks(target, source);
        CHECK((t.rotation - rot).cwiseAbs().maxCoeff() < 1e-6);
        CHECK((t.translation - trans).norm() < 1e-6);
        t.validate();
    }

    SUBCASE("with scale enabled the Umeyama factor is recovered") {
        const Mat3 rot = rodrigues(Vec3(-0.2, 0.5, 0.9));
        PointMatrix target(source.rows(), 3);
        for (int i = 0; i < source.rows(); ++i) {
            target.row(i) = 1.7 * (rot * Vec3(source.row(i))) + Vec3(1, 2, 3);
        }
        const RigidTransform t = rigid_align_landmarks(target, source, true);
        CHECK(t.scale == doctest::Approx(1.7).epsilon(1e-9));
    }

    SUBCASE("collinear landmarks are rejected") {
        PointMatrix line(4, 3);
        line << 0, 0, 0, 1, 0, 0, 2, 0, 0, 3, 0, 0;
        CHECK_THROWS_AS(rigid_align_landmarks(line, line), ValidationError);
    }

    SUBCASE("beats a brute-force grid search under noise") {
        Rng rng(21);
        const Mat3 rot = rodrigues(Vec3(0.2, -0.3, 0.15));
        const Vec3 trans(0.4, 0.1, -0.6);
        PointMatrix target(source.rows(), 3);
        for (int i = 0; i < source.rows(); ++i) {
            target.row(i) =
                rot * Vec3(source.row(i)) + trans +
                Vec3(rng.gauss(0.0, 0.1), rng.gauss(0.0, 0.1), rng.gauss(0.0, 0.1));
        }
        const RigidTransform t = rigid_align_landmarks(target, source);
        const double rms_fit =
            std::sqrt((t.apply(source) - target).squaredNorm() / source.rows());

        // Exhaustive rotation grid with the optimal translation per sample.
        double rms_grid = std::numeric_limits<double>::infinity();
        const int steps = 14;
        for (int ix = 0; ix < steps; ++ix) {
            for (int iy = 0; iy < steps; ++iy) {
                for (int iz = 0; iz < steps; ++iz) {
                    const Vec3 aa((ix - steps / 2) * 0.08, (iy - steps / 2) * 0.08,
                                  (iz - steps / 2) * 0.08);
                    const Mat3 r = rodrigues(aa);
                    Vec3 mean_diff = Vec3::Zero();
                    for (int i = 0; i < source.rows(); ++i) {
                        mean_diff += Vec3(target.row(i)) - r * Vec3(source.row(i));
                    }
                    mean_diff /= source.rows();
                    double ss = 0.0;
                    for (int i = 0; i < source.rows(); ++i) {
                        ss += (Vec3(target.row(i)) - r * Vec3(source.row(i)) - mean_diff)
                                  .squaredNorm();
                    }
                    rms_grid = std::min(rms_grid, std::sqrt(ss / source.rows()));
                }
            }
        }
        CHECK(rms_fit <= rms_grid + 1e-3);
    }
}

TEST_CASE("re-aligning aligned data is a fixed point") {
    const Mesh mesh = random_blob_mesh(31, 1);
    PointMatrix landmarks = mesh.vertices.topRows(10);
    const RigidTransform t = rigid_align_landmarks(landmarks, landmarks);
    const RigidTransform t2 =
        rigid_align_landmarks(t.apply(landmarks), t.apply(landmarks));
    CHECK((t2.rotation - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(t2.translation.norm() < 1e-8);
}

TEST_CASE("icp refinement recovers a small misalignment") {
    const Mesh mesh = random_blob_mesh(41, 2);
    // Scan = mesh surface samples (vertices of a slightly refined copy).
    const PointMatrix scan = mesh.vertices;

    RigidTransform perturbed;
    perturbed.rotation = rodrigues(Vec3(0.03, -0.05, 0.02));
    perturbed.translation = Vec3(0.02, -0.03, 0.015);

    // Start from the perturbed pose and let ICP pull the mesh back onto the scan.
    const RigidTransform refined = icp_refine(scan, mesh, perturbed);
    Mesh aligned = mesh;
    aligned.vertices = refined.apply(mesh.vertices);
    const VecX distances = scan_to_mesh_distance(scan, aligned);
    CHECK(error_stats(distances).mean < 2e-4);
}

TEST_CASE("error_stats examples") {
    VecX d3(3);
    d3 << 1, 2, 3;
    const ErrorStats s = error_stats(d3);
    CHECK(s.median == 2.0);
    CHECK(s.mean == doctest::Approx(2.0));
    CHECK(s.stddev == doctest::Approx(0.8165).epsilon(1e-4));

    VecX single(1);
    single << 5;
    const ErrorStats s1 = error_stats(single);
    CHECK(s1.median == 5.0);
    CHECK(s1.mean == 5.0);
    CHECK(s1.stddev == 0.0);

    VecX shuffled(3);
    shuffled << 3, 1, 2;
    const ErrorStats s2 = error_stats(shuffled);
    CHECK(s2.median == s.median);
    CHECK(s2.mean == doctest::Approx(s.mean));

    VecX even(4);
    even << 4, 1, 3, 2;
    CHECK(error_stats(even).median == doctest::Approx(2.5)); // mean of the two middles
}

TEST_CASE("cumulative_curve") {
    VecX zeros = VecX::Zero(5);
    VecX thresholds(3);
    thresholds << 0.0, 1.0, 2.0;
    const VecX curve = cumulative_curve(zeros, thresholds);
    for (int i = 0; i < 3; ++i) {
        CHECK(curve[i] == 1.0);
    }

    VecX two(2);
    two << 1, 3;
    VecX t2(1);
    t2 << 2.0;
    CHECK(cumulative_curve(two, t2)[0] == 0.5);

    Rng rng(3);
    VecX random(50);
    for (int i = 0; i < 50; ++i) {
        random[i] = rng.uniform(0.0, 4.0);
    }
    VecX ts(9);
    for (int i = 0; i < 9; ++i) {
        ts[i] = 0.5 * i;
    }
    const VecX c = cumulative_curve(random, ts);
    for (int i = 1; i < 9; ++i) {
        CHECK(c[i] >= c[i - 1]);
    }
    VecX tmax(1);
    tmax << random.maxCoeff();
    CHECK(cumulative_curve(random, tmax)[0] == 1.0);
}

TEST_CASE("landmark consistency filter") {
    Rng rng(5);
    // Quarter-pixel coordinates stay exact under the +shift/-shift cancellation.
    Points2d first(68, 2);
    for (int i = 0; i < 68; ++i) {
        first(i, 0) = std::round(rng.uniform(0.0, 200.0) * 4.0) / 4.0;
        first(i, 1) = std::round(rng.uniform(0.0, 200.0) * 4.0) / 4.0;
    }
    const double bw = 200.0, bh = 160.0;
    const Vec2 shift(bw / 20.0, bh / 20.0);

    SUBCASE("exact re-detection is kept with score zero") {
        Points2d second = first;
        second.col(0).array() += shift.x();
        second.col(1).array() += shift.y();
        const LandmarkFilterResult r =
            landmark_consistency_filter(first, second, bw, bh, shift);
        CHECK(r.score == 0.0);
        CHECK(r.keep);
    }
    SUBCASE("a 0.2-bbox deviation is discarded at the default threshold") {
        Points2d second = first;
        second.col(0).array() += shift.x();
        second.col(1).array() += shift.y();
        second(10, 0) += 0.2 * bw;
        const LandmarkFilterResult r =
            landmark_consistency_filter(first, second, bw, bh, shift);
        CHECK(r.score == doctest::Approx(0.2).epsilon(1e-12));
        CHECK_FALSE(r.keep);
    }
    SUBCASE("scores just below the threshold are kept") {
        Points2d second = first;
        second.col(0).array() += shift.x();
        second.col(1).array() += shift.y();
        second(10, 0) += 0.099 * bw;
        CHECK(landmark_consistency_filter(first, second, bw, bh, shift).keep);
    }
}
