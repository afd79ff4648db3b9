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
#include "faceforge/io/obj.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "faceforge/core/error.hpp"

namespace faceforge {

void write_obj(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open for writing: " + path);
    }
    char buf[256];
    for (int i = 0; i < mesh.vertex_count(); ++i) {
        std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", mesh.vertices(i, 0),
                      mesh.vertices(i, 1), mesh.vertices(i, 2));
        out << buf;
    }
    if (mesh.has_uv()) {
        for (int i = 0; i < mesh.vertex_count(); ++i) {
            std::snprintf(buf, sizeof buf, "vt %.17g %.17g\n", mesh.uv(i, 0), mesh.uv(i, 1));
            out << buf;
        }
    }
    if (mesh.has_normals()) {
        for (int i = 0; i < mesh.vertex_count(); ++i) {
            std::snprintf(buf, sizeof buf, "vn %.17g %.17g %.17g\n", mesh.normals(i, 0),
                          mesh.normals(i, 1), mesh.normals(i, 2));
            out << buf;
        }
    }
    const bool vt = mesh.has_uv();
    const bool vn = mesh.has_normals();
    for (int f = 0; f < mesh.triangle_count(); ++f) {
        out << "f";
        for (int c = 0; c < 3; ++c) {
            const int idx = mesh.triangles(f, c) + 1;
            if (vt && vn) {
                out << ' ' << idx << '/' << idx << '/' << idx;
            } else if (vt) {
                out << ' ' << idx << '/' << idx;
            } else if (vn) {
                out << ' ' << idx << "//" << idx;
            } else {
                out << ' ' << idx;
            }
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

Mesh read_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open: " + path);
    }
    std::vector<Vec3> vertices;
    std::vector<Vec2> uvs;
    std::vector<Vec3> normals;
    std::vector<std::array<int, 3>> faces;

    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "v") {
            Vec3 v;
            ss >> v.x() >> v.y() >> v.z();
            vertices.push_back(v);
        } else if (tag == "vt") {
            Vec2 t;
            ss >> t.x() >> t.y();
            uvs.push_back(t);
        } else if (tag == "vn") {
            Vec3 n;
            ss >> n.x() >> n.y() >> n.z();
            normals.push_back(n);
        } else if (tag == "f") {
            std::vector<int> corner_ids;
            std::string corner;
            while (ss >> corner) {
                // take the position index before the first '/'
                const std::size_t slash = corner.find('/');
                const std::string head =
                    slash == std::string::npos ? corner : corner.substr(0, slash);
                int idx = std::stoi(head);
                if (idx < 0) {
                    idx = static_cast<int>(vertices.size()) + idx + 1;
                }
                corner_ids.push_back(idx - 1);
            }
            if (corner_ids.size() < 3) {
                throw IoError("face with fewer than 3 corners in: " + path);
            }
            for (std::size_t c = 1; c + 1 < corner_ids.size(); ++c) {
                faces.push_back({corner_ids[0], corner_ids[c], corner_ids[c + 1]});
            }
        }
    }

    Mesh mesh;
    mesh.vertices.resize(static_cast<Eigen::Index>(vertices.size()), 3);
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        mesh.vertices.row(static_cast<Eigen::Index>(i)) = vertices[i];
    }
    if (uvs.size() == vertices.size()) {
        mesh.uv.resize(static_cast<Eigen::Index>(uvs.size()), 2);
        for (std::size_t i = 0; i < uvs.size(); ++i) {
            mesh.uv.row(static_cast<Eigen::Index>(i)) = uvs[i];
        }
    }
    if (normals.size() == vertices.size()) {
        mesh.normals.resize(static_cast<Eigen::Index>(normals.size()), 3);
        for (std::size_t i = 0; i < normals.size(); ++i) {
            mesh.normals.row(static_cast<Eigen::Index>(i)) = normals[i];
        }
    }
    mesh.triangles.resize(static_cast<Eigen::Index>(faces.size()), 3);
    for (std::size_t f = 0; f < faces.size(); ++f) {
        for (int c = 0; c < 3; ++c) {
            const int idx = faces[f][static_cast<std::size_t>(c)];
            if (idx < 0 || idx >= static_cast<int>(vertices.size())) {
                throw IoError("face index out of range in: " + path);
            }
            mesh.triangles(static_cast<Eigen::Index>(f), c) = idx;
        }
    }
    return mesh;
}

} // namespace faceforge
