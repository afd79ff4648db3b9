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
#include "faceforge/io/code_io.hpp"

#include <json.hpp>

#include <fstream>
#include <vector>

#include "faceforge/core/error.hpp"

namespace faceforge {

namespace {

using nlohmann::json;

json vec_to_json(const VecX& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

VecX vec_from_json(const json& j) {
    const std::vector<double> values = j.get<std::vector<double>>();
    return Eigen::Map<const VecX>(values.data(), static_cast<Eigen::Index>(values.size()));
}

} // namespace

void save_code(const LatentCode& code, const std::string& path) {
    json j;
    j["beta"] = vec_to_json(code.beta);
    j["psi"] = vec_to_json(code.psi);
    j["theta"] = vec_to_json(code.theta);
    j["alpha"] = vec_to_json(code.alpha);
    j["lighting"] = vec_to_json(code.lighting.coefficients);
    j["camera"] = {{"scale", code.camera.scale},
                   {"tx", code.camera.translation.x()},
                   {"ty", code.camera.translation.y()}};
    j["delta"] = vec_to_json(code.delta);
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open for writing: " + path);
    }
    out << j.dump(2) << "\n";
}

LatentCode load_code(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open: " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed code file: ") + e.what());
    }
    LatentCode code;
    code.beta = vec_from_json(j.at("beta"));
    code.psi = vec_from_json(j.at("psi"));
    code.theta = vec_from_json(j.at("theta"));
    code.alpha = vec_from_json(j.at("alpha"));
    code.lighting.coefficients = vec_from_json(j.at("lighting"));
    code.camera.scale = j.at("camera").at("scale").get<double>();
    code.camera.translation.x() = j.at("camera").at("tx").get<double>();
    code.camera.translation.y() = j.at("camera").at("ty").get<double>();
    code.delta = vec_from_json(j.at("delta"));
    return code;
}

Points2d read_landmarks_txt(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open: " + path);
    }
    std::vector<Vec2> pts;
    double x, y;
    while (in >> x >> y) {
        pts.emplace_back(x, y);
    }
    Points2d out(static_cast<Eigen::Index>(pts.size()), 2);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = pts[i];
    }
    return out;
}

void write_landmarks_txt(const Points2d& landmarks, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open for writing: " + path);
    }
    char buf[128];
    for (Eigen::Index i = 0; i < landmarks.rows(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", landmarks(i, 0), landmarks(i, 1));
        out << buf;
    }
}

PointMatrix read_points3_txt(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open: " + path);
    }
    std::vector<Vec3> pts;
    double x, y, z;
    while (in >> x >> y >> z) {
        pts.emplace_back(x, y, z);
    }
    PointMatrix out(static_cast<Eigen::Index>(pts.size()), 3);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = pts[i];
    }
    return out;
}

} // namespace faceforge
