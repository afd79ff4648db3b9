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
#include "faceforge/io/asset_io.hpp"

#include <json.hpp>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>

#include "faceforge/io/container.hpp"

namespace faceforge {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kFormatVersion = 1;
constexpr const char* kMagic = "FFASSET1";

bool is_single_file(const std::string& path) {
    return path.size() > 4 && path.substr(path.size() - 4) == ".ffa";
}

std::vector<uint8_t> to_f32_bytes(const double* values, std::size_t count) {
    std::vector<uint8_t> bytes(count * 4);
    for (std::size_t i = 0; i < count; ++i) {
        const float f = static_cast<float>(values[i]);
        std::memcpy(bytes.data() + 4 * i, &f, 4);
    }
    return bytes;
}

std::vector<uint8_t> to_i32_bytes(const int* values, std::size_t count) {
    std::vector<uint8_t> bytes(count * 4);
    for (std::size_t i = 0; i < count; ++i) {
        const int32_t v = static_cast<int32_t>(values[i]);
        std::memcpy(bytes.data() + 4 * i, &v, 4);
    }
    return bytes;
}

std::vector<double> from_f32_bytes(const std::vector<uint8_t>& bytes) {
    std::vector<double> values(bytes.size() / 4);
    for (std::size_t i = 0; i < values.size(); ++i) {
        float f;
        std::memcpy(&f, bytes.data() + 4 * i, 4);
        values[i] = f;
    }
    return values;
}

std::vector<int32_t> from_i32_bytes(const std::vector<uint8_t>& bytes) {
    std::vector<int32_t> values(bytes.size() / 4);
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::memcpy(&values[i], bytes.data() + 4 * i, 4);
    }
    return values;
}

// Row-major serialization of a column-major Eigen matrix.
std::vector<uint8_t> matrix_to_bytes(const MatX& m) {
    std::vector<uint8_t> bytes(static_cast<std::size_t>(m.size()) * 4);
    std::size_t at = 0;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const float f = static_cast<float>(m(r, c));
            std::memcpy(bytes.data() + at, &f, 4);
            at += 4;
        }
    }
    return bytes;
}

MatX matrix_from_bytes(const std::vector<uint8_t>& bytes, Eigen::Index rows,
                       Eigen::Index cols) {
    MatX m(rows, cols);
    std::size_t at = 0;
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            float f;
            std::memcpy(&f, bytes.data() + at, 4);
            m(r, c) = f;
            at += 4;
        }
    }
    return m;
}

struct TensorSink {
    NamedChunks chunks;
    json table = json::object();

    void add(const std::string& name, const std::string& dtype, std::vector<Eigen::Index> shape,
             std::vector<uint8_t> bytes) {
        table[name] = {{"dtype", dtype}, {"shape", shape}, {"byte_length", bytes.size()},
                       {"crc32", payload_crc32(bytes)}};
        chunks.emplace_back(name, std::move(bytes));
    }
};

struct TensorSource {
    std::map<std::string, std::vector<uint8_t>> blobs;
    json table;

    const std::vector<uint8_t>& get(const std::string& name, const std::string& dtype,
                                    std::vector<Eigen::Index> shape) const {
        const auto it = blobs.find(name);
        if (it == blobs.end() || !table.contains(name)) {
            throw AssetChecksumError("missing tensor: " + name);
        }
        const json& entry = table.at(name);
        if (entry.at("dtype").get<std::string>() != dtype) {
            throw AssetChecksumError("tensor dtype mismatch: " + name);
        }
        std::size_t expect = 4;
        for (const Eigen::Index s : shape) {
            expect *= static_cast<std::size_t>(s);
        }
        if (it->second.size() != expect ||
            entry.at("byte_length").get<std::size_t>() != expect) {
            throw AssetChecksumError("tensor length mismatch (truncated blob?): " + name);
        }
        if (payload_crc32(it->second) != entry.at("crc32").get<uint32_t>()) {
            throw AssetChecksumError("tensor checksum failure: " + name);
        }
        return it->second;
    }
};

} // namespace

void save_model(const std::string& path, const ParametricHeadModel& head,
                const AlbedoModel& albedo) {
    head.validate();
    albedo.validate();

    const int n = head.vertex_count();
    const int m = head.triangle_count();
    const int k = head.joint_count();
    const int d = albedo.texture_size();

    TensorSink sink;
    sink.add("template", "f32", {n, 3},
             to_f32_bytes(head.template_vertices.data(), static_cast<std::size_t>(3) * n));
    sink.add("triangles", "i32", {m, 3},
             to_i32_bytes(head.triangles.data(), static_cast<std::size_t>(3) * m));
    sink.add("shape_basis", "f32", {3 * n, head.shape_dim()}, matrix_to_bytes(head.shape_basis));
    sink.add("expression_basis", "f32", {3 * n, head.expression_dim()},
             matrix_to_bytes(head.expression_basis));
    sink.add("pose_corrective_basis", "f32", {3 * n, 9 * k},
             matrix_to_bytes(head.pose_corrective_basis));
    sink.add("skinning_weights", "f32", {k, n}, matrix_to_bytes(head.skinning_weights));
    sink.add("joint_regressor", "f32", {k, n}, matrix_to_bytes(head.joint_regressor));
    sink.add("uv_coords", "f32", {n, 2},
             to_f32_bytes(head.uv_coords.data(), static_cast<std::size_t>(2) * n));

    const int lmk = static_cast<int>(head.landmark_embedding.size());
    std::vector<int> lmk_tris(static_cast<std::size_t>(lmk));
    std::vector<double> lmk_bary(static_cast<std::size_t>(lmk) * 3);
    for (int i = 0; i < lmk; ++i) {
        lmk_tris[static_cast<std::size_t>(i)] = head.landmark_embedding[i].triangle;
        for (int c = 0; c < 3; ++c) {
            lmk_bary[static_cast<std::size_t>(3 * i + c)] =
                head.landmark_embedding[i].barycentric[c];
        }
    }
    sink.add("landmark_triangles", "i32", {lmk}, to_i32_bytes(lmk_tris.data(), lmk_tris.size()));
    sink.add("landmark_barycentrics", "f32", {lmk, 3},
             to_f32_bytes(lmk_bary.data(), lmk_bary.size()));

    sink.add("albedo_mean", "f32", {d, d, 3},
             to_f32_bytes(albedo.mean.data().data(), albedo.mean.data().size()));
    std::vector<double> albedo_basis;
    albedo_basis.reserve(static_cast<std::size_t>(albedo.dim()) * d * d * 3);
    for (const Image& b : albedo.basis) {
        albedo_basis.insert(albedo_basis.end(), b.data().begin(), b.data().end());
    }
    sink.add("albedo_basis", "f32", {albedo.dim(), d, d, 3},
             to_f32_bytes(albedo_basis.data(), albedo_basis.size()));

    json manifest;
    manifest["format_version"] = kFormatVersion;
    manifest["model"] = {
        {"vertex_count", n},
        {"triangle_count", m},
        {"joint_count", k},
        {"shape_dim", head.shape_dim()},
        {"expression_dim", head.expression_dim()},
        {"albedo_dim", albedo.dim()},
        {"texture_size", d},
        {"landmark_count", lmk},
        {"joint_names", head.joint_names},
        {"kinematic_parents", head.kinematic_parents},
        {"jaw_joint", head.jaw_joint},
        {"eyelid_pairs", head.eyelid_pairs},
    };
    manifest["tensors"] = sink.table;
    const std::string manifest_text = manifest.dump(2);

    if (is_single_file(path)) {
        NamedChunks chunks;
        chunks.emplace_back("manifest.json",
                            std::vector<uint8_t>(manifest_text.begin(), manifest_text.end()));
        for (auto& chunk : sink.chunks) {
            chunks.push_back(std::move(chunk));
        }
        write_chunk_file(path, kMagic, chunks);
        return;
    }

    fs::create_directories(fs::path(path) / "blobs");
    std::ofstream mf(fs::path(path) / "manifest.json");
    if (!mf) {
        throw IoError("cannot write manifest in: " + path);
    }
    mf << manifest_text << "\n";
    for (const auto& [name, bytes] : sink.chunks) {
        std::ofstream bf(fs::path(path) / "blobs" / (name + ".bin"), std::ios::binary);
        if (!bf) {
            throw IoError("cannot write blob: " + name);
        }
        bf.write(reinterpret_cast<const char*>(bytes.data()),
                 static_cast<std::streamsize>(bytes.size()));
    }
}

ModelAssets load_model(const std::string& path) {
    TensorSource source;
    std::string manifest_text;

    if (is_single_file(path) || fs::is_regular_file(path)) {
        const NamedChunks chunks = read_chunk_file(path, kMagic);
        if (chunks.empty() || chunks.front().first != "manifest.json") {
            throw AssetChecksumError("container must start with manifest.json: " + path);
        }
        manifest_text.assign(chunks.front().second.begin(), chunks.front().second.end());
        for (std::size_t i = 1; i < chunks.size(); ++i) {
            source.blobs[chunks[i].first] = chunks[i].second;
        }
    } else {
        std::ifstream mf(fs::path(path) / "manifest.json");
        if (!mf) {
            throw IoError("cannot open manifest in: " + path);
        }
        manifest_text.assign(std::istreambuf_iterator<char>(mf),
                             std::istreambuf_iterator<char>());
        for (const auto& entry : fs::directory_iterator(fs::path(path) / "blobs")) {
            std::ifstream bf(entry.path(), std::ios::binary);
            std::vector<uint8_t> bytes(std::istreambuf_iterator<char>(bf), {});
            source.blobs[entry.path().stem().string()] = std::move(bytes);
        }
    }

    json manifest;
    try {
        manifest = json::parse(manifest_text);
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed manifest: ") + e.what());
    }
    if (!manifest.contains("format_version") ||
        manifest.at("format_version").get<int>() != kFormatVersion) {
        throw AssetVersionError("unsupported asset format version in: " + path);
    }
    source.table = manifest.at("tensors");
    const json& meta = manifest.at("model");
    const int n = meta.at("vertex_count").get<int>();
    const int m = meta.at("triangle_count").get<int>();
    const int k = meta.at("joint_count").get<int>();
    const int shape_dim = meta.at("shape_dim").get<int>();
    const int expr_dim = meta.at("expression_dim").get<int>();
    const int albedo_dim = meta.at("albedo_dim").get<int>();
    const int d = meta.at("texture_size").get<int>();
    const int lmk = meta.at("landmark_count").get<int>();

    ModelAssets assets;
    ParametricHeadModel& head = assets.head;

    {
        const std::vector<double> v = from_f32_bytes(source.get("template", "f32", {n, 3}));
        head.template_vertices.resize(n, 3);
        std::copy(v.begin(), v.end(), head.template_vertices.data());
    }
    {
        const std::vector<int32_t> t = from_i32_bytes(source.get("triangles", "i32", {m, 3}));
        head.triangles.resize(m, 3);
        std::copy(t.begin(), t.end(), head.triangles.data());
    }
    head.shape_basis = matrix_from_bytes(source.get("shape_basis", "f32", {3 * n, shape_dim}),
                                         3 * n, shape_dim);
    head.expression_basis = matrix_from_bytes(
        source.get("expression_basis", "f32", {3 * n, expr_dim}), 3 * n, expr_dim);
    head.pose_corrective_basis = matrix_from_bytes(
        source.get("pose_corrective_basis", "f32", {3 * n, 9 * k}), 3 * n, 9 * k);
    head.skinning_weights =
        matrix_from_bytes(source.get("skinning_weights", "f32", {k, n}), k, n);
    head.joint_regressor =
        matrix_from_bytes(source.get("joint_regressor", "f32", {k, n}), k, n);
    {
        const std::vector<double> v = from_f32_bytes(source.get("uv_coords", "f32", {n, 2}));
        head.uv_coords.resize(n, 2);
        std::copy(v.begin(), v.end(), head.uv_coords.data());
    }
    {
        const std::vector<int32_t> tris =
            from_i32_bytes(source.get("landmark_triangles", "i32", {lmk}));
        const std::vector<double> bary =
            from_f32_bytes(source.get("landmark_barycentrics", "f32", {lmk, 3}));
        head.landmark_embedding.resize(static_cast<std::size_t>(lmk));
        for (int i = 0; i < lmk; ++i) {
            head.landmark_embedding[static_cast<std::size_t>(i)].triangle = tris[i];
            head.landmark_embedding[static_cast<std::size_t>(i)].barycentric =
                Vec3(bary[3 * i], bary[3 * i + 1], bary[3 * i + 2]);
        }
    }
    head.kinematic_parents = meta.at("kinematic_parents").get<std::vector<int>>();
    head.joint_names = meta.at("joint_names").get<std::vector<std::string>>();
    head.jaw_joint = meta.at("jaw_joint").get<int>();
    head.eyelid_pairs = meta.at("eyelid_pairs").get<std::vector<std::pair<int, int>>>();

    AlbedoModel& albedo = assets.albedo;
    {
        const std::vector<double> v = from_f32_bytes(source.get("albedo_mean", "f32", {d, d, 3}));
        albedo.mean = Image(d, d, 3, 0.0, ChannelTag::albedo);
        albedo.mean.data() = v;
    }
    {
        const std::vector<double> v =
            from_f32_bytes(source.get("albedo_basis", "f32", {albedo_dim, d, d, 3}));
        const std::size_t per_map = static_cast<std::size_t>(d) * d * 3;
        for (int b = 0; b < albedo_dim; ++b) {
            Image map(d, d, 3);
            std::copy(v.begin() + b * per_map, v.begin() + (b + 1) * per_map,
                      map.data().begin());
            albedo.basis.push_back(std::move(map));
        }
    }

    head.validate();
    albedo.validate();
    return assets;
}

} // namespace faceforge
