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
#include "faceforge/io/container.hpp"

#include <zlib.h>

#include <fstream>

#include "faceforge/core/error.hpp"

namespace faceforge {

namespace {

template <typename T>
void put_le(std::ofstream& out, T value) {
    uint8_t bytes[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        bytes[i] = static_cast<uint8_t>((value >> (8 * i)) & 0xff);
    }
    out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
bool get_le(std::ifstream& in, T* value) {
    uint8_t bytes[sizeof(T)];
    in.read(reinterpret_cast<char*>(bytes), sizeof(T));
    if (in.gcount() != static_cast<std::streamsize>(sizeof(T))) {
        return false;
    }
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        v |= static_cast<T>(bytes[i]) << (8 * i);
    }
    *value = v;
    return true;
}

} // namespace

uint32_t payload_crc32(const std::vector<uint8_t>& payload) {
    return static_cast<uint32_t>(
        crc32(0L, payload.empty() ? nullptr : payload.data(),
              static_cast<uInt>(payload.size())));
}

void write_chunk_file(const std::string& path, const std::string& magic,
                      const NamedChunks& chunks) {
    if (magic.size() != 8) {
        throw IoError("container magic must be 8 bytes");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open for writing: " + path);
    }
    out.write(magic.data(), 8);
    for (const auto& [name, payload] : chunks) {
        put_le<uint32_t>(out, static_cast<uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        put_le<uint64_t>(out, payload.size());
        out.write(reinterpret_cast<const char*>(payload.data()),
                  static_cast<std::streamsize>(payload.size()));
        put_le<uint32_t>(out, payload_crc32(payload));
    }
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

NamedChunks read_chunk_file(const std::string& path, const std::string& magic) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open: " + path);
    }
    char got_magic[8];
    in.read(got_magic, 8);
    if (in.gcount() != 8 || std::string(got_magic, 8) != magic) {
        throw AssetVersionError("unrecognized container magic in: " + path);
    }
    NamedChunks chunks;
    while (true) {
        uint32_t name_len = 0;
        if (!get_le(in, &name_len)) {
            break; // clean EOF
        }
        if (name_len > 4096) {
            throw AssetChecksumError("implausible chunk name length in: " + path);
        }
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        uint64_t payload_len = 0;
        if (in.gcount() != static_cast<std::streamsize>(name_len) ||
            !get_le(in, &payload_len)) {
            throw AssetChecksumError("truncated chunk header in: " + path);
        }
        std::vector<uint8_t> payload(payload_len);
        in.read(reinterpret_cast<char*>(payload.data()),
                static_cast<std::streamsize>(payload_len));
        uint32_t crc = 0;
        if (in.gcount() != static_cast<std::streamsize>(payload_len) || !get_le(in, &crc)) {
            throw AssetChecksumError("truncated chunk payload in: " + path);
        }
        if (crc != payload_crc32(payload)) {
            throw AssetChecksumError("CRC mismatch for chunk '" + name + "' in: " + path);
        }
        chunks.emplace_back(std::move(name), std::move(payload));
    }
    return chunks;
}

} // namespace faceforge
