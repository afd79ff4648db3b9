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
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace faceforge {

/**
 * Length-prefixed chunk container: an 8-byte magic followed by chunks of
 * [u32 name length][name][u64 payload length][payload][u32 CRC32(payload)],
 * all little-endian. CRC mismatches and truncation raise AssetChecksumError.
 */
using NamedChunks = std::vector<std::pair<std::string, std::vector<uint8_t>>>;

void write_chunk_file(const std::string& path, const std::string& magic,
                      const NamedChunks& chunks);

NamedChunks read_chunk_file(const std::string& path, const std::string& magic);

uint32_t payload_crc32(const std::vector<uint8_t>& payload);

} // namespace faceforge
