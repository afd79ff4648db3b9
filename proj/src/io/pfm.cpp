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
#include "faceforge/io/pfm.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "faceforge/core/error.hpp"

namespace faceforge {

void write_pfm(const Image& image, const std::string& path) {
    if (image.channels() != 1 && image.channels() != 3) {
        throw IoError("PFM supports 1 or 3 channels, got " + std::to_string(image.channels()));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open for writing: " + path);
    }
    out << (image.channels() == 3 ? "PF" : "Pf") << "\n"
        << image.width() << " " << image.height() << "\n"
        << "-1.0\n"; // negative scale = little endian
    std::vector<float> row(static_cast<std::size_t>(image.width()) * image.channels());
    for (int y = image.height() - 1; y >= 0; --y) { // bottom-up
        for (int x = 0; x < image.width(); ++x) {
            for (int c = 0; c < image.channels(); ++c) {
                row[static_cast<std::size_t>(x) * image.channels() + c] =
                    static_cast<float>(image.at(y, x, c));
            }
        }
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(float)));
    }
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

Image read_pfm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open: " + path);
    }
    std::string magic;
    in >> magic;
    int channels = 0;
    if (magic == "PF") {
        channels = 3;
    } else if (magic == "Pf") {
        channels = 1;
    } else {
        throw IoError("not a PFM file: " + path);
    }
    int width = 0, height = 0;
    double scale = 0.0;
    in >> width >> height >> scale;
    if (width <= 0 || height <= 0 || scale == 0.0) {
        throw IoError("malformed PFM header: " + path);
    }
    in.get(); // single whitespace after the scale line
    if (scale > 0.0) {
        throw IoError("big-endian PFM is not supported: " + path);
    }
    Image image(height, width, channels);
    std::vector<float> row(static_cast<std::size_t>(width) * channels);
    for (int y = height - 1; y >= 0; --y) {
        in.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(float)));
        if (!in) {
            throw IoError("truncated PFM payload: " + path);
        }
        for (int x = 0; x < width; ++x) {
            for (int c = 0; c < channels; ++c) {
                image.at(y, x, c) = row[static_cast<std::size_t>(x) * channels + c];
            }
        }
    }
    return image;
}

} // namespace faceforge
