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

#include <cstddef>
#include <vector>

#include "faceforge/core/error.hpp"

namespace faceforge {

/// Channel semantics carried by UV-space maps and rendered images.
enum class ChannelTag {
    none,
    albedo,
    position,
    normal,
    displacement,
    mask,
    shaded,
};

/**
 * Dense row-major (y, x, channel) raster of doubles. Used both for images
 * (origin top-left, pixel centers at integer + 0.5) and for UV maps, where
 * texel column maps to u and texel row to v with v = 1 at the top row.
 */
class Image {
public:
    Image() = default;
    Image(int height, int width, int channels, double fill = 0.0,
          ChannelTag tag = ChannelTag::none)
        : height_(height), width_(width), channels_(channels),
          data_(static_cast<std::size_t>(height) * width * channels, fill), tag_(tag) {}

    int height() const { return height_; }
    int width() const { return width_; }
    int channels() const { return channels_; }
    ChannelTag tag() const { return tag_; }
    void set_tag(ChannelTag tag) { tag_ = tag; }

    bool empty() const { return data_.empty(); }
    std::size_t size() const { return data_.size(); }

    double& at(int y, int x, int c = 0) {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }
    double at(int y, int x, int c = 0) const {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool same_shape(const Image& other) const {
        return height_ == other.height_ && width_ == other.width_ &&
               channels_ == other.channels_;
    }

    void require_shape(int h, int w, int c, const char* what) const {
        if (height_ != h || width_ != w || channels_ != c) {
            throw DimensionError(std::string(what) + ": unexpected image shape");
        }
    }

    /// Exact value equality over every sample (+0 and -0 compare equal).
    bool equals(const Image& other) const {
        if (!same_shape(other)) {
            return false;
        }
        for (std::size_t i = 0; i < data_.size(); ++i) {
            if (data_[i] != other.data_[i]) {
                return false;
            }
        }
        return true;
    }

private:
    int height_ = 0;
    int width_ = 0;
    int channels_ = 0;
    std::vector<double> data_;
    ChannelTag tag_ = ChannelTag::none;
};

} // namespace faceforge
