// Copyright 2026 The patchiq authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <utility>
#include <vector>

namespace patchiq {

// Single-channel image, row-major, intensities nominally in [0,1].
struct Image {
    int height = 0;
    int width = 0;
    std::vector<float> pixels;              // height * width
    std::optional<double> pixel_size_um;    // physical size of one pixel

    Image() = default;
    Image(int h, int w, float fill = 0.0f)
        : height(h), width(w), pixels(static_cast<size_t>(h) * w, fill) {}

    float& at(int r, int c) { return pixels[static_cast<size_t>(r) * width + c]; }
    float at(int r, int c) const { return pixels[static_cast<size_t>(r) * width + c]; }
    size_t size() const { return pixels.size(); }
    bool empty() const { return pixels.empty(); }
};

constexpr int kPatchSize = 32;

// Non-overlapping row-major tiling of an image into patch_size x patch_size
// blocks. Patch p lives at data[p * patch_size * patch_size ...], row-major.
struct PatchGrid {
    int rows = 0;
    int cols = 0;
    int patch_size = kPatchSize;
    std::vector<float> data;    // rows * cols * patch_size^2
    bool cropped = false;       // remainder rows/cols were discarded

    int count() const { return rows * cols; }
    const float* patch(int p) const {
        return data.data() + static_cast<size_t>(p) * patch_size * patch_size;
    }
    float* patch(int p) {
        return data.data() + static_cast<size_t>(p) * patch_size * patch_size;
    }
    // Top-left pixel of patch p in the source image.
    std::pair<int, int> origin(int p) const {
        return {(p / cols) * patch_size, (p % cols) * patch_size};
    }
};

// Clamp negatives to zero, then min-max rescale to [0,1].
// Constant input maps to all zeros.
Image rescale_unit(const Image& image);

// Tile into 32x32 patches; a non-divisible remainder is cropped
// bottom/right with a warning. Throws DataError if either dimension < 32.
PatchGrid partition_patches(const Image& image, int patch_size = kPatchSize);

// Inverse of partition_patches over the covered region (ignores any crop).
Image reassemble_patches(const PatchGrid& grid);

} // namespace patchiq
