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

#include "patchiq/image.hpp"

#include <algorithm>
#include <mutex>
#include <thread>

#include "patchiq/error.hpp"
#include "patchiq/util.hpp"

namespace patchiq {

namespace {
std::function<void(const std::string&)> g_warn_sink;
std::mutex g_warn_mutex;
} // namespace

void warn(const std::string& msg) {
    std::lock_guard<std::mutex> lock(g_warn_mutex);
    if (g_warn_sink) {
        g_warn_sink(msg);
    } else {
        fprintf(stderr, "[patchiq] warning: %s\n", msg.c_str());
    }
}

void set_warn_sink(std::function<void(const std::string&)> sink) {
    std::lock_guard<std::mutex> lock(g_warn_mutex);
    g_warn_sink = std::move(sink);
}

void parallel_for(int64_t n, int thread_count, const std::function<void(int64_t)>& fn) {
    if (n <= 0) return;
    if (thread_count <= 1 || n == 1) {
        for (int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const int workers = static_cast<int>(std::min<int64_t>(thread_count, n));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (int64_t i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

Image rescale_unit(const Image& image) {
    if (image.empty()) throw DataError("rescale_unit: empty image");
    Image out = image;
    for (auto& v : out.pixels) v = std::max(v, 0.0f);
    const auto [lo_it, hi_it] = std::minmax_element(out.pixels.begin(), out.pixels.end());
    const float lo = *lo_it, hi = *hi_it;
    if (hi <= lo) {
        std::fill(out.pixels.begin(), out.pixels.end(), 0.0f);
        return out;
    }
    const float inv = 1.0f / (hi - lo);
    for (auto& v : out.pixels) v = (v - lo) * inv;
    return out;
}

PatchGrid partition_patches(const Image& image, int patch_size) {
    if (image.height < patch_size || image.width < patch_size) {
        throw DataError("partition_patches: image smaller than " +
                        std::to_string(patch_size) + "x" + std::to_string(patch_size));
    }
    PatchGrid grid;
    grid.patch_size = patch_size;
    grid.rows = image.height / patch_size;
    grid.cols = image.width / patch_size;
    grid.cropped = (image.height % patch_size != 0) || (image.width % patch_size != 0);
    if (grid.cropped) {
        warn("partition_patches: cropping " + std::to_string(image.height % patch_size) +
             " rows / " + std::to_string(image.width % patch_size) + " cols remainder");
    }
    grid.data.resize(static_cast<size_t>(grid.count()) * patch_size * patch_size);
    for (int pr = 0; pr < grid.rows; ++pr) {
        for (int pc = 0; pc < grid.cols; ++pc) {
            float* dst = grid.patch(pr * grid.cols + pc);
            for (int r = 0; r < patch_size; ++r) {
                const float* src = &image.pixels[static_cast<size_t>(pr * patch_size + r) * image.width +
                                                 pc * patch_size];
                std::copy(src, src + patch_size, dst + static_cast<size_t>(r) * patch_size);
            }
        }
    }
    return grid;
}

Image reassemble_patches(const PatchGrid& grid) {
    const int ps = grid.patch_size;
    Image out(grid.rows * ps, grid.cols * ps);
    for (int p = 0; p < grid.count(); ++p) {
        const auto [r0, c0] = grid.origin(p);
        const float* src = grid.patch(p);
        for (int r = 0; r < ps; ++r) {
            std::copy(src + static_cast<size_t>(r) * ps, src + static_cast<size_t>(r + 1) * ps,
                      &out.pixels[static_cast<size_t>(r0 + r) * out.width + c0]);
        }
    }
    return out;
}

} // namespace patchiq
