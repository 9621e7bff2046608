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

#include <string>
#include <vector>

#include "patchiq/image.hpp"
#include "patchiq/net.hpp"

namespace patchiq {

struct PredictionResult {
    double score = 0.0;                 // denormalized target units
    int rows = 0, cols = 0;             // patch grid geometry
    int patch_size = kPatchSize;
    std::vector<double> patch_quality;  // rows*cols, denormalized
    std::vector<double> patch_weight;   // rows*cols, > 0
    bool cropped = false;

    double quality_at(int r, int c) const { return patch_quality[static_cast<size_t>(r) * cols + c]; }
    double weight_at(int r, int c) const { return patch_weight[static_cast<size_t>(r) * cols + c]; }
};

// partition -> forward (inference mode) -> aggregate -> denormalize.
PredictionResult predict_image(Model& model, const Image& image);

struct BatchItem {
    std::string id;
    std::string score_or_error;  // numeric score, or the error message
    bool ok = false;
    double elapsed_ms = 0.0;
};

// Predict every .f32/.png/.tif image in a directory (or every manifest
// entry); writes per-image CSV rows and optional heatmaps under out_dir.
// Per-file failures are recorded and the batch continues.
struct BatchReport {
    std::vector<BatchItem> items;
    double total_elapsed_ms = 0.0;
};

BatchReport predict_batch(Model& model, const std::vector<std::pair<std::string, std::string>>& id_paths,
                          const std::string& out_dir, bool heatmaps, bool normalized_maps = false);

enum class MapKind { Quality, Weight };

// Writes three artifacts per call:
//   <out_prefix>.csv         raw map values, row-major
//   <out_prefix>.png         overlay: grayscale underlay + color ramp
//   <out_prefix>.json        value range, map kind, blend constants
void render_heatmap(const PredictionResult& result, const Image& image, MapKind which,
                    const std::string& out_prefix);

} // namespace patchiq
