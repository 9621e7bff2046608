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

#include "patchiq/image.hpp"

namespace patchiq {

// Estimation parameters. The threshold criterion, ring width and smoothing
// window are not prescribed by the labeling method itself, so they are
// explicit here and recorded in output metadata.
struct FrcOptions {
    double threshold = 1.0 / 7.0;
    int smoothing_window = 5;    // moving average over rings
};

struct FrcCurve {
    std::vector<double> frequencies;   // cycles/pixel, strictly increasing
    std::vector<double> correlations;  // in [-1, 1]
    std::vector<bool> has_energy;      // ring had nonzero denominator
    double ring_width = 0.0;
};

struct ResolutionEstimate {
    double cutoff_frequency = 0.5;  // cycles/pixel, in (0, 0.5]
    double resolution_px = 2.0;     // 1 / cutoff
    std::optional<double> resolution_um;
    bool no_crossing = false;       // curve never fell below the threshold
};

// Checkerboard decimation into two half-resolution sub-images: A averages
// the (0,0)/(1,1) diagonal of each 2x2 block, B the (0,1)/(1,0) one.
// Odd dimensions are cropped by one row/column with a warning.
std::pair<Image, Image> split_subimages(const Image& image);

// Per-ring normalized cross-correlation of the two Fourier transforms,
// ring width one frequency sample.
FrcCurve frc_curve(const Image& a, const Image& b);

// split -> curve -> smooth -> first threshold crossing (linear
// interpolation); no crossing maps to the Nyquist cutoff, flagged.
// Throws NumericError on a zero-variance image.
ResolutionEstimate frc_resolution(const Image& image, const FrcOptions& options = {});

} // namespace patchiq
